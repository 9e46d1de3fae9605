use super::{reduced_drift, reduced_slope, MeanFieldError};
use crate::model::{ModelParams, PulseSequence};

/// Dormand–Prince 5(4) tableau.
const C: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const ERR: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Newton polishing is attempted only once the predicted correction is this small.
const NEWTON_MAX_STEP: f64 = 1e-3;
const MAX_NUDGES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    /// Stop when |dω/dt|/κ falls below this, rad/ns.
    pub tol: f64,
    /// Integration budget in units of 1/κ.
    pub max_time: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            tol: 1e-8,
            max_time: 1e4,
        }
    }
}

/// Integrates dω/dt from `omega0` until the drift vanishes and returns the
/// attractor reached. The basin is selected by the dynamics, not by picking
/// among roots.
pub fn relax_to_steady(
    omega0: f64,
    seq: &PulseSequence,
    p: &ModelParams,
    tol: f64,
) -> Result<f64, MeanFieldError> {
    relax_with(
        omega0,
        seq,
        p,
        RelaxOptions {
            tol,
            ..RelaxOptions::default()
        },
    )
}

pub fn relax_with(
    omega0: f64,
    seq: &PulseSequence,
    p: &ModelParams,
    opts: RelaxOptions,
) -> Result<f64, MeanFieldError> {
    if !(opts.tol > 0.0) {
        return Err(MeanFieldError::InvalidTolerance(opts.tol));
    }
    p.validate()?;
    let g = |w: f64| reduced_drift(w, seq, p);
    let atol = (0.01 * opts.tol).max(1e-13);
    let rtol = 1e-9;
    let mut w = omega0;
    let mut time = 0.0;
    let mut h: f64 = 1e-2;
    let mut nudges = 0;
    let mut k = [0.0f64; 7];
    k[0] = g(w);
    loop {
        let gw = k[0];
        if gw.abs() < opts.tol {
            // Sitting exactly on a repelling root: step off it and keep going.
            if reduced_slope(w, seq, p) > 0.0 && nudges < MAX_NUDGES {
                nudges += 1;
                w += 1e-6 * (1.0 + w.abs());
                k[0] = g(w);
                continue;
            }
            return Ok(w);
        }
        if time > opts.max_time || !w.is_finite() {
            return Err(MeanFieldError::NoConvergence {
                last_omega: w,
                last_drift: gw,
                time,
            });
        }
        if gw.abs() < 1e3 * opts.tol {
            let slope = reduced_slope(w, seq, p);
            if slope < 0.0 {
                let step = -gw / slope;
                if step.abs() < NEWTON_MAX_STEP {
                    let trial = w + step;
                    let gt = g(trial);
                    if gt.abs() < gw.abs() {
                        w = trial;
                        k[0] = gt;
                        continue;
                    }
                }
            }
        }
        // one adaptive Dormand–Prince step
        for stage in 1..7 {
            let mut y = w;
            for (j, kj) in k.iter().take(stage).enumerate() {
                y += h * C[stage - 1][j] * kj;
            }
            k[stage] = g(y);
        }
        let mut w_new = w;
        for (j, kj) in k.iter().take(6).enumerate() {
            w_new += h * C[5][j] * kj;
        }
        let err: f64 = h * ERR.iter().zip(&k).map(|(e, kj)| e * kj).sum::<f64>();
        let scale = atol + rtol * w.abs().max(w_new.abs());
        let ratio = err.abs() / scale;
        if ratio <= 1.0 {
            w = w_new;
            time += h;
            // first-same-as-last
            k[0] = k[6];
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(10.0);
    }
}
