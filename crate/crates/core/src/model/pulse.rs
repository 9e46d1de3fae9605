//! Ultrafast rotation pulses: adiabatic-elimination angle and integrated
//! AC Stark phase of the bright state.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Quadrature points across the envelope support.
const QUADRATURE_POINTS: usize = 501;
/// Half-width of the Gaussian support in units of `duration`.
const GAUSSIAN_SUPPORT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// Ω(t) = Ω_peak exp(−t²/2d²), d = `duration`.
    Gaussian,
    /// Ω(t) = Ω_peak on [0, d].
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    /// Peak Rabi frequency, rad/ns.
    pub rabi_peak: f64,
    /// Square length or Gaussian standard deviation, ns.
    pub duration: f64,
    /// Optical detuning Δ from the trion transition, rad/ns.
    pub detuning: f64,
    pub shape: PulseShape,
}

impl PulseEnvelope {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(ModelError::invalid("duration", "must be > 0"));
        }
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(ModelError::invalid("detuning", "must be finite and non-zero"));
        }
        if !self.rabi_peak.is_finite() {
            return Err(ModelError::invalid("rabi_peak", "must be finite"));
        }
        Ok(())
    }

    pub fn rabi(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Gaussian => {
                let x = t / self.duration;
                self.rabi_peak * (-0.5 * x * x).exp()
            }
            PulseShape::Square => {
                if (0.0..=self.duration).contains(&t) {
                    self.rabi_peak
                } else {
                    0.0
                }
            }
        }
    }

    /// Integration interval covering the envelope.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            PulseShape::Gaussian => (
                -GAUSSIAN_SUPPORT * self.duration,
                GAUSSIAN_SUPPORT * self.duration,
            ),
            PulseShape::Square => (0.0, self.duration),
        }
    }

    /// Instantaneous Stark shift δω(t) = (Δ/2)[√(1 + 4Ω²/Δ²) − 1].
    pub fn stark_shift(&self, t: f64) -> f64 {
        let w = self.rabi(t);
        let d = self.detuning;
        let x = 4.0 * w * w / (d * d);
        // (Δ/2)·x/(√(1+x)+1): no cancellation for small x
        0.5 * d * x / ((1.0 + x).sqrt() + 1.0)
    }
}

/// Composite Simpson rule on `n` points (n odd, ≥ 3).
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 3 && n % 2 == 1);
    let h = (b - a) / (n - 1) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// θ ≈ ∫ Ω²(t)/Δ dt.
pub fn rotation_angle(env: &PulseEnvelope) -> Result<f64, ModelError> {
    env.validate()?;
    let (a, b) = env.support();
    Ok(simpson(
        |t| {
            let w = env.rabi(t);
            w * w / env.detuning
        },
        a,
        b,
        QUADRATURE_POINTS,
    ))
}

/// ∫ δω(t) dt.
pub fn stark_phase(env: &PulseEnvelope) -> Result<f64, ModelError> {
    env.validate()?;
    let (a, b) = env.support();
    Ok(simpson(|t| env.stark_shift(t), a, b, QUADRATURE_POINTS))
}
