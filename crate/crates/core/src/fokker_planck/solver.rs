use super::{NuclearPdf, OmegaGrid, PdeError};
use crate::model::ModelParams;

/// Densities below this are treated as an instability rather than roundoff.
const NEGATIVE_TOLERANCE: f64 = -1e-12;
/// Fraction of the positivity limit used when the caller gives no step.
const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepping {
    /// Forward Euler, positivity-preserving up to `max_explicit_dt`.
    #[default]
    Explicit,
    /// Backward Euler; unconditionally positive, first order in time.
    Implicit,
}

/// Bernoulli function x/(eˣ − 1).
fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

/// Chang–Cooper discretization of the drift-diffusion generator.
///
/// For the interior face between cells i and i+1 the flux is
/// `F = h·(right[i]·f_i − left[i]·f_{i+1})`, so that
/// `df_i/dt = right[i-1] f_{i-1} − (left[i-1] + right[i]) f_i + left[i] f_{i+1}`.
#[derive(Debug, Clone)]
pub struct DriftDiffusionOperator {
    grid: OmegaGrid,
    right: Vec<f64>,
    left: Vec<f64>,
}

impl DriftDiffusionOperator {
    pub fn new(
        grid: OmegaGrid,
        count: impl Fn(f64) -> f64,
        p: &ModelParams,
    ) -> Result<Self, PdeError> {
        grid.validate()?;
        p.validate()?;
        let h = grid.spacing();
        let faces = grid.n_cells - 1;
        let mut right = Vec::with_capacity(faces);
        let mut left = Vec::with_capacity(faces);
        for i in 0..faces {
            let w = grid.face(i);
            let diff = p.diffusion + p.alpha * count(w);
            let velocity = -p.kappa * w;
            if !diff.is_finite() || diff < 0.0 {
                return Err(PdeError::VanishingDiffusion { omega: w });
            }
            if diff == 0.0 {
                right.push(velocity.max(0.0) / h);
                left.push((-velocity).max(0.0) / h);
            } else {
                let peclet = velocity * h / diff;
                let scale = diff / (h * h);
                right.push(scale * bernoulli(-peclet));
                left.push(scale * bernoulli(peclet));
            }
        }
        Ok(DriftDiffusionOperator { grid, right, left })
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    /// Largest forward-Euler step that keeps every update coefficient ≥ 0.
    pub fn max_explicit_dt(&self) -> f64 {
        let n = self.grid.n_cells;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let out_left = if i > 0 { self.left[i - 1] } else { 0.0 };
            let out_right = if i + 1 < n { self.right[i] } else { 0.0 };
            worst = worst.max(out_left + out_right);
        }
        if worst == 0.0 {
            f64::INFINITY
        } else {
            1.0 / worst
        }
    }

    pub fn default_dt(&self) -> f64 {
        DEFAULT_CFL * self.max_explicit_dt()
    }

    fn explicit_step(&self, f: &mut [f64], flux: &mut [f64], dt: f64) {
        for (i, q) in flux.iter_mut().enumerate() {
            *q = self.right[i] * f[i] - self.left[i] * f[i + 1];
        }
        let n = f.len();
        f[0] -= dt * flux[0];
        for i in 1..n - 1 {
            f[i] += dt * (flux[i - 1] - flux[i]);
        }
        f[n - 1] += dt * flux[n - 2];
    }

    fn implicit_step(&self, f: &mut [f64], scratch: &mut [f64], dt: f64) {
        // (I − dt L) f' = f by the Thomas algorithm; scratch holds c'.
        let n = f.len();
        let lower = |i: usize| -dt * self.right[i - 1];
        let upper = |i: usize| -dt * self.left[i];
        let diag = |i: usize| {
            let a = if i > 0 { self.left[i - 1] } else { 0.0 };
            let b = if i + 1 < n { self.right[i] } else { 0.0 };
            1.0 + dt * (a + b)
        };
        let mut denom = diag(0);
        scratch[0] = upper(0) / denom;
        f[0] /= denom;
        for i in 1..n {
            let l = lower(i);
            denom = diag(i) - l * scratch[i - 1];
            if i + 1 < n {
                scratch[i] = upper(i) / denom;
            }
            f[i] = (f[i] - l * f[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            f[i] -= scratch[i] * f[i + 1];
        }
    }

    /// Advances `pdf` to `t_end` with steps of at most `dt`.
    pub fn evolve(
        &self,
        pdf: &NuclearPdf,
        dt: f64,
        t_end: f64,
        stepping: Stepping,
    ) -> Result<NuclearPdf, PdeError> {
        if pdf.grid() != &self.grid {
            return Err(PdeError::InvalidPdf("pdf grid differs from operator grid".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(PdeError::InvalidPdf(format!("bad time stepping dt={dt}, t_end={t_end}")));
        }
        if stepping == Stepping::Explicit {
            let limit = self.max_explicit_dt();
            if dt > limit {
                return Err(PdeError::StepTooLarge { dt, limit });
            }
        }
        let mut f = pdf.density().to_vec();
        let mut scratch = vec![0.0; f.len()];
        let steps = (t_end / dt).ceil() as usize;
        let mut t = 0.0;
        for step in 1..=steps {
            let h = dt.min(t_end - t);
            match stepping {
                Stepping::Explicit => {
                    let faces = f.len() - 1;
                    self.explicit_step(&mut f, &mut scratch[..faces], h)
                }
                Stepping::Implicit => self.implicit_step(&mut f, &mut scratch, h),
            }
            t = if step == steps { t_end } else { t + h };
            if let Some((i, v)) = f
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < NEGATIVE_TOLERANCE)
            {
                return Err(PdeError::Unstable {
                    step,
                    time: t,
                    detail: format!("density {v} in cell {i}"),
                });
            }
        }
        for v in &mut f {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(NuclearPdf::from_raw(self.grid, f))
    }

    /// Zero-flux equilibrium of the discrete operator: f_{i+1}/f_i = right_i/left_i.
    pub fn discrete_equilibrium(&self) -> Result<NuclearPdf, PdeError> {
        let mut log_f = Vec::with_capacity(self.grid.n_cells);
        log_f.push(0.0);
        for i in 0..self.right.len() {
            if self.left[i] == 0.0 || self.right[i] == 0.0 {
                return Err(PdeError::VanishingDiffusion {
                    omega: self.grid.face(i),
                });
            }
            let next = log_f[i] + self.right[i].ln() - self.left[i].ln();
            log_f.push(next);
        }
        let top = log_f.iter().cloned().fold(f64::MIN, f64::max);
        NuclearPdf::from_weights(self.grid, log_f.iter().map(|l| (l - top).exp()).collect())
    }
}

/// Explicit evolution of `pdf` to `t_end` under count function `count`.
///
/// `dt` must not exceed the positivity limit of the discretization; see
/// [`DriftDiffusionOperator::max_explicit_dt`].
pub fn evolve(
    pdf: &NuclearPdf,
    count: impl Fn(f64) -> f64,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<NuclearPdf, PdeError> {
    let op = DriftDiffusionOperator::new(*pdf.grid(), count, p)?;
    op.evolve(pdf, dt, t_end, Stepping::Explicit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou_params() -> ModelParams {
        ModelParams {
            kappa: 1.0,
            diffusion: 1.0,
            alpha: 0.0,
            ..ModelParams::default()
        }
    }

    #[test]
    fn bernoulli_limits() {
        assert_eq!(bernoulli(0.0), 1.0);
        assert!((bernoulli(1e-13) - 1.0).abs() < 1e-12);
        assert!(bernoulli(800.0) == 0.0);
        assert!((bernoulli(-800.0) - 800.0).abs() < 1e-9);
        // B(−x) = x + B(x)
        for x in [0.3, 2.0, 17.0] {
            assert!((bernoulli(-x) - x - bernoulli(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_advection_contracts_with_unit_mass() {
        let p = ModelParams {
            diffusion: 0.0,
            alpha: 0.0,
            kappa: 1.0,
            ..ModelParams::default()
        };
        let grid = OmegaGrid::symmetric(10.0, 256).unwrap();
        let pdf = NuclearPdf::gaussian(grid, 4.0, 0.25).unwrap();
        let op = DriftDiffusionOperator::new(grid, |_| 0.0, &p).unwrap();
        let out = op.evolve(&pdf, op.default_dt(), 2.0, Stepping::Explicit).unwrap();
        assert!((out.mass() - 1.0).abs() < 1e-12);
        let m0 = pdf.moments();
        let m1 = out.moments();
        assert!(m1.mean.abs() < m0.mean.abs() * 0.2);
        assert!(out.density().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn rejects_oversized_step() {
        let grid = OmegaGrid::symmetric(5.0, 128).unwrap();
        let pdf = NuclearPdf::gaussian(grid, 0.0, 1.0).unwrap();
        let p = ou_params();
        let op = DriftDiffusionOperator::new(grid, |_| 0.0, &p).unwrap();
        let err = op
            .evolve(&pdf, 2.0 * op.max_explicit_dt(), 1.0, Stepping::Explicit)
            .unwrap_err();
        assert!(matches!(err, PdeError::StepTooLarge { .. }));
    }

    #[test]
    fn implicit_and_explicit_agree() {
        let grid = OmegaGrid::symmetric(8.0, 256).unwrap();
        let pdf = NuclearPdf::gaussian(grid, 2.0, 0.5).unwrap();
        let p = ou_params();
        let op = DriftDiffusionOperator::new(grid, |_| 0.0, &p).unwrap();
        let dt = 0.25 * op.default_dt();
        let a = op.evolve(&pdf, dt, 0.5, Stepping::Explicit).unwrap();
        let b = op.evolve(&pdf, dt, 0.5, Stepping::Implicit).unwrap();
        assert!(a.l1_distance(&b) < 1e-3, "{}", a.l1_distance(&b));
        assert!((b.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let grid = OmegaGrid::symmetric(8.0, 128).unwrap();
        let p = ModelParams {
            alpha: 3.0,
            ..ou_params()
        };
        let count = |w: f64| 0.5 * (1.0 - (3.0 * w).cos()) * (-w * w / 8.0).exp();
        let op = DriftDiffusionOperator::new(grid, count, &p).unwrap();
        let eq = op.discrete_equilibrium().unwrap();
        let out = op.evolve(&eq, op.default_dt(), 1.0, Stepping::Explicit).unwrap();
        assert!(eq.l1_distance(&out) < 1e-12);
    }
}
