//! Physical parameters of the feedback model and the closed-form optical
//! functions built on them.

mod count;
mod estimates;
mod pulse;
mod sequence;

pub use count::{
    count_rate_c1, count_rate_c2, count_rate_c3, count_rate_derivative, pump_rate, pump_step,
    ramsey_count,
};
pub use estimates::{alpha_estimate, nuclear_flip_rate_estimate};
pub use pulse::{rotation_angle, stark_phase, PulseEnvelope, PulseShape};
pub use sequence::{PulseSequence, ScanRange, SequenceKind, SequenceSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{ghz_to_rad_per_ns, TWO_PI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("length mismatch: {left} flip rates but {right} couplings")]
    LengthMismatch { left: usize, right: usize },
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

/// Constants of the nuclear feedback model in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Electron Larmor frequency, rad/ns.
    pub delta_e: f64,
    /// Background nuclear diffusion D, rad²/ns³.
    pub diffusion: f64,
    /// Mean-restoring rate κ, 1/ns.
    pub kappa: f64,
    /// Trion-driven diffusion strength α, rad²/ns³.
    pub alpha: f64,
    /// Peak optical pumping rate β₀, 1/ns.
    pub beta0: f64,
    /// Gaussian pumping linewidth σ, rad/ns.
    pub sigma: f64,
    /// Equilibrium pumped polarization S_p, in [-1/2, 1/2].
    pub s_pump: f64,
    /// Optical pumping window T_p, ns.
    pub t_pump: f64,
    /// Ramsey phase offset φ₀, rad.
    pub phi0: f64,
}

impl Default for ModelParams {
    /// Two-pulse Ramsey set: κ/α = 10⁴ ps², β₀ = 3/T_p, σ/2π = 1.6 GHz.
    fn default() -> Self {
        let kappa = 1e-8;
        let t_pump = 26.0;
        ModelParams {
            delta_e: ghz_to_rad_per_ns(25.3),
            diffusion: 0.3 * kappa,
            kappa,
            alpha: 100.0 * kappa,
            beta0: 3.0 / t_pump,
            sigma: ghz_to_rad_per_ns(1.6),
            s_pump: 0.5,
            t_pump,
            phi0: 0.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [
            ("delta_e", self.delta_e),
            ("diffusion", self.diffusion),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("beta0", self.beta0),
            ("sigma", self.sigma),
            ("s_pump", self.s_pump),
            ("t_pump", self.t_pump),
            ("phi0", self.phi0),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(ModelError::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.diffusion < 0.0 {
            return Err(ModelError::invalid("diffusion", "must be >= 0"));
        }
        if self.kappa <= 0.0 {
            return Err(ModelError::invalid("kappa", "must be > 0"));
        }
        if self.alpha < 0.0 {
            return Err(ModelError::invalid("alpha", "must be >= 0"));
        }
        if self.beta0 < 0.0 {
            return Err(ModelError::invalid("beta0", "must be >= 0"));
        }
        if self.sigma <= 0.0 {
            return Err(ModelError::invalid("sigma", "must be > 0"));
        }
        if self.t_pump <= 0.0 {
            return Err(ModelError::invalid("t_pump", "must be > 0"));
        }
        if self.s_pump.abs() > 0.5 {
            return Err(ModelError::invalid("s_pump", "|s_pump| must be <= 1/2"));
        }
        Ok(())
    }

    /// α/κ in rad²/ns², the only combination of α and κ the steady states see.
    pub fn alpha_over_kappa(&self) -> f64 {
        self.alpha / self.kappa
    }

    pub fn diffusion_over_kappa(&self) -> f64 {
        self.diffusion / self.kappa
    }

    /// Larmor period 2π/δₑ, ns.
    pub fn larmor_period(&self) -> f64 {
        TWO_PI / self.delta_e.abs()
    }

    pub fn with_alpha_over_kappa(mut self, ratio: f64) -> Self {
        self.alpha = ratio * self.kappa;
        self
    }

    pub fn with_diffusion_over_kappa(mut self, ratio: f64) -> Self {
        self.diffusion = ratio * self.kappa;
        self
    }
}
