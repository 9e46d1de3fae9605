//! Optical pumping and trion count rates per pulse cycle.

use super::{ModelParams, PulseSequence};

/// Gaussian pumping rate β(Ω) = β₀ exp(−(Ω − δ_L)² / 2σ²), 1/ns.
pub fn pump_rate(omega: f64, laser_detuning: f64, p: &ModelParams) -> f64 {
    let x = (omega - laser_detuning) / p.sigma;
    p.beta0 * (-0.5 * x * x).exp()
}

/// dβ/dΩ.
fn pump_rate_slope(omega: f64, laser_detuning: f64, p: &ModelParams) -> f64 {
    -pump_rate(omega, laser_detuning, p) * (omega - laser_detuning) / (p.sigma * p.sigma)
}

/// Spin polarization after relaxing toward S_p at rate β for T_p.
pub fn pump_step(s_before: f64, beta: f64, p: &ModelParams) -> f64 {
    let decay = (-beta * p.t_pump).exp();
    p.s_pump * (1.0 - decay) + s_before * decay
}

/// One-pulse count rate 2 S_p tanh(β T_p / 2).
pub fn count_rate_c1(omega: f64, laser_detuning: f64, p: &ModelParams) -> f64 {
    let beta = pump_rate(omega, laser_detuning, p);
    2.0 * p.s_pump * (0.5 * beta * p.t_pump).tanh()
}

/// Two-pulse count at fixed pumping strength.
///
/// `beta_tp` is β·T_p and `phase` the Ramsey phase φ₀ + (δₑ + Ω)τ. Written
/// in terms of a = 1 − e^{−βT_p} and m = 1 − cos(phase) so that both small
/// limits stay accurate; the 0/0 point a = m = 0 is defined as zero.
pub fn ramsey_count(s_pump: f64, beta_tp: f64, phase: f64) -> f64 {
    let a = -(-beta_tp).exp_m1();
    let half = (0.5 * phase).sin();
    let m = 2.0 * half * half;
    let den = m + a - a * m;
    if den <= 0.0 {
        return 0.0;
    }
    s_pump * a * m / den
}

fn ramsey_phase(omega: f64, tau: f64, p: &ModelParams) -> f64 {
    p.phi0 + (p.delta_e + omega) * tau
}

/// Two-pulse (Ramsey) trions per cycle.
pub fn count_rate_c2(omega: f64, tau: f64, p: &ModelParams) -> f64 {
    let beta = pump_rate(omega, 0.0, p);
    ramsey_count(p.s_pump, beta * p.t_pump, ramsey_phase(omega, tau, p))
}

/// Echo count: the π pulse offset doubles the effective delay.
pub fn count_rate_c3(omega: f64, tau: f64, p: &ModelParams) -> f64 {
    count_rate_c2(omega, 2.0 * tau, p)
}

fn c1_derivative(omega: f64, laser_detuning: f64, p: &ModelParams) -> f64 {
    let beta = pump_rate(omega, laser_detuning, p);
    let sech = 1.0 / (0.5 * beta * p.t_pump).cosh();
    p.s_pump * p.t_pump * sech * sech * pump_rate_slope(omega, laser_detuning, p)
}

fn c2_derivative(omega: f64, tau: f64, p: &ModelParams) -> f64 {
    let beta = pump_rate(omega, 0.0, p);
    let a = -(-beta * p.t_pump).exp_m1();
    let phase = ramsey_phase(omega, tau, p);
    let half = (0.5 * phase).sin();
    let m = 2.0 * half * half;
    let den = m + a - a * m;
    if den <= 0.0 {
        return 0.0;
    }
    let den2 = den * den;
    // ∂C/∂a = S m²/den², ∂C/∂m = S a²/den²
    let da = p.t_pump * pump_rate_slope(omega, 0.0, p) * (1.0 - a);
    let dm = phase.sin() * tau;
    p.s_pump * (m * m * da + a * a * dm) / den2
}

/// Analytic ∂C_j/∂Ω for the sequence at its pinned scan value.
pub fn count_rate_derivative(seq: &PulseSequence, omega: f64, p: &ModelParams) -> f64 {
    match *seq {
        PulseSequence::OnePulse { laser_detuning } => c1_derivative(omega, laser_detuning, p),
        PulseSequence::TwoPulse { tau } => c2_derivative(omega, tau, p),
        PulseSequence::ThreePulse { tau, .. } => c2_derivative(omega, 2.0 * tau, p),
    }
}

impl PulseSequence {
    /// Trions per cycle C_j(Ω).
    pub fn count(&self, omega: f64, p: &ModelParams) -> f64 {
        match *self {
            PulseSequence::OnePulse { laser_detuning } => count_rate_c1(omega, laser_detuning, p),
            PulseSequence::TwoPulse { tau } => count_rate_c2(omega, tau, p),
            PulseSequence::ThreePulse { tau, .. } => count_rate_c3(omega, tau, p),
        }
    }

    pub fn count_derivative(&self, omega: f64, p: &ModelParams) -> f64 {
        count_rate_derivative(self, omega, p)
    }

    /// β(Ω) seen by this sequence; the fixed-wavelength sequences pump at δ_L = 0.
    pub fn pump_rate(&self, omega: f64, p: &ModelParams) -> f64 {
        match *self {
            PulseSequence::OnePulse { laser_detuning } => pump_rate(omega, laser_detuning, p),
            _ => pump_rate(omega, 0.0, p),
        }
    }
}
