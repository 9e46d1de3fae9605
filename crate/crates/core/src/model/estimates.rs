//! Order-of-magnitude rate estimates for the nuclear bath.

use super::ModelError;

/// Γₙ ≈ (B_hole / B_ext)² γ, in the units of `gamma_rad` (1/ns).
pub fn nuclear_flip_rate_estimate(b_hole: f64, b_ext: f64, gamma_rad: f64) -> Result<f64, ModelError> {
    if !(b_ext > 0.0) {
        return Err(ModelError::invalid("b_ext", "external field must be > 0"));
    }
    let ratio = b_hole / b_ext;
    Ok(ratio * ratio * gamma_rad)
}

/// α ≈ Σₙ Γₙ (Aₙ/ħ)², rad²/ns³.
pub fn alpha_estimate(gamma_n: &[f64], a_n_over_hbar: &[f64]) -> Result<f64, ModelError> {
    if gamma_n.len() != a_n_over_hbar.len() {
        return Err(ModelError::LengthMismatch {
            left: gamma_n.len(),
            right: a_n_over_hbar.len(),
        });
    }
    Ok(gamma_n
        .iter()
        .zip(a_n_over_hbar)
        .map(|(g, a)| g * a * a)
        .sum())
}
