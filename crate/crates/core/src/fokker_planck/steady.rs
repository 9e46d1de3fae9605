use super::{NuclearPdf, OmegaGrid, PdeError};
use crate::model::ModelParams;

/// Stationary density f(Ω) ∝ exp[−κ ∫₀^Ω u / (D + αC(u)) du].
///
/// The inner integral is a cumulative trapezoid over cell centers, shifted
/// by its maximum before exponentiation; the prefactor comes from unit mass.
pub fn steady_state_closed_form(
    count: impl Fn(f64) -> f64,
    p: &ModelParams,
    grid: &OmegaGrid,
) -> Result<NuclearPdf, PdeError> {
    grid.validate()?;
    p.validate()?;
    let centers = grid.centers();
    let mut integrand = Vec::with_capacity(centers.len());
    for &w in &centers {
        let diff = p.diffusion + p.alpha * count(w);
        if !(diff > 0.0) || !diff.is_finite() {
            return Err(PdeError::VanishingDiffusion { omega: w });
        }
        integrand.push(w / diff);
    }
    let h = grid.spacing();
    let mut exponent = Vec::with_capacity(centers.len());
    let mut acc = 0.0;
    exponent.push(0.0);
    for pair in integrand.windows(2) {
        acc -= p.kappa * 0.5 * h * (pair[0] + pair[1]);
        exponent.push(acc);
    }
    let top = exponent.iter().cloned().fold(f64::MIN, f64::max);
    NuclearPdf::from_weights(*grid, exponent.iter().map(|e| (e - top).exp()).collect())
}
