use std::path::Path;

use super::{OmegaGrid, PdeError};

/// Normalization tolerance for a valid density.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Cell-averaged density f(Ω) in ns/rad on an `OmegaGrid`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclearPdf {
    grid: OmegaGrid,
    density: Vec<f64>,
}

impl NuclearPdf {
    /// Wraps `density` after checking length, sign and unit mass.
    pub fn new(grid: OmegaGrid, density: Vec<f64>) -> Result<Self, PdeError> {
        grid.validate()?;
        if density.len() != grid.n_cells {
            return Err(PdeError::InvalidPdf(format!(
                "{} values for {} cells",
                density.len(),
                grid.n_cells
            )));
        }
        if let Some((i, v)) = density
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(PdeError::InvalidPdf(format!("cell {i} has density {v}")));
        }
        let pdf = NuclearPdf { grid, density };
        let mass = pdf.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(PdeError::InvalidPdf(format!("mass {mass} is not 1")));
        }
        Ok(pdf)
    }

    /// Normalizes non-negative `weights` to unit mass.
    pub fn from_weights(grid: OmegaGrid, mut weights: Vec<f64>) -> Result<Self, PdeError> {
        grid.validate()?;
        let total: f64 = weights.iter().sum::<f64>() * grid.spacing();
        if !(total > 0.0 && total.is_finite()) {
            return Err(PdeError::InvalidPdf(format!("cannot normalize total {total}")));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(grid, weights)
    }

    pub fn from_fn(grid: OmegaGrid, f: impl Fn(f64) -> f64) -> Result<Self, PdeError> {
        let w = grid.centers().into_iter().map(f).collect();
        Self::from_weights(grid, w)
    }

    /// Gaussian sampled at cell centers.
    pub fn gaussian(grid: OmegaGrid, mean: f64, variance: f64) -> Result<Self, PdeError> {
        if !(variance > 0.0) {
            return Err(PdeError::InvalidPdf("gaussian variance must be > 0".into()));
        }
        Self::from_fn(grid, |w| (-(w - mean).powi(2) / (2.0 * variance)).exp())
    }

    /// All mass in the cell containing `omega`.
    pub fn point_mass(grid: OmegaGrid, omega: f64) -> Result<Self, PdeError> {
        let mut w = vec![0.0; grid.n_cells];
        w[grid.cell_of(omega)] = 1.0;
        Self::from_weights(grid, w)
    }

    pub(crate) fn from_raw(grid: OmegaGrid, density: Vec<f64>) -> Self {
        NuclearPdf { grid, density }
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn into_density(self) -> Vec<f64> {
        self.density
    }

    /// Finite-volume mass h·Σf; the quantity the scheme conserves.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.spacing()
    }

    fn trapezoid(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.spacing();
        let n = self.density.len();
        let mut acc = 0.0;
        for (i, f) in self.density.iter().enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * f * g(self.grid.center(i));
        }
        acc * h
    }

    /// Mean and central second moment by trapezoid over cell centers.
    pub fn moments(&self) -> Moments {
        let norm = self.trapezoid(|_| 1.0);
        let mean = self.trapezoid(|w| w) / norm;
        let variance = self.trapezoid(|w| (w - mean) * (w - mean)) / norm;
        Moments { mean, variance }
    }

    /// ⟨C(Ω)⟩.
    pub fn expected_count(&self, count: impl Fn(f64) -> f64) -> f64 {
        self.trapezoid(count) / self.trapezoid(|_| 1.0)
    }

    /// ∫|f − g| dΩ on a shared grid.
    pub fn l1_distance(&self, other: &NuclearPdf) -> f64 {
        assert_eq!(self.grid, other.grid, "l1_distance needs a common grid");
        self.density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.grid.spacing()
    }

    /// Index of the highest cell.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        self.grid.center(i)
    }

    /// Two-column snapshot: omega_rad_per_ns, density.
    pub fn write_csv(&self, path: &Path) -> Result<(), PdeError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["omega_rad_per_ns", "density"])?;
        for (i, f) in self.density.iter().enumerate() {
            w.write_record([self.grid.center(i).to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
