use serde::{Deserialize, Serialize};

use super::PdeError;
use crate::model::ModelParams;
use crate::units::TWO_PI;

pub const MIN_CELLS: usize = 64;
pub const DEFAULT_CELLS: usize = 2048;

/// Uniform finite-volume grid on [omega_min, omega_max] (rad/ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_cells: usize,
}

impl OmegaGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_cells: usize) -> Result<Self, PdeError> {
        let g = OmegaGrid {
            omega_min,
            omega_max,
            n_cells,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn symmetric(half_width: f64, n_cells: usize) -> Result<Self, PdeError> {
        Self::new(-half_width, half_width, n_cells)
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        if !(self.omega_min.is_finite() && self.omega_max.is_finite()) {
            return Err(PdeError::InvalidGrid("bounds must be finite".into()));
        }
        if self.omega_min >= self.omega_max {
            return Err(PdeError::InvalidGrid(format!(
                "omega_min {} must be below omega_max {}",
                self.omega_min, self.omega_max
            )));
        }
        if self.n_cells < MIN_CELLS {
            return Err(PdeError::InvalidGrid(format!(
                "n_cells {} below minimum {MIN_CELLS}",
                self.n_cells
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.omega_min + self.spacing() * (i as f64 + 0.5)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Interior face between cells `i` and `i + 1`.
    pub fn face(&self, i: usize) -> f64 {
        self.omega_min + self.spacing() * (i + 1) as f64
    }

    /// Index of the cell containing `omega`, clamped to the grid.
    pub fn cell_of(&self, omega: f64) -> usize {
        let x = ((omega - self.omega_min) / self.spacing()).floor();
        (x.max(0.0) as usize).min(self.n_cells - 1)
    }
}

/// Half-width that contains the pumping window, the α = 0 stationary spread
/// and, for delay scans, three fringe periods at the longest delay.
pub fn default_omega_max(p: &ModelParams, tau_max: Option<f64>) -> f64 {
    let mut w = (6.0 * p.sigma).max(8.0 * p.diffusion_over_kappa().sqrt());
    if let Some(tau) = tau_max.filter(|t| *t > 0.0) {
        w = w.max(3.0 * TWO_PI / tau);
    }
    w
}
