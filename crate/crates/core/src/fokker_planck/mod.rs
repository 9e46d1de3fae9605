//! Overhauser-shift probability density under trion-driven diffusion.
//!
//! ∂f/∂t = κ ∂_Ω[Ω f] + ∂_Ω{[D + α C_j(Ω)] ∂_Ω f}
//!
//! discretized as a flux-conservative finite-volume scheme with zero-flux
//! walls. Face fluxes use the Chang–Cooper (Scharfetter–Gummel) weighting,
//! whose discrete equilibrium reproduces exp(−κ∫u/(D + αC) du) cell by cell.

mod grid;
mod io;
mod pdf;
mod solver;
mod steady;

pub use grid::{default_omega_max, OmegaGrid, DEFAULT_CELLS, MIN_CELLS};
pub use io::write_heatmap_csv;
pub use pdf::{Moments, NuclearPdf};
pub use solver::{evolve, DriftDiffusionOperator, Stepping};
pub use steady::steady_state_closed_form;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid pdf: {0}")]
    InvalidPdf(String),
    #[error("time step {dt} exceeds the explicit stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("instability at step {step} (t = {time} ns): {detail}")]
    Unstable {
        step: usize,
        time: f64,
        detail: String,
    },
    #[error("diffusion coefficient D + αC vanishes at Ω = {omega} rad/ns")]
    VanishingDiffusion { omega: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
