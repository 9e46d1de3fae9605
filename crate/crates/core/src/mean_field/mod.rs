//! First-moment dynamics of the Overhauser shift,
//!
//! dω/dt = −κω + α C_j′(ω),
//!
//! its fixed points, and directional continuation sweeps over the scan
//! variable. Tolerances act on the reduced drift (dω/dt)/κ, in rad/ns, so
//! they do not depend on the physical value of κ.

mod fixed_points;
mod relax;
mod sweep;

pub use fixed_points::{
    bistable_window_width, default_bracket, find_all_fixed_points, fixed_point_atlas, AtlasEntry,
    FixedPoint, FixedPointSet, Stability, DEFAULT_SCAN_POINTS,
};
pub use relax::{relax_to_steady, relax_with, RelaxOptions};
pub use sweep::{hysteresis_fraction, loop_area, sweep, SweepRecord, SweepTrace};

use thiserror::Error;

use crate::model::{ModelError, ModelParams, PulseSequence};

#[derive(Debug, Error)]
pub enum MeanFieldError {
    #[error("no quasi-equilibrium after {time}/κ: last ω = {last_omega} rad/ns, reduced drift {last_drift} rad/ns")]
    NoConvergence {
        last_omega: f64,
        last_drift: f64,
        time: f64,
    },
    #[error("sweep failed at index {index} (scan value {scan_value}): {source}")]
    SweepFailed {
        index: usize,
        scan_value: f64,
        #[source]
        source: Box<MeanFieldError>,
    },
    #[error("scan values are not strictly monotone at index {index}")]
    NotMonotone { index: usize },
    #[error("empty scan")]
    EmptyScan,
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("traces are not on a common scan grid")]
    MismatchedTraces,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// dω/dt = −κω + α C_j′(ω), rad/ns².
pub fn drift(omega: f64, seq: &PulseSequence, p: &ModelParams) -> f64 {
    -p.kappa * omega + p.alpha * seq.count_derivative(omega, p)
}

/// Drift per unit κ: −ω + (α/κ) C_j′(ω), rad/ns.
pub fn reduced_drift(omega: f64, seq: &PulseSequence, p: &ModelParams) -> f64 {
    -omega + p.alpha_over_kappa() * seq.count_derivative(omega, p)
}

/// d(reduced drift)/dω by central difference of the analytic C′.
pub(crate) fn reduced_slope(omega: f64, seq: &PulseSequence, p: &ModelParams) -> f64 {
    let h = 1e-6 * omega.abs().max(1.0);
    (reduced_drift(omega + h, seq, p) - reduced_drift(omega - h, seq, p)) / (2.0 * h)
}
