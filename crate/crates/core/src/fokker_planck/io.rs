use std::path::Path;

use super::{NuclearPdf, PdeError};

/// Long-form heatmap: one row per (scan value, omega) cell, keeping every
/// `tau_stride`-th column and `omega_stride`-th cell.
pub fn write_heatmap_csv(
    path: &Path,
    columns: &[(f64, &NuclearPdf)],
    tau_stride: usize,
    omega_stride: usize,
) -> Result<(), PdeError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["tau_ns", "omega_rad_per_ns", "density"])?;
    for (tau, pdf) in columns.iter().step_by(tau_stride.max(1)) {
        let grid = pdf.grid();
        for (i, f) in pdf.density().iter().enumerate().step_by(omega_stride.max(1)) {
            w.write_record([tau.to_string(), grid.center(i).to_string(), f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
