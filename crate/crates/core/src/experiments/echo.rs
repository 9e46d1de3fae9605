use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::output::{finish, output_dir, write_rows};
use super::{ExperimentConfig, ExperimentError, RunReport};
use crate::fokker_planck::{
    default_omega_max, steady_state_closed_form, write_heatmap_csv, NuclearPdf, OmegaGrid,
    DEFAULT_CELLS,
};

/// Environment variable capping the worker threads of the echo loop.
pub const THREADS_ENV: &str = "SIM_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct EchoColumn {
    pub tau: f64,
    pub pdf: NuclearPdf,
    pub mean_omega: f64,
    /// ⟨C₃⟩ over the steady density.
    pub expected_count: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult {
    pub grid: OmegaGrid,
    pub columns: Vec<EchoColumn>,
}

impl EchoResult {
    pub fn taus(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.tau).collect()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.expected_count).collect()
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ExperimentError::config(THREADS_ENV, format!("expected a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))
}

/// Grid for the echo run: fringes of C₃ repeat every π/τ in Ω.
pub fn echo_grid(cfg: &ExperimentConfig) -> Result<OmegaGrid, ExperimentError> {
    let tau_max = cfg.sequence.scan.stop;
    let half = cfg
        .grid
        .omega_max
        .unwrap_or_else(|| default_omega_max(&cfg.model, Some(2.0 * tau_max)));
    Ok(OmegaGrid::symmetric(half, cfg.grid.n_cells.unwrap_or(DEFAULT_CELLS))?)
}

/// Closed-form steady density at every τ of the scan. Columns are computed
/// in parallel and returned in scan order.
pub fn compute_three_pulse_echo(cfg: &ExperimentConfig) -> Result<EchoResult, ExperimentError> {
    cfg.validate()?;
    let grid = echo_grid(cfg)?;
    let taus = cfg.sequence.scan.values();
    let p = cfg.model;
    let spec = cfg.sequence;
    let pool = thread_pool()?;
    info!(
        "{}: {} delays on {} cells, {} threads",
        cfg.name,
        taus.len(),
        grid.n_cells,
        pool.current_num_threads()
    );
    let columns = pool.install(|| {
        taus.par_iter()
            .map(|&tau| {
                let seq = spec.at(tau);
                let pdf = steady_state_closed_form(|w| seq.count(w, &p), &p, &grid)?;
                let mean_omega = pdf.moments().mean;
                let expected_count = pdf.expected_count(|w| seq.count(w, &p));
                Ok(EchoColumn {
                    tau,
                    pdf,
                    mean_omega,
                    expected_count,
                })
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    Ok(EchoResult { grid, columns })
}

#[derive(Serialize)]
struct TraceRow {
    tau_ns: f64,
    mean_omega_rad_per_ns: f64,
    expected_count: f64,
    mass: f64,
}

/// Steady densities across the delay scan: heatmap, ⟨Ω⟩ and ⟨C₃⟩ traces.
pub fn run_three_pulse_echo(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    let result = compute_three_pulse_echo(cfg)?;
    let dir = output_dir(cfg)?;
    let heatmap = dir.join(format!("{}_pdf_heatmap.csv", cfg.name));
    let columns: Vec<(f64, &NuclearPdf)> = result.columns.iter().map(|c| (c.tau, &c.pdf)).collect();
    write_heatmap_csv(
        &heatmap,
        &columns,
        cfg.output.heatmap_tau_stride,
        cfg.output.heatmap_omega_stride,
    )?;
    let rows: Vec<TraceRow> = result
        .columns
        .iter()
        .map(|c| TraceRow {
            tau_ns: c.tau,
            mean_omega_rad_per_ns: c.mean_omega,
            expected_count: c.expected_count,
            mass: c.pdf.mass(),
        })
        .collect();
    let trace = dir.join(format!("{}_trace.csv", cfg.name));
    write_rows(&trace, &rows)?;
    let mut report = RunReport {
        files: vec![heatmap, trace],
        ..RunReport::default()
    };
    let counts = result.counts();
    let mass_drift = result
        .columns
        .iter()
        .map(|c| (c.pdf.mass() - 1.0).abs())
        .fold(0.0, f64::max);
    report
        .metrics
        .insert("count_min".into(), counts.iter().copied().fold(f64::INFINITY, f64::min));
    report
        .metrics
        .insert("count_max".into(), counts.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    report.metrics.insert("max_mass_drift".into(), mass_drift);
    finish(cfg, report)
}
