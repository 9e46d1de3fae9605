use log::info;
use serde::Serialize;

use super::output::{finish, output_dir, write_rows};
use super::{Direction, ExperimentConfig, ExperimentError, RunReport};
use crate::mean_field::{
    bistable_window_width, default_bracket, fixed_point_atlas, hysteresis_fraction, loop_area,
    reduced_drift, sweep, AtlasEntry, SweepTrace,
};
use crate::units::rad_per_ns_to_ghz;

/// Continuation sweeps in the configured direction(s), in run order.
pub fn compute_sweeps(cfg: &ExperimentConfig) -> Result<Vec<(Direction, SweepTrace)>, ExperimentError> {
    let up: Vec<f64> = cfg.sequence.scan.values();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let opts = cfg.sweep.relax_options();
    let run = |values: &[f64], start: f64| sweep(values, &cfg.sequence, &cfg.model, start, opts);
    let traces = match cfg.sweep.direction {
        Direction::Up => vec![(Direction::Up, run(&up, cfg.sweep.omega_init)?)],
        Direction::Down => vec![(Direction::Down, run(&down, cfg.sweep.omega_init)?)],
        Direction::Both => {
            let first = run(&up, cfg.sweep.omega_init)?;
            let seed = first.last_omega().unwrap_or(cfg.sweep.omega_init);
            let second = run(&down, seed)?;
            vec![(Direction::Up, first), (Direction::Down, second)]
        }
    };
    for (dir, t) in &traces {
        let jumps = t.records.iter().filter(|r| r.jumped).count();
        info!("{} {}: {} points, {} jumps", cfg.name, dir.as_str(), t.len(), jumps);
    }
    Ok(traces)
}

fn sweep_metrics(traces: &[(Direction, SweepTrace)], report: &mut RunReport) -> Result<(), ExperimentError> {
    for (dir, t) in traces {
        let jumps = t.records.iter().filter(|r| r.jumped).count();
        report.metrics.insert(format!("jumps_{}", dir.as_str()), jumps as f64);
    }
    if let [(_, a), (_, b)] = traces {
        report.metrics.insert("loop_area".into(), loop_area(a, b)?);
        report.metrics.insert("hysteresis_fraction".into(), hysteresis_fraction(a, b)?);
    }
    Ok(())
}

fn write_trace(cfg: &ExperimentConfig, dir: Direction, t: &SweepTrace, report: &mut RunReport) -> Result<(), ExperimentError> {
    let path = output_dir(cfg)?.join(format!("{}_{}.csv", cfg.name, dir.as_str()));
    write_rows(&path, &t.records)?;
    report.files.push(path);
    Ok(())
}

/// One row of the drift landscape: restoring and pumping terms of the
/// reduced drift dω/dt / κ at one laser detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub laser_detuning_rad_per_ns: f64,
    pub omega_rad_per_ns: f64,
    pub restoring_rad_per_ns: f64,
    pub pumping_rad_per_ns: f64,
    pub drift_rad_per_ns: f64,
}

const LANDSCAPE_POINTS: usize = 801;

pub fn compute_drift_landscape(cfg: &ExperimentConfig) -> Vec<LandscapeRow> {
    let scan = &cfg.sequence.scan;
    let n = cfg.output.landscape_curves.max(1);
    let values: Vec<f64> = if n == 1 {
        vec![0.5 * (scan.start + scan.stop)]
    } else {
        (0..n)
            .map(|k| scan.start + (scan.stop - scan.start) * k as f64 / (n - 1) as f64)
            .collect()
    };
    let p = &cfg.model;
    let (lo, hi) = values
        .iter()
        .map(|&v| default_bracket(&cfg.sequence.at(v), p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| (a.min(l), b.max(h)));
    let mut rows = Vec::with_capacity(n * LANDSCAPE_POINTS);
    for &v in &values {
        let seq = cfg.sequence.at(v);
        for i in 0..LANDSCAPE_POINTS {
            let w = lo + (hi - lo) * i as f64 / (LANDSCAPE_POINTS - 1) as f64;
            rows.push(LandscapeRow {
                laser_detuning_rad_per_ns: v,
                omega_rad_per_ns: w,
                restoring_rad_per_ns: w,
                pumping_rad_per_ns: p.alpha_over_kappa() * seq.count_derivative(w, p),
                drift_rad_per_ns: reduced_drift(w, &seq, p),
            });
        }
    }
    rows
}

/// Laser-detuning sweeps in each direction plus the drift landscape.
pub fn run_one_pulse_hysteresis(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    let traces = compute_sweeps(cfg)?;
    let mut report = RunReport::default();
    for (dir, t) in &traces {
        write_trace(cfg, *dir, t, &mut report)?;
    }
    let path = output_dir(cfg)?.join(format!("{}_drift_landscape.csv", cfg.name));
    write_rows(&path, &compute_drift_landscape(cfg))?;
    report.files.push(path);
    sweep_metrics(&traces, &mut report)?;
    finish(cfg, report)
}

#[derive(Serialize)]
struct CountPanel {
    tau_ns: f64,
    count: f64,
}

#[derive(Serialize)]
struct OverhauserPanel {
    tau_ns: f64,
    overhauser_ghz: f64,
}

#[derive(Serialize)]
struct EfficiencyPanel {
    tau_ns: f64,
    efficiency: f64,
}

/// Delay sweeps; per direction the full trace and the count, Overhauser
/// shift and pumping-efficiency panels.
pub fn run_two_pulse_fid(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    let traces = compute_sweeps(cfg)?;
    let dir_path = output_dir(cfg)?.to_path_buf();
    let p = &cfg.model;
    let mut report = RunReport::default();
    for (dir, t) in &traces {
        write_trace(cfg, *dir, t, &mut report)?;
        let stem = format!("{}_{}", cfg.name, dir.as_str());
        let rows = t.ascending();
        let count: Vec<_> = rows
            .iter()
            .map(|r| CountPanel { tau_ns: r.scan_value, count: r.count })
            .collect();
        let overhauser: Vec<_> = rows
            .iter()
            .map(|r| OverhauserPanel {
                tau_ns: r.scan_value,
                overhauser_ghz: rad_per_ns_to_ghz(r.omega_f),
            })
            .collect();
        let efficiency: Vec<_> = rows
            .iter()
            .map(|r| EfficiencyPanel {
                tau_ns: r.scan_value,
                efficiency: if p.beta0 > 0.0 {
                    cfg.sequence.at(r.scan_value).pump_rate(r.omega_f, p) / p.beta0
                } else {
                    0.0
                },
            })
            .collect();
        let paths = [
            dir_path.join(format!("{stem}_count.csv")),
            dir_path.join(format!("{stem}_overhauser.csv")),
            dir_path.join(format!("{stem}_efficiency.csv")),
        ];
        write_rows(&paths[0], &count)?;
        write_rows(&paths[1], &overhauser)?;
        write_rows(&paths[2], &efficiency)?;
        report.files.extend(paths);
    }
    sweep_metrics(&traces, &mut report)?;
    finish(cfg, report)
}

pub fn compute_fixed_point_atlas(cfg: &ExperimentConfig) -> Vec<AtlasEntry> {
    let values = cfg.sequence.scan.values();
    fixed_point_atlas(&cfg.sequence, &cfg.model, &values, None, cfg.grid.n_scan)
}

#[derive(Serialize)]
struct AtlasRow {
    scan_value: f64,
    omega_rad_per_ns: f64,
    stability: &'static str,
    drift_slope_per_ns: f64,
    n_stable: usize,
}

/// Every fixed point with its stability at each scan value.
pub fn run_fixed_point_atlas(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    let atlas = compute_fixed_point_atlas(cfg);
    let rows: Vec<AtlasRow> = atlas
        .iter()
        .flat_map(|e| {
            let n_stable = e.fixed_points.stable_count();
            e.fixed_points.points.iter().map(move |fp| AtlasRow {
                scan_value: e.scan_value,
                omega_rad_per_ns: fp.omega,
                stability: fp.stability.as_str(),
                drift_slope_per_ns: fp.drift_slope,
                n_stable,
            })
        })
        .collect();
    let path = output_dir(cfg)?.join(format!("{}_points.csv", cfg.name));
    write_rows(&path, &rows)?;
    let mut report = RunReport {
        files: vec![path],
        ..RunReport::default()
    };
    let width = bistable_window_width(&atlas);
    let max_stable = atlas.iter().map(|e| e.fixed_points.stable_count()).max().unwrap_or(0);
    info!("{}: bistable window {width}, up to {max_stable} stable branches", cfg.name);
    report.metrics.insert("bistable_window_width".into(), width);
    report.metrics.insert("max_stable_branches".into(), max_stable as f64);
    finish(cfg, report)
}
