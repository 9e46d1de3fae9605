use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentConfig, ExperimentError, GridSettings, SweepSettings};
use crate::model::{ModelParams, SequenceSpec};

/// Files written by a run plus scalar summaries echoed into the meta JSON.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub metrics: BTreeMap<String, f64>,
}

pub(crate) fn output_dir(cfg: &ExperimentConfig) -> Result<&Path, ExperimentError> {
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir)
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>, ExperimentError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub(crate) fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

#[derive(Serialize)]
struct OutputEcho {
    heatmap_tau_stride: usize,
    heatmap_omega_stride: usize,
    landscape_curves: usize,
}

#[derive(Serialize)]
struct Meta<'a> {
    experiment: &'a str,
    version: &'a str,
    units: BTreeMap<&'a str, &'a str>,
    model: &'a ModelParams,
    sequence: &'a SequenceSpec,
    scan_unit: &'a str,
    sweep: &'a SweepSettings,
    grid: &'a GridSettings,
    output: OutputEcho,
    files: Vec<String>,
    metrics: &'a BTreeMap<String, f64>,
}

/// Writes `<name>_meta.json` and appends it to the report. File names are
/// stored relative to the output directory so identical configs produce
/// identical bytes wherever they run.
pub(crate) fn finish(cfg: &ExperimentConfig, mut report: RunReport) -> Result<RunReport, ExperimentError> {
    let dir = output_dir(cfg)?;
    let path = dir.join(format!("{}_meta.json", cfg.name));
    let units = BTreeMap::from([
        ("frequency", "rad/ns (GHz values are multiplied by 2π)"),
        ("time", "ns"),
        ("kappa", "1/ns"),
        ("diffusion", "rad^2/ns^3"),
        ("alpha", "rad^2/ns^3 per unit count"),
        ("count", "trions per repetition cycle"),
        ("density", "1/(rad/ns)"),
    ]);
    let files = report
        .files
        .iter()
        .map(|f| {
            f.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    let meta = Meta {
        experiment: cfg.name.as_str(),
        version: env!("CARGO_PKG_VERSION"),
        units,
        model: &cfg.model,
        sequence: &cfg.sequence,
        scan_unit: if cfg.sequence.kind.scans_delay() { "ns" } else { "rad/ns" },
        sweep: &cfg.sweep,
        grid: &cfg.grid,
        output: OutputEcho {
            heatmap_tau_stride: cfg.output.heatmap_tau_stride,
            heatmap_omega_stride: cfg.output.heatmap_omega_stride,
            landscape_curves: cfg.output.landscape_curves,
        },
        files,
        metrics: &report.metrics,
    };
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &meta)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|source| ExperimentError::Io {
            path: path.clone(),
            source,
        })?;
    report.files.push(path);
    Ok(report)
}
