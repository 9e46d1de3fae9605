//! Named, parameterized runs that wire the model, the density solver and the
//! mean-field layer into CSV and JSON outputs.
//!
//! Every run is a pure function of its [`ExperimentConfig`]; reruns with the
//! same configuration write byte-identical files.

mod consistency;
mod echo;
mod output;
mod sweeps;

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::fokker_planck::{PdeError, MIN_CELLS};
use crate::mean_field::{MeanFieldError, RelaxOptions, DEFAULT_SCAN_POINTS};
use crate::model::{ModelError, ModelParams, ScanRange, SequenceKind, SequenceSpec};
use crate::units::ghz_to_rad_per_ns;

pub use consistency::{fid_pde_consistency, ConsistencyRow};
pub use echo::{compute_three_pulse_echo, run_three_pulse_echo, EchoColumn, EchoResult};
pub use output::RunReport;
pub use sweeps::{
    compute_drift_landscape, compute_fixed_point_atlas, compute_sweeps, run_fixed_point_atlas,
    run_one_pulse_hysteresis, run_two_pulse_fid, LandscapeRow,
};

/// Echo grids default to this many cells; the closed form is cheap and the
/// densities are sharply peaked.
pub const ECHO_DEFAULT_CELLS: usize = 8192;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl ExperimentError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ExperimentError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the configuration rather than by the run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            ExperimentError::Config { .. } | ExperimentError::Model(ModelError::InvalidParameter { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    OnePulseHysteresis,
    TwoPulseFid,
    ThreePulseEcho,
    FixedPointAtlas,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 4] = [
        ExperimentName::OnePulseHysteresis,
        ExperimentName::TwoPulseFid,
        ExperimentName::ThreePulseEcho,
        ExperimentName::FixedPointAtlas,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::OnePulseHysteresis => "one_pulse_hysteresis",
            ExperimentName::TwoPulseFid => "two_pulse_fid",
            ExperimentName::ThreePulseEcho => "three_pulse_echo",
            ExperimentName::FixedPointAtlas => "fixed_point_atlas",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.as_str() == s)
    }

    /// Sequence kind the run needs; `None` accepts any.
    pub fn required_kind(self) -> Option<SequenceKind> {
        match self {
            ExperimentName::OnePulseHysteresis => Some(SequenceKind::OnePulse),
            ExperimentName::TwoPulseFid => Some(SequenceKind::TwoPulse),
            ExperimentName::ThreePulseEcho => Some(SequenceKind::ThreePulse),
            ExperimentName::FixedPointAtlas => None,
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    /// Up, then down starting from where the up-scan ended.
    Both,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Direction::Up),
            "down" => Some(Direction::Down),
            "both" => Some(Direction::Both),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSettings {
    pub direction: Direction,
    /// Starting mean field of the first scan, rad/ns.
    pub omega_init: f64,
    /// Reduced-drift tolerance for each quasi-equilibrium, rad/ns.
    pub tol: f64,
}

impl SweepSettings {
    pub fn relax_options(&self) -> RelaxOptions {
        RelaxOptions {
            tol: self.tol,
            ..RelaxOptions::default()
        }
    }
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            direction: Direction::Both,
            omega_init: 0.0,
            tol: RelaxOptions::default().tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSettings {
    /// Cells of the Ω grid used by density runs.
    pub n_cells: Option<usize>,
    /// Half-width of the Ω grid, rad/ns.
    pub omega_max: Option<f64>,
    /// Sample count of the fixed-point root scan.
    pub n_scan: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            n_cells: None,
            omega_max: None,
            n_scan: DEFAULT_SCAN_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub heatmap_tau_stride: usize,
    pub heatmap_omega_stride: usize,
    /// Number of detunings in the drift-landscape CSV.
    pub landscape_curves: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            dir: PathBuf::from("out"),
            heatmap_tau_stride: 1,
            heatmap_omega_stride: 1,
            landscape_curves: 5,
        }
    }
}

/// Fully resolved run description in internal units (ns, rad/ns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub model: ModelParams,
    pub sequence: SequenceSpec,
    pub sweep: SweepSettings,
    pub grid: GridSettings,
    pub output: OutputSettings,
}

impl ExperimentConfig {
    /// Bundled parameter set for each named run.
    pub fn preset(name: ExperimentName) -> Self {
        let base = ModelParams::default();
        let one_pulse_model = ModelParams {
            sigma: ghz_to_rad_per_ns(0.5),
            ..base
        }
        .with_alpha_over_kappa(1.0 / 0.03);
        let one_pulse_scan = {
            let edge = 4.0 * one_pulse_model.sigma;
            ScanRange::new(-edge, edge, ghz_to_rad_per_ns(0.002))
        };
        let (model, sequence, output) = match name {
            ExperimentName::OnePulseHysteresis => (
                one_pulse_model,
                SequenceSpec::new(SequenceKind::OnePulse, one_pulse_scan),
                OutputSettings::default(),
            ),
            ExperimentName::TwoPulseFid => (
                base,
                SequenceSpec::new(SequenceKind::TwoPulse, ScanRange::new(0.0, 0.3, 0.0005)),
                OutputSettings::default(),
            ),
            ExperimentName::ThreePulseEcho => (
                ModelParams {
                    beta0: 0.1 / base.t_pump,
                    ..base
                }
                .with_diffusion_over_kappa(0.3)
                .with_alpha_over_kappa(1e3),
                SequenceSpec::new(SequenceKind::ThreePulse, ScanRange::new(0.0, 1.5, 0.0005)),
                OutputSettings {
                    heatmap_tau_stride: 10,
                    heatmap_omega_stride: 16,
                    ..OutputSettings::default()
                },
            ),
            ExperimentName::FixedPointAtlas => (
                one_pulse_model,
                SequenceSpec::new(
                    SequenceKind::OnePulse,
                    ScanRange::new(one_pulse_scan.start, one_pulse_scan.stop, ghz_to_rad_per_ns(0.005)),
                ),
                OutputSettings::default(),
            ),
        };
        let grid = GridSettings {
            n_cells: (name == ExperimentName::ThreePulseEcho).then_some(ECHO_DEFAULT_CELLS),
            ..GridSettings::default()
        };
        ExperimentConfig {
            name,
            model,
            sequence,
            sweep: SweepSettings::default(),
            grid,
            output,
        }
    }

    /// Checks every invariant; errors name the offending field.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.model.validate()?;
        self.sequence.validate()?;
        if let Some(kind) = self.name.required_kind() {
            if kind != self.sequence.kind {
                return Err(ExperimentError::config(
                    "sequence.kind",
                    format!("{} needs {}, got {}", self.name, kind.as_str(), self.sequence.kind.as_str()),
                ));
            }
        }
        if self.sequence.kind.scans_delay() && self.sequence.scan.start < 0.0 {
            return Err(ExperimentError::config("sequence.scan_start", "delays must be >= 0"));
        }
        if !(self.sweep.tol > 0.0 && self.sweep.tol.is_finite()) {
            return Err(ExperimentError::config("sweep.tol", "must be a positive finite number"));
        }
        if !self.sweep.omega_init.is_finite() {
            return Err(ExperimentError::config("sweep.omega_init", "must be finite"));
        }
        if let Some(n) = self.grid.n_cells {
            if n < MIN_CELLS {
                return Err(ExperimentError::config(
                    "grid.n_cells",
                    format!("must be >= {}", MIN_CELLS),
                ));
            }
        }
        if let Some(w) = self.grid.omega_max {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ExperimentError::config("grid.omega_max", "must be > 0"));
            }
        }
        if self.grid.n_scan < 2 {
            return Err(ExperimentError::config("grid.n_scan", "must be >= 2"));
        }
        if self.output.dir.as_os_str().is_empty() {
            return Err(ExperimentError::config("output.dir", "must not be empty"));
        }
        for (field, v) in [
            ("output.heatmap_tau_stride", self.output.heatmap_tau_stride),
            ("output.heatmap_omega_stride", self.output.heatmap_omega_stride),
        ] {
            if v == 0 {
                return Err(ExperimentError::config(field, "must be >= 1"));
            }
        }
        if self.output.landscape_curves == 0 {
            return Err(ExperimentError::config("output.landscape_curves", "must be >= 1"));
        }
        Ok(())
    }
}

/// Validates `cfg` and runs the experiment it names.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    match cfg.name {
        ExperimentName::OnePulseHysteresis => run_one_pulse_hysteresis(cfg),
        ExperimentName::TwoPulseFid => run_two_pulse_fid(cfg),
        ExperimentName::ThreePulseEcho => run_three_pulse_echo(cfg),
        ExperimentName::FixedPointAtlas => run_fixed_point_atlas(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in ExperimentName::ALL {
            let cfg = ExperimentConfig::preset(name);
            cfg.validate().unwrap();
            assert_eq!(cfg.name, name);
            assert_eq!(ExperimentName::parse(name.as_str()), Some(name));
        }
    }

    #[test]
    fn preset_ratios() {
        let fid = ExperimentConfig::preset(ExperimentName::TwoPulseFid).model;
        assert!((1.0 / fid.alpha_over_kappa() * 1e6 - 1e4).abs() < 1e-6);
        let one = ExperimentConfig::preset(ExperimentName::OnePulseHysteresis).model;
        assert!((1.0 / one.alpha_over_kappa() * 1e6 - 3e4).abs() < 1e-6);
        let echo = ExperimentConfig::preset(ExperimentName::ThreePulseEcho).model;
        assert!((echo.diffusion_over_kappa() - 0.3).abs() < 1e-12);
        assert!((echo.beta0 * echo.t_pump - 0.1).abs() < 1e-12);
    }

    #[test]
    fn kind_mismatch_names_field() {
        let mut cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
        cfg.sequence.kind = SequenceKind::OnePulse;
        match cfg.validate() {
            Err(ExperimentError::Config { field, .. }) => assert_eq!(field, "sequence.kind"),
            other => panic!("{other:?}"),
        }
        let mut atlas = ExperimentConfig::preset(ExperimentName::FixedPointAtlas);
        atlas.sequence.kind = SequenceKind::TwoPulse;
        atlas.sequence.scan = ScanRange::new(0.0, 0.1, 0.01);
        atlas.validate().unwrap();
    }

    #[test]
    fn invariant_violation_is_config_error() {
        let mut cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
        cfg.model.kappa = 0.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("kappa"));
    }
}
