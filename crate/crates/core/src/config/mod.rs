//! TOML configuration with explicit units.
//!
//! ```toml
//! experiment = "two_pulse_fid"
//!
//! [model]
//! larmor = "25.3 GHz"
//! sigma = "1.6 GHz"
//! kappa = "1e-8 ns^-1"
//! kappa_over_alpha = "1e4 ps^2"
//! beta0_t_pump = 3
//!
//! [sequence]
//! kind = "two_pulse"
//! scan_start = "0 ps"
//! scan_stop = "300 ps"
//! scan_step = "1 ps"
//! ```
//!
//! Every section and key is optional; missing values come from the preset of
//! the chosen experiment. When κ changes but α, D or β₀ are not given, the
//! preset ratios α/κ, D/κ and β₀T_p are kept.

pub mod units;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;
use toml::{Table, Value};

use crate::experiments::{Direction, ExperimentConfig, ExperimentError, ExperimentName};
use crate::model::SequenceKind;
use units::parse_quantity;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Syntax { origin: String, message: String },
    #[error("invalid `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error(transparent)]
    Invalid(#[from] ExperimentError),
}

fn field_err(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        reason: reason.into(),
    }
}

const SECTIONS: [(&str, &[&str]); 5] = [
    (
        "model",
        &[
            "larmor",
            "sigma",
            "kappa",
            "diffusion",
            "d_over_kappa",
            "alpha",
            "alpha_over_kappa",
            "kappa_over_alpha",
            "beta0",
            "beta0_t_pump",
            "s_pump",
            "t_pump",
            "phi0",
        ],
    ),
    (
        "sequence",
        &["kind", "scan_start", "scan_stop", "scan_step", "echo_half_period"],
    ),
    ("sweep", &["direction", "omega_init", "tol"]),
    ("grid", &["n_cells", "omega_max", "n_scan"]),
    (
        "output",
        &["dir", "heatmap_tau_stride", "heatmap_omega_stride", "landscape_curves"],
    ),
];

/// Keys that set the same parameter; at most one per group may appear.
const EXCLUSIVE: [&[&str]; 3] = [
    &["diffusion", "d_over_kappa"],
    &["alpha", "alpha_over_kappa", "kappa_over_alpha"],
    &["beta0", "beta0_t_pump"],
];

/// Raw configuration document, before resolution against a preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDoc {
    table: Table,
}

impl ConfigDoc {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
            origin: origin.to_string(),
            message: e.message().to_string(),
        })?;
        let doc = ConfigDoc { table };
        doc.check_keys()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn check_keys(&self) -> Result<(), ConfigError> {
        for (key, value) in &self.table {
            if key == "experiment" {
                if !value.is_str() {
                    return Err(field_err("experiment", "must be a string"));
                }
                continue;
            }
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == key) else {
                return Err(field_err(key, "unknown key"));
            };
            let Value::Table(section) = value else {
                return Err(field_err(key, "must be a table"));
            };
            for k in section.keys() {
                if !keys.contains(&k.as_str()) {
                    return Err(field_err(&format!("{key}.{k}"), "unknown key"));
                }
            }
            for group in EXCLUSIVE {
                let present: Vec<&str> = group.iter().copied().filter(|g| section.contains_key(*g)).collect();
                if present.len() > 1 {
                    return Err(field_err(
                        &format!("{key}.{}", present[1]),
                        format!("conflicts with `{key}.{}`", present[0]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Experiment named in the document, if any.
    pub fn experiment(&self) -> Result<Option<ExperimentName>, ConfigError> {
        match self.table.get("experiment").and_then(Value::as_str) {
            None => Ok(None),
            Some(s) => ExperimentName::parse(s)
                .map(Some)
                .ok_or_else(|| field_err("experiment", format!("unknown experiment `{s}`"))),
        }
    }

    pub fn set_experiment(&mut self, name: ExperimentName) {
        self.table
            .insert("experiment".into(), Value::String(name.as_str().into()));
    }

    /// Applies `key=value`. The key is `section.key` or a bare key that is
    /// unique across sections. The value is read as a TOML value when it
    /// parses as one and as a plain string otherwise.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| field_err(assignment, "override must look like key=value"))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = toml::from_str::<Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        if key == "experiment" {
            self.table.insert(key.into(), value);
            return self.check_keys();
        }
        let (section, name) = match key.split_once('.') {
            Some((s, k)) => (s.to_string(), k.to_string()),
            None => {
                let owner = SECTIONS
                    .iter()
                    .find(|(_, keys)| keys.contains(&key))
                    .ok_or_else(|| field_err(key, "unknown key"))?;
                (owner.0.to_string(), key.to_string())
            }
        };
        let known = SECTIONS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, keys)| keys.contains(&name.as_str()))
            .unwrap_or(false);
        if !known {
            return Err(field_err(key, "unknown key"));
        }
        let entry = self
            .table
            .entry(section.clone())
            .or_insert_with(|| Value::Table(Table::new()));
        let Value::Table(t) = entry else {
            return Err(field_err(&section, "must be a table"));
        };
        if let Some(group) = EXCLUSIVE.iter().find(|g| g.contains(&name.as_str())) {
            for other in group.iter() {
                t.remove(*other);
            }
        }
        t.insert(name, value);
        self.check_keys()
    }

    /// Layers the document over the preset of its experiment, or of
    /// `fallback` when it names none, and validates the result.
    pub fn resolve(&self, fallback: ExperimentName) -> Result<ExperimentConfig, ConfigError> {
        let name = self.experiment()?.unwrap_or(fallback);
        let mut cfg = ExperimentConfig::preset(name);
        let empty = Table::new();
        let section = |s: &str| match self.table.get(s) {
            Some(Value::Table(t)) => t,
            _ => &empty,
        };

        let m = Section::new("model", section("model"));
        let preset = cfg.model;
        let p = &mut cfg.model;
        if let Some(v) = m.quantity("larmor", Dim::AngularFrequency)? {
            p.delta_e = v;
        }
        if let Some(v) = m.quantity("sigma", Dim::AngularFrequency)? {
            p.sigma = v;
        }
        if let Some(v) = m.quantity("kappa", Dim::Rate)? {
            p.kappa = v;
        }
        if let Some(v) = m.quantity("t_pump", Dim::Time)? {
            p.t_pump = v;
        }
        if let Some(v) = m.number("s_pump")? {
            p.s_pump = v;
        }
        if let Some(v) = m.quantity("phi0", Dim::Angle)? {
            p.phi0 = v;
        }
        p.diffusion = if let Some(v) = m.quantity("diffusion", Dim::Diffusion)? {
            v
        } else if let Some(r) = m.quantity("d_over_kappa", Dim::AngularFrequencySquared)? {
            r * p.kappa
        } else {
            preset.diffusion_over_kappa() * p.kappa
        };
        p.alpha = if let Some(v) = m.quantity("alpha", Dim::Diffusion)? {
            v
        } else if let Some(r) = m.quantity("alpha_over_kappa", Dim::AngularFrequencySquared)? {
            r * p.kappa
        } else if let Some(r) = m.quantity("kappa_over_alpha", Dim::TimeSquared)? {
            if r == 0.0 {
                return Err(field_err("model.kappa_over_alpha", "must be > 0"));
            }
            p.kappa / r
        } else {
            preset.alpha_over_kappa() * p.kappa
        };
        p.beta0 = if let Some(v) = m.quantity("beta0", Dim::Rate)? {
            v
        } else if let Some(r) = m.number("beta0_t_pump")? {
            r / p.t_pump
        } else {
            preset.beta0 * preset.t_pump / p.t_pump
        };

        let s = Section::new("sequence", section("sequence"));
        if let Some(kind) = s.string("kind")? {
            cfg.sequence.kind = SequenceKind::parse(&kind)
                .ok_or_else(|| field_err("sequence.kind", format!("unknown kind `{kind}`")))?;
        }
        let scan_dim = if cfg.sequence.kind.scans_delay() {
            Dim::Time
        } else {
            Dim::AngularFrequency
        };
        if let Some(v) = s.quantity("scan_start", scan_dim)? {
            cfg.sequence.scan.start = v;
        }
        if let Some(v) = s.quantity("scan_stop", scan_dim)? {
            cfg.sequence.scan.stop = v;
        }
        if let Some(v) = s.quantity("scan_step", scan_dim)? {
            cfg.sequence.scan.step = v;
        }
        if let Some(v) = s.quantity("echo_half_period", Dim::Time)? {
            cfg.sequence.echo_half_period = v;
        }

        let w = Section::new("sweep", section("sweep"));
        if let Some(d) = w.string("direction")? {
            cfg.sweep.direction = Direction::parse(&d)
                .ok_or_else(|| field_err("sweep.direction", format!("expected up, down or both, got `{d}`")))?;
        }
        if let Some(v) = w.quantity("omega_init", Dim::AngularFrequency)? {
            cfg.sweep.omega_init = v;
        }
        if let Some(v) = w.quantity("tol", Dim::AngularFrequency)? {
            cfg.sweep.tol = v;
        }

        let g = Section::new("grid", section("grid"));
        if let Some(n) = g.count("n_cells")? {
            cfg.grid.n_cells = Some(n);
        }
        if let Some(v) = g.quantity("omega_max", Dim::AngularFrequency)? {
            cfg.grid.omega_max = Some(v);
        }
        if let Some(n) = g.count("n_scan")? {
            cfg.grid.n_scan = n;
        }

        let o = Section::new("output", section("output"));
        if let Some(dir) = o.string("dir")? {
            cfg.output.dir = PathBuf::from(dir);
        }
        if let Some(n) = o.count("heatmap_tau_stride")? {
            cfg.output.heatmap_tau_stride = n;
        }
        if let Some(n) = o.count("heatmap_omega_stride")? {
            cfg.output.heatmap_omega_stride = n;
        }
        if let Some(n) = o.count("landscape_curves")? {
            cfg.output.landscape_curves = n;
        }

        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Angle,
    Time,
    TimeSquared,
    /// Hertz allowed, converted to rad/ns.
    AngularFrequency,
    /// Inverse time; hertz is rejected because a rate is not a phase velocity.
    Rate,
    AngularFrequencySquared,
    Diffusion,
}

impl Dim {
    fn time_dim(self) -> i32 {
        match self {
            Dim::Angle => 0,
            Dim::Time => 1,
            Dim::TimeSquared => 2,
            Dim::AngularFrequency | Dim::Rate => -1,
            Dim::AngularFrequencySquared => -2,
            Dim::Diffusion => -3,
        }
    }

    fn example(self) -> &'static str {
        match self {
            Dim::Angle => "\"0.5 rad\"",
            Dim::Time => "\"26 ns\" or \"300 ps\"",
            Dim::TimeSquared => "\"1e4 ps^2\"",
            Dim::AngularFrequency => "\"1.6 GHz\" or \"10 rad/ns\"",
            Dim::Rate => "\"1e-8 ns^-1\" or \"10 s^-1\"",
            Dim::AngularFrequencySquared => "\"0.3 ns^-2\"",
            Dim::Diffusion => "\"3e-9 rad^2/ns^3\"",
        }
    }
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: &'a Table) -> Self {
        Section { name, table }
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn quantity(&self, key: &str, dim: Dim) -> Result<Option<f64>, ConfigError> {
        let field = self.field(key);
        let Some(value) = self.table.get(key) else {
            return Ok(None);
        };
        let bare = match value {
            Value::Integer(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::String(_) => None,
            _ => return Err(field_err(&field, format!("expected a quantity such as {}", dim.example()))),
        };
        if let Some(x) = bare {
            if dim.time_dim() == 0 || x == 0.0 {
                return Ok(Some(x));
            }
            return Err(field_err(&field, format!("missing unit, write e.g. {}", dim.example())));
        }
        let text = value.as_str().unwrap_or_default();
        let q = parse_quantity(text).map_err(|e| field_err(&field, e))?;
        if !q.has_unit {
            if dim.time_dim() == 0 || q.value == 0.0 {
                return Ok(Some(q.value));
            }
            return Err(field_err(&field, format!("missing unit, write e.g. {}", dim.example())));
        }
        if q.time_dim != dim.time_dim() {
            return Err(field_err(
                &field,
                format!("unit mismatch in `{text}`, expected e.g. {}", dim.example()),
            ));
        }
        if dim == Dim::Rate && q.uses_hertz {
            return Err(field_err(&field, format!("rates take inverse time, e.g. {}", dim.example())));
        }
        Ok(Some(q.value))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.quantity(key, Dim::Angle)
    }

    fn string(&self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(field_err(&self.field(key), "must be a string")),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(field_err(&self.field(key), "must be a non-negative integer")),
        }
    }
}

/// Loads `path` (if any), applies overrides and resolves against the preset
/// of `fallback` unless the document names another experiment.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[String],
    fallback: ExperimentName,
) -> Result<ExperimentConfig, ConfigError> {
    let mut doc = match path {
        Some(p) => ConfigDoc::load(p)?,
        None => ConfigDoc::default(),
    };
    for o in overrides {
        doc.apply_override(o)?;
    }
    doc.resolve(fallback)
}

fn quoted(value: f64, unit: &str) -> String {
    format!("\"{value:?} {unit}\"")
}

/// Resolved configuration as TOML in internal units; reading it back gives
/// the same [`ExperimentConfig`].
pub fn to_toml(cfg: &ExperimentConfig) -> String {
    let p = &cfg.model;
    let scan_unit = if cfg.sequence.kind.scans_delay() { "ns" } else { "rad/ns" };
    let mut out = String::new();
    let _ = writeln!(out, "experiment = \"{}\"\n", cfg.name);
    let _ = writeln!(out, "[model]");
    let _ = writeln!(out, "larmor = {}", quoted(p.delta_e, "rad/ns"));
    let _ = writeln!(out, "sigma = {}", quoted(p.sigma, "rad/ns"));
    let _ = writeln!(out, "kappa = {}", quoted(p.kappa, "ns^-1"));
    let _ = writeln!(out, "diffusion = {}", quoted(p.diffusion, "rad^2/ns^3"));
    let _ = writeln!(out, "alpha = {}", quoted(p.alpha, "rad^2/ns^3"));
    let _ = writeln!(out, "beta0 = {}", quoted(p.beta0, "ns^-1"));
    let _ = writeln!(out, "s_pump = {:?}", p.s_pump);
    let _ = writeln!(out, "t_pump = {}", quoted(p.t_pump, "ns"));
    let _ = writeln!(out, "phi0 = {}", quoted(p.phi0, "rad"));
    let s = &cfg.sequence;
    let _ = writeln!(out, "\n[sequence]");
    let _ = writeln!(out, "kind = \"{}\"", s.kind.as_str());
    let _ = writeln!(out, "scan_start = {}", quoted(s.scan.start, scan_unit));
    let _ = writeln!(out, "scan_stop = {}", quoted(s.scan.stop, scan_unit));
    let _ = writeln!(out, "scan_step = {}", quoted(s.scan.step, scan_unit));
    let _ = writeln!(out, "echo_half_period = {}", quoted(s.echo_half_period, "ns"));
    let _ = writeln!(out, "\n[sweep]");
    let _ = writeln!(out, "direction = \"{}\"", cfg.sweep.direction.as_str());
    let _ = writeln!(out, "omega_init = {}", quoted(cfg.sweep.omega_init, "rad/ns"));
    let _ = writeln!(out, "tol = {}", quoted(cfg.sweep.tol, "rad/ns"));
    let _ = writeln!(out, "\n[grid]");
    if let Some(n) = cfg.grid.n_cells {
        let _ = writeln!(out, "n_cells = {n}");
    }
    if let Some(w) = cfg.grid.omega_max {
        let _ = writeln!(out, "omega_max = {}", quoted(w, "rad/ns"));
    }
    let _ = writeln!(out, "n_scan = {}", cfg.grid.n_scan);
    let o = &cfg.output;
    let _ = writeln!(out, "\n[output]");
    let _ = writeln!(out, "dir = {}", Value::String(o.dir.display().to_string()));
    let _ = writeln!(out, "heatmap_tau_stride = {}", o.heatmap_tau_stride);
    let _ = writeln!(out, "heatmap_omega_stride = {}", o.heatmap_omega_stride);
    let _ = writeln!(out, "landscape_curves = {}", o.landscape_curves);
    out
}
