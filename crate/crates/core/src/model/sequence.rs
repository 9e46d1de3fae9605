use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// Optical pumping with a single π pulse; scan is the laser detuning.
    OnePulse,
    /// Ramsey / free induction decay; scan is the π/2–π/2 delay τ.
    TwoPulse,
    /// Hahn echo; scan is the π-pulse offset τ.
    ThreePulse,
}

impl SequenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::OnePulse => "one_pulse",
            SequenceKind::TwoPulse => "two_pulse",
            SequenceKind::ThreePulse => "three_pulse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one_pulse" => Some(SequenceKind::OnePulse),
            "two_pulse" => Some(SequenceKind::TwoPulse),
            "three_pulse" => Some(SequenceKind::ThreePulse),
            _ => None,
        }
    }

    /// Whether the scan variable is a delay (ns) rather than a detuning (rad/ns).
    pub fn scans_delay(self) -> bool {
        !matches!(self, SequenceKind::OnePulse)
    }
}

/// A sequence with its scan variable pinned to one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSequence {
    OnePulse { laser_detuning: f64 },
    TwoPulse { tau: f64 },
    ThreePulse { tau: f64, echo_half_period: f64 },
}

impl PulseSequence {
    pub fn kind(&self) -> SequenceKind {
        match self {
            PulseSequence::OnePulse { .. } => SequenceKind::OnePulse,
            PulseSequence::TwoPulse { .. } => SequenceKind::TwoPulse,
            PulseSequence::ThreePulse { .. } => SequenceKind::ThreePulse,
        }
    }

    pub fn scan_value(&self) -> f64 {
        match *self {
            PulseSequence::OnePulse { laser_detuning } => laser_detuning,
            PulseSequence::TwoPulse { tau } | PulseSequence::ThreePulse { tau, .. } => tau,
        }
    }
}

/// Inclusive scan range; values are produced by `ScanRange::values`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ScanRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        ScanRange { start, stop, step }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(ModelError::invalid("scan", "scan bounds must be finite"));
        }
        if self.start > self.stop {
            return Err(ModelError::invalid("scan", "scan_start must not exceed scan_stop"));
        }
        if self.step <= 0.0 {
            return Err(ModelError::invalid("scan_step", "must be > 0"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.intervals() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn intervals(&self) -> usize {
        ((self.stop - self.start) / self.step).round().max(0.0) as usize
    }

    /// Ascending values; both endpoints are hit exactly and the spacing is
    /// the nearest to `step` that divides the range evenly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.intervals();
        if n == 0 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.stop
                } else {
                    self.start + span * (k as f64) / (n as f64)
                }
            })
            .collect()
    }
}

/// Which sequence is run and how its scan variable is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    /// Detuning δ_L in rad/ns for one-pulse, delay τ in ns otherwise.
    pub scan: ScanRange,
    /// Echo half period T in ns; only meaningful for the three-pulse sequence.
    pub echo_half_period: f64,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind, scan: ScanRange) -> Self {
        SequenceSpec {
            kind,
            scan,
            echo_half_period: crate::units::REPETITION_PERIOD_NS,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.scan.validate()?;
        if self.kind.scans_delay() && self.scan.start < 0.0 {
            return Err(ModelError::invalid("scan_start", "delay tau must be >= 0"));
        }
        if self.kind == SequenceKind::ThreePulse && !(self.echo_half_period > 0.0) {
            return Err(ModelError::invalid("echo_half_period", "must be > 0"));
        }
        Ok(())
    }

    pub fn at(&self, scan_value: f64) -> PulseSequence {
        match self.kind {
            SequenceKind::OnePulse => PulseSequence::OnePulse {
                laser_detuning: scan_value,
            },
            SequenceKind::TwoPulse => PulseSequence::TwoPulse { tau: scan_value },
            SequenceKind::ThreePulse => PulseSequence::ThreePulse {
                tau: scan_value,
                echo_half_period: self.echo_half_period,
            },
        }
    }
}
