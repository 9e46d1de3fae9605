use std::path::Path;

use serde::Serialize;

use super::{relax_with, MeanFieldError, RelaxOptions};
use crate::model::{ModelParams, SequenceSpec};

/// Neighbour changes larger than this multiple of the median are flagged.
const JUMP_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub scan_value: f64,
    #[serde(rename = "omega_f_rad_per_ns")]
    pub omega_f: f64,
    pub count: f64,
    pub jumped: bool,
}

/// Quasi-equilibria visited along a directional scan, in scan order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTrace {
    pub records: Vec<SweepRecord>,
}

impl SweepTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn scan_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.scan_value).collect()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.count).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.omega_f).collect()
    }

    pub fn last_omega(&self) -> Option<f64> {
        self.records.last().map(|r| r.omega_f)
    }

    /// Records sorted by ascending scan value.
    pub fn ascending(&self) -> Vec<SweepRecord> {
        let mut r = self.records.clone();
        if r.len() > 1 && r[0].scan_value > r[r.len() - 1].scan_value {
            r.reverse();
        }
        r
    }

    /// Columns: scan_value, omega_f_rad_per_ns, count, jumped.
    pub fn write_csv(&self, path: &Path) -> Result<(), MeanFieldError> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.records {
            w.serialize(r)?;
        }
        if self.records.is_empty() {
            w.write_record(["scan_value", "omega_f_rad_per_ns", "count", "jumped"])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn check_monotone(values: &[f64]) -> Result<(), MeanFieldError> {
    if values.len() < 2 {
        return Ok(());
    }
    let up = values[1] > values[0];
    for (i, w) in values.windows(2).enumerate() {
        let ok = if up { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(MeanFieldError::NotMonotone { index: i + 1 });
        }
    }
    Ok(())
}

/// Continuation sweep: each point relaxes from the previous quasi-equilibrium,
/// the first from `omega_init`.
pub fn sweep(
    scan_values: &[f64],
    spec: &SequenceSpec,
    p: &ModelParams,
    omega_init: f64,
    opts: RelaxOptions,
) -> Result<SweepTrace, MeanFieldError> {
    if scan_values.is_empty() {
        return Err(MeanFieldError::EmptyScan);
    }
    check_monotone(scan_values)?;
    let mut records = Vec::with_capacity(scan_values.len());
    let mut omega = omega_init;
    for (index, &v) in scan_values.iter().enumerate() {
        let seq = spec.at(v);
        omega = relax_with(omega, &seq, p, opts).map_err(|e| MeanFieldError::SweepFailed {
            index,
            scan_value: v,
            source: Box::new(e),
        })?;
        records.push(SweepRecord {
            scan_value: v,
            omega_f: omega,
            count: seq.count(omega, p),
            jumped: false,
        });
    }
    flag_jumps(&mut records, opts.tol);
    Ok(SweepTrace { records })
}

/// A step is a jump when it is large against the median step and against
/// both neighbouring steps; the square-root steepening before a saddle-node
/// stays unflagged.
fn flag_jumps(records: &mut [SweepRecord], tol: f64) {
    if records.len() < 2 {
        return;
    }
    let deltas: Vec<f64> = records
        .windows(2)
        .map(|w| (w[1].omega_f - w[0].omega_f).abs())
        .collect();
    let mut sorted = deltas.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let floor = (JUMP_FACTOR * median).max(10.0 * tol);
    for (i, &d) in deltas.iter().enumerate() {
        let before = if i > 0 { deltas[i - 1] } else { 0.0 };
        let after = deltas.get(i + 1).copied().unwrap_or(0.0);
        if d > floor && d > JUMP_FACTOR * before.max(after) {
            records[i + 1].jumped = true;
        }
    }
}

fn aligned<'a>(
    a: &'a SweepTrace,
    b: &'a SweepTrace,
) -> Result<(Vec<SweepRecord>, Vec<SweepRecord>), MeanFieldError> {
    let (ra, rb) = (a.ascending(), b.ascending());
    if ra.len() != rb.len()
        || ra
            .iter()
            .zip(&rb)
            .any(|(x, y)| (x.scan_value - y.scan_value).abs() > 1e-12 * x.scan_value.abs().max(1.0))
    {
        return Err(MeanFieldError::MismatchedTraces);
    }
    Ok((ra, rb))
}

/// ∫|C_a − C_b| d(scan) by trapezoid on the shared scan grid.
pub fn loop_area(a: &SweepTrace, b: &SweepTrace) -> Result<f64, MeanFieldError> {
    let (ra, rb) = aligned(a, b)?;
    let diff: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| (x.count - y.count).abs()).collect();
    Ok((1..ra.len())
        .map(|i| 0.5 * (diff[i] + diff[i - 1]) * (ra[i].scan_value - ra[i - 1].scan_value))
        .sum())
}

/// Σ|C_a − C_b| / Σ|C_a| on the shared scan grid.
pub fn hysteresis_fraction(a: &SweepTrace, b: &SweepTrace) -> Result<f64, MeanFieldError> {
    let (ra, rb) = aligned(a, b)?;
    let num: f64 = ra.iter().zip(&rb).map(|(x, y)| (x.count - y.count).abs()).sum();
    let den: f64 = ra.iter().map(|x| x.count.abs()).sum();
    Ok(if den == 0.0 { 0.0 } else { num / den })
}
