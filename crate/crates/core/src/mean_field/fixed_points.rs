use serde::Serialize;

use super::{reduced_drift, reduced_slope};
use crate::model::{ModelParams, PulseSequence, SequenceSpec};

pub const DEFAULT_SCAN_POINTS: usize = 4000;
/// Bisection stops once the reduced drift is below this, rad/ns.
const ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    /// rad/ns
    pub omega: f64,
    pub stability: Stability,
    /// d(dω/dt)/dω at the root, 1/ns.
    pub drift_slope: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixedPointSet {
    /// Sorted by omega.
    pub points: Vec<FixedPoint>,
}

impl FixedPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn stable(&self) -> impl Iterator<Item = &FixedPoint> {
        self.points
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
    }

    pub fn stable_count(&self) -> usize {
        self.stable().count()
    }
}

/// Symmetric bracket that contains every root: |ω| = (α/κ)|C′(ω)| at a root,
/// so any half-width beyond (α/κ)·sup|C′| works. The supremum is sampled.
pub fn default_bracket(seq: &PulseSequence, p: &ModelParams) -> (f64, f64) {
    let center = match seq {
        PulseSequence::OnePulse { laser_detuning } => *laser_detuning,
        _ => 0.0,
    };
    let reach = 12.0 * p.sigma + center.abs();
    let n = 20_000;
    let sup = (0..=n)
        .map(|i| -reach + 2.0 * reach * i as f64 / n as f64)
        .map(|w| seq.count_derivative(w, p).abs())
        .fold(0.0, f64::max);
    let half = 1.25 * p.alpha_over_kappa() * sup + 1.0;
    (-half, half)
}

/// All roots of the drift in `bracket`, found by a dense sign-change scan
/// followed by bisection. Stability follows the sign of the drift slope.
pub fn find_all_fixed_points(
    seq: &PulseSequence,
    p: &ModelParams,
    bracket: (f64, f64),
    n_scan: usize,
) -> FixedPointSet {
    let (lo, hi) = bracket;
    let n = n_scan.max(2);
    let g = |w: f64| reduced_drift(w, seq, p);
    let step = (hi - lo) / (n - 1) as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_w = lo;
    let mut prev_g = g(lo);
    if prev_g == 0.0 {
        roots.push(lo);
    }
    for i in 1..n {
        let w = if i == n - 1 { hi } else { lo + step * i as f64 };
        let gw = g(w);
        if gw == 0.0 {
            roots.push(w);
        } else if prev_g != 0.0 && prev_g.signum() != gw.signum() {
            roots.push(bisect(&g, prev_w, w, prev_g));
        }
        prev_w = w;
        prev_g = gw;
    }
    let mut points: Vec<FixedPoint> = Vec::with_capacity(roots.len());
    for w in roots {
        if let Some(last) = points.last() {
            if (w - last.omega).abs() < 0.5 * step {
                continue;
            }
        }
        let slope = reduced_slope(w, seq, p);
        points.push(FixedPoint {
            omega: w,
            stability: if slope < 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            },
            drift_slope: p.kappa * slope,
        });
    }
    FixedPointSet { points }
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let gm = g(mid);
        if gm.abs() < ROOT_TOLERANCE || mid == a || mid == b {
            return mid;
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasEntry {
    pub scan_value: f64,
    pub fixed_points: FixedPointSet,
}

/// Fixed points at each scan value: the bifurcation diagram.
pub fn fixed_point_atlas(
    spec: &SequenceSpec,
    p: &ModelParams,
    scan_values: &[f64],
    bracket: Option<(f64, f64)>,
    n_scan: usize,
) -> Vec<AtlasEntry> {
    scan_values
        .iter()
        .map(|&v| {
            let seq = spec.at(v);
            let b = bracket.unwrap_or_else(|| default_bracket(&seq, p));
            AtlasEntry {
                scan_value: v,
                fixed_points: find_all_fixed_points(&seq, p, b, n_scan),
            }
        })
        .collect()
}

/// Total scan length over which two or more stable branches coexist.
///
/// Each scan value carries the half-spacing to its neighbours, so a uniform
/// scan gives (bistable samples) × step away from the ends.
pub fn bistable_window_width(atlas: &[AtlasEntry]) -> f64 {
    let n = atlas.len();
    if n < 2 {
        return 0.0;
    }
    (0..n)
        .filter(|&i| atlas[i].fixed_points.stable_count() >= 2)
        .map(|i| {
            let left = if i > 0 {
                (atlas[i].scan_value - atlas[i - 1].scan_value).abs()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                (atlas[i + 1].scan_value - atlas[i].scan_value).abs()
            } else {
                0.0
            };
            0.5 * (left + right)
        })
        .fold(0.0, |acc, w| acc + w)
}
