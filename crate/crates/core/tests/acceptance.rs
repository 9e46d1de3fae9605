//! Acceptance suite: one PASS/FAIL line per criterion with the measured
//! values and the runtime. Exits non-zero when any criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use overhauser::experiments::{
    compute_fixed_point_atlas, compute_sweeps, compute_three_pulse_echo, run, ExperimentConfig,
    ExperimentName,
};
use overhauser::fokker_planck::{steady_state_closed_form, DriftDiffusionOperator, NuclearPdf, OmegaGrid, Stepping};
use overhauser::mean_field::{bistable_window_width, hysteresis_fraction, loop_area, SweepTrace};
use overhauser::model::{
    count_rate_c2, count_rate_c3, rotation_angle, stark_phase, ModelParams, PulseEnvelope, PulseSequence,
    PulseShape,
};
use overhauser::units::{ghz_to_rad_per_ns, TWO_PI};

struct Outcome {
    pass: bool,
    detail: String,
}

/// Largest |mass − 1| seen by any density computed in this run.
#[derive(Default)]
struct MassLog {
    worst: f64,
}

impl MassLog {
    fn record(&mut self, pdf: &NuclearPdf) {
        self.worst = self.worst.max((pdf.mass() - 1.0).abs());
    }
}

/// Turning points with a minimum swing of `min_swing`, as (index, is_max).
fn turning_points(v: &[f64], min_swing: f64) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    if v.len() < 3 {
        return out;
    }
    let (mut hi, mut lo) = (0usize, 0usize);
    let mut rising: Option<bool> = None;
    for i in 1..v.len() {
        match rising {
            None => {
                if v[i] > v[hi] {
                    hi = i;
                }
                if v[i] < v[lo] {
                    lo = i;
                }
                if v[hi] - v[lo] >= min_swing {
                    rising = Some(hi > lo);
                    out.push(if hi > lo { (lo, false) } else { (hi, true) });
                }
            }
            Some(true) => {
                if v[i] > v[hi] {
                    hi = i;
                } else if v[hi] - v[i] >= min_swing {
                    out.push((hi, true));
                    lo = i;
                    rising = Some(false);
                }
            }
            Some(false) => {
                if v[i] < v[lo] {
                    lo = i;
                } else if v[i] - v[lo] >= min_swing {
                    out.push((lo, false));
                    hi = i;
                    rising = Some(true);
                }
            }
        }
    }
    // window edges are not turning points
    out.retain(|&(i, _)| i > 0 && i + 1 < v.len());
    out
}

/// Mean 10–90 % transition time of rising and falling edges between
/// consecutive turning points, with linear interpolation between samples.
fn rise_fall_times(x: &[f64], v: &[f64], turns: &[(usize, bool)]) -> (f64, f64) {
    let crossing = |a: usize, b: usize, level: f64| -> f64 {
        let (v0, v1) = (v[a], v[b]);
        for j in a + 1..=b {
            let f = (v[j] - v0) / (v1 - v0);
            if f >= level {
                let fp = (v[j - 1] - v0) / (v1 - v0);
                let s = if f > fp { (level - fp) / (f - fp) } else { 0.0 };
                return x[j - 1] + s * (x[j] - x[j - 1]);
            }
        }
        x[b]
    };
    let (mut rise, mut fall) = (Vec::new(), Vec::new());
    for w in turns.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        let dt = crossing(a, b, 0.9) - crossing(a, b, 0.1);
        if w[1].1 {
            rise.push(dt);
        } else {
            fall.push(dt);
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    (mean(&rise), mean(&fall))
}

fn edge_asymmetry(trace: &SweepTrace, from: f64) -> (f64, f64, f64) {
    let rows: Vec<_> = trace.ascending().into_iter().filter(|r| r.scan_value >= from).collect();
    let x: Vec<f64> = rows.iter().map(|r| r.scan_value).collect();
    let v: Vec<f64> = rows.iter().map(|r| r.count).collect();
    let range = v.iter().copied().fold(f64::MIN, f64::max) - v.iter().copied().fold(f64::MAX, f64::min);
    let turns = turning_points(&v, 0.1 * range);
    let (rise, fall) = rise_fall_times(&x, &v, &turns);
    (rise.max(fall) / rise.min(fall), rise, fall)
}

fn criterion_1(mass: &mut MassLog) -> Outcome {
    let p = ModelParams {
        kappa: 1.0,
        diffusion: 1.0,
        alpha: 0.0,
        ..ModelParams::default()
    };
    let grid = OmegaGrid::symmetric(12.0, 800).unwrap();
    let op = DriftDiffusionOperator::new(grid, |_| 0.0, &p).unwrap();
    let mut pdf = NuclearPdf::point_mass(grid, 4.0).unwrap();
    let w0 = pdf.moments().mean;
    let (mut t, mut worst_mean, mut worst_var) = (0.0, 0.0f64, 0.0f64);
    for target in [0.5, 1.0, 2.0, 3.0, 10.0] {
        pdf = op.evolve(&pdf, op.default_dt(), target - t, Stepping::Explicit).unwrap();
        t = target;
        mass.record(&pdf);
        let m = pdf.moments();
        let mean = w0 * (-t).exp();
        let var = 1.0 - (-2.0 * t).exp();
        worst_mean = worst_mean.max((m.mean - mean).abs() / mean);
        worst_var = worst_var.max((m.variance - var).abs() / var);
    }
    let stationary = (pdf.moments().variance - 1.0).abs();
    Outcome {
        pass: worst_mean < 5e-3 && worst_var < 5e-3 && stationary < 5e-3,
        detail: format!(
            "max rel err mean {worst_mean:.2e}, variance {worst_var:.2e}, stationary variance vs D/κ {stationary:.2e} (gate 5e-3)"
        ),
    }
}

fn criterion_2(mass: &mut MassLog) -> Outcome {
    let p = ExperimentConfig::preset(ExperimentName::ThreePulseEcho).model;
    let grid = OmegaGrid::symmetric(60.0, 2048).unwrap();
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut parts = Vec::new();
    for tau in [0.02, 0.05, 0.1, 0.15, 0.2] {
        let t0 = Instant::now();
        let seq = PulseSequence::ThreePulse { tau, echo_half_period: 13.0 };
        let count = |w: f64| seq.count(w, &p);
        let op = DriftDiffusionOperator::new(grid, count, &p).unwrap();
        let start = NuclearPdf::gaussian(grid, 0.0, p.diffusion_over_kappa()).unwrap();
        let out = op.evolve(&start, op.default_dt(), 20.0 / p.kappa, Stepping::Explicit).unwrap();
        let closed = steady_state_closed_form(count, &p, &grid).unwrap();
        mass.record(&out);
        let l1 = out.l1_distance(&closed);
        worst = worst.max(l1);
        slowest = slowest.max(t0.elapsed());
        parts.push(format!("τ={tau}: {l1:.1e}"));
    }
    Outcome {
        pass: worst < 1e-3 && slowest.as_secs_f64() < 60.0,
        detail: format!(
            "L1 at t=20/κ [{}] (gate 1e-3), slowest τ {:.1} s (gate 60 s)",
            parts.join(", "),
            slowest.as_secs_f64()
        ),
    }
}

fn criterion_3(mass: &mut MassLog) -> Outcome {
    let cfg = ExperimentConfig::preset(ExperimentName::ThreePulseEcho);
    let res = compute_three_pulse_echo(&cfg).unwrap();
    for c in &res.columns {
        mass.record(&c.pdf);
    }
    let tau = res.taus();
    let c = res.counts();
    let bound = 2.0 * cfg.model.s_pump.abs();
    let bounded = c.iter().all(|v| (0.0..=bound).contains(v));
    let range = c.iter().copied().fold(f64::MIN, f64::max) - c.iter().copied().fold(f64::MAX, f64::min);
    let turns = turning_points(&c, 0.05 * range);
    let fringes = turns.iter().filter(|t| t.1).count();
    let third = tau[tau.len() - 1] / 3.0;
    let d2 = |i: usize| (c[i - 1] - 2.0 * c[i] + c[i + 1]).abs();
    let early: Vec<_> = turns
        .iter()
        .filter(|(i, _)| *i > 0 && *i + 1 < c.len() && tau[*i] <= third)
        .collect();
    let mean_d2 = |want_max: bool| {
        let v: Vec<f64> = early.iter().filter(|t| t.1 == want_max).map(|t| d2(t.0)).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    let cusp = mean_d2(false) / mean_d2(true);
    let first_max = turns.iter().position(|t| t.1 && t.0 > 0);
    let midpoint = first_max
        .and_then(|k| turns.get(k + 1).map(|next| 0.5 * (c[turns[k].0] + c[next.0])))
        .unwrap_or(f64::NAN);
    let tail = &c[c.len() - c.len() / 10..];
    let asymptote = tail.iter().sum::<f64>() / tail.len() as f64;
    Outcome {
        pass: fringes >= 10 && cusp >= 2.0 && asymptote > midpoint && bounded,
        detail: format!(
            "{fringes} fringes, cusp ratio {cusp:.1} (gate 2), asymptote {asymptote:.4} vs first-fringe midpoint {midpoint:.4}, ⟨C₃⟩ in [0, 2|S_p|]: {bounded}"
        ),
    }
}

fn criterion_4() -> Outcome {
    let cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
    let late = 2.0 * cfg.sequence.scan.stop / 3.0;
    let traces = compute_sweeps(&cfg).unwrap();
    let frac = hysteresis_fraction(&traces[0].1, &traces[1].1).unwrap();
    let (asym, rise, fall) = edge_asymmetry(&traces[0].1, late);

    let mut control = cfg.clone();
    control.model.alpha = 0.0;
    let ctrl = compute_sweeps(&control).unwrap();
    let ctrl_frac = hysteresis_fraction(&ctrl[0].1, &ctrl[1].1).unwrap();
    let (ctrl_asym, _, _) = edge_asymmetry(&ctrl[0].1, late);
    Outcome {
        pass: frac > 0.05 && asym > 3.0 && ctrl_frac == 0.0 && ctrl_asym < 1.2,
        detail: format!(
            "up/down difference {:.1}% of norm (gate 5%), late-τ edge asymmetry {asym:.1}:1 (rise {:.1} ps, fall {:.1} ps; gate 3:1); α=0 control: difference {ctrl_frac}, asymmetry {ctrl_asym:.2}:1",
            100.0 * frac,
            1e3 * rise,
            1e3 * fall
        ),
    }
}

fn criterion_5() -> Outcome {
    let cfg = ExperimentConfig::preset(ExperimentName::FixedPointAtlas);
    let atlas = compute_fixed_point_atlas(&cfg);
    let width = bistable_window_width(&atlas);
    let max_stable = atlas.iter().map(|e| e.fixed_points.stable_count()).max().unwrap_or(0);
    let sweeps = compute_sweeps(&ExperimentConfig::preset(ExperimentName::OnePulseHysteresis)).unwrap();
    let area = loop_area(&sweeps[0].1, &sweeps[1].1).unwrap();
    let mut widths = Vec::new();
    for scale in [1.0, 0.8, 0.6, 0.4, 0.2, 0.0] {
        let mut c = cfg.clone();
        c.model = c.model.with_alpha_over_kappa(cfg.model.alpha_over_kappa() * scale);
        widths.push(bistable_window_width(&compute_fixed_point_atlas(&c)));
    }
    let monotone = widths.windows(2).all(|w| w[1] <= w[0]) && widths[widths.len() - 1] == 0.0;
    let shown: Vec<String> = widths.iter().map(|w| format!("{w:.2}")).collect();
    Outcome {
        pass: width > 0.0 && max_stable >= 2 && area > 0.0 && monotone,
        detail: format!(
            "bistable window {width:.2} rad/ns with {max_stable} stable branches, loop area {area:.3}, window vs α scale 1→0: [{}]",
            shown.join(", ")
        ),
    }
}

fn random_params(rng: &mut StdRng) -> ModelParams {
    let t_pump = 26.0;
    ModelParams {
        beta0: rng.random_range(0.01..10.0) / t_pump,
        sigma: ghz_to_rad_per_ns(rng.random_range(0.3..3.0)),
        s_pump: rng.random_range(0.01..=0.5),
        phi0: rng.random_range(0.0..TWO_PI),
        t_pump,
        ..ModelParams::default()
    }
}

fn random_sequence(rng: &mut StdRng, kind: usize) -> PulseSequence {
    match kind {
        0 => PulseSequence::OnePulse {
            laser_detuning: rng.random_range(-40.0..40.0),
        },
        1 => PulseSequence::TwoPulse {
            tau: rng.random_range(0.0..1.0),
        },
        _ => PulseSequence::ThreePulse {
            tau: rng.random_range(0.0..1.0),
            echo_half_period: 13.0,
        },
    }
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut identity_worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let w = rng.random_range(-60.0..60.0);
        let tau = rng.random_range(0.0..2.0);
        identity_worst = identity_worst.max((count_rate_c3(w, tau, &p) - count_rate_c2(w, 2.0 * tau, &p)).abs());
    }
    // Five-point central difference; the floor keeps zeros of C′ from
    // turning round-off into relative error.
    let floor = 1e-6;
    let h = 1e-3;
    let mut deriv_worst = 0.0f64;
    for kind in 0..3 {
        for _ in 0..1000 {
            let p = random_params(&mut rng);
            let seq = random_sequence(&mut rng, kind);
            let w = rng.random_range(-40.0..40.0);
            let f = |x: f64| seq.count(x, &p);
            let fd = (-f(w + 2.0 * h) + 8.0 * f(w + h) - 8.0 * f(w - h) + f(w - 2.0 * h)) / (12.0 * h);
            let an = seq.count_derivative(w, &p);
            deriv_worst = deriv_worst.max((an - fd).abs() / an.abs().max(floor));
        }
    }
    let mut violations = 0usize;
    for i in 0..100_000 {
        let p = random_params(&mut rng);
        let seq = random_sequence(&mut rng, i % 3);
        let c = seq.count(rng.random_range(-60.0..60.0), &p);
        if !(0.0..=2.0 * p.s_pump.abs()).contains(&c) {
            violations += 1;
        }
    }
    Outcome {
        pass: identity_worst == 0.0 && deriv_worst < 1e-5 && violations == 0,
        detail: format!(
            "max |C₃(ω,τ) − C₂(ω,2τ)| {identity_worst:e} over 1000 draws, max derivative rel err {deriv_worst:.1e} over 3000 draws (gate 1e-5), bound violations {violations}/100000"
        ),
    }
}

fn criterion_7() -> Outcome {
    let ratios = [2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];
    let mut all_monotone = true;
    let mut at_100 = Vec::new();
    for shape in [PulseShape::Square, PulseShape::Gaussian] {
        let errors: Vec<f64> = ratios
            .iter()
            .map(|r| {
                let env = PulseEnvelope {
                    rabi_peak: 1.0,
                    duration: 1.0,
                    detuning: *r,
                    shape,
                };
                let theta = rotation_angle(&env).unwrap();
                (stark_phase(&env).unwrap() - theta).abs() / theta
            })
            .collect();
        all_monotone &= errors.windows(2).all(|w| w[1] < w[0]);
        at_100.push(errors[5]);
    }
    Outcome {
        pass: all_monotone && at_100.iter().all(|e| *e < 1e-3),
        detail: format!(
            "rel err at Δ/Ω=100: square {:.2e}, Gaussian {:.2e} (gate 1e-3); monotone in Δ over {:?}: {all_monotone}",
            at_100[0], at_100[1], ratios
        ),
    }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_8(mass: &MassLog) -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut differing = Vec::new();
    for name in ExperimentName::ALL {
        let mut dirs = Vec::new();
        for rep in 0..2 {
            let mut cfg = ExperimentConfig::preset(name);
            cfg.output.dir = tmp.path().join(format!("{name}_{rep}"));
            run(&cfg).unwrap();
            dirs.push(cfg.output.dir);
        }
        if dir_bytes(&dirs[0]) == dir_bytes(&dirs[1]) {
            identical += 1;
        } else {
            differing.push(name.as_str());
        }
    }
    Outcome {
        pass: mass.worst < 1e-9 && differing.is_empty(),
        detail: format!(
            "max mass drift across criteria 1–3 {:.1e} (gate 1e-9); {identical}/4 experiments byte-identical on rerun{}",
            mass.worst,
            if differing.is_empty() { String::new() } else { format!(", differing: {differing:?}") }
        ),
    }
}

fn main() {
    let mut mass = MassLog::default();
    type Check<'a> = Box<dyn FnMut(&mut MassLog) -> Outcome + 'a>;
    let checks: Vec<(&str, f64, Check)> = vec![
        ("OU limit", 10.0, Box::new(criterion_1)),
        ("steady-state oracle", 300.0, Box::new(criterion_2)),
        ("echo fringe shape", f64::INFINITY, Box::new(criterion_3)),
        ("FID sawtooth and hysteresis", 30.0, Box::new(|_: &mut MassLog| criterion_4())),
        ("one-pulse bistability", 30.0, Box::new(|_: &mut MassLog| criterion_5())),
        ("identity and derivative suites", 5.0, Box::new(|_: &mut MassLog| criterion_6())),
        ("pulse-physics consistency", 1.0, Box::new(|_: &mut MassLog| criterion_7())),
        ("conservation and determinism", f64::INFINITY, Box::new(|m: &mut MassLog| criterion_8(m))),
    ];
    let mut failed = 0;
    for (i, (name, budget, mut check)) in checks.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = check(&mut mass);
        let secs = t0.elapsed().as_secs_f64();
        let pass = outcome.pass && secs < budget;
        if !pass {
            failed += 1;
        }
        let limit = if budget.is_finite() { format!(", limit {budget} s") } else { String::new() };
        println!(
            "{} criterion {}: {name}: {} [{secs:.2} s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
