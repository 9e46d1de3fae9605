use std::fs;

use overhauser::experiments::{
    compute_fixed_point_atlas, compute_sweeps, compute_three_pulse_echo, fid_pde_consistency, run,
    Direction, ExperimentConfig, ExperimentName,
};
use overhauser::mean_field::{hysteresis_fraction, loop_area};
use overhauser::model::{ModelParams, PulseSequence, ScanRange};

fn preset(name: ExperimentName, dir: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(name);
    cfg.output.dir = dir.to_path_buf();
    cfg
}

#[test]
fn one_pulse_alpha_zero_traces_match_and_are_symmetric() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::OnePulseHysteresis);
    cfg.model.alpha = 0.0;
    let traces = compute_sweeps(&cfg).unwrap();
    let (up, down) = (&traces[0].1, &traces[1].1);
    assert_eq!(hysteresis_fraction(up, down).unwrap(), 0.0);
    let c = up.counts();
    let n = c.len();
    for i in 0..n {
        assert!((c[i] - c[n - 1 - i]).abs() < 1e-12);
    }
}

#[test]
fn one_pulse_preset_traces_differ() {
    let cfg = ExperimentConfig::preset(ExperimentName::OnePulseHysteresis);
    let traces = compute_sweeps(&cfg).unwrap();
    let (up, down) = (&traces[0].1, &traces[1].1);
    assert!(loop_area(up, down).unwrap() > 0.0);
    // Dragging keeps the line on resonance past the point where the other
    // direction catches it, so the count-weighted centre moves with the scan.
    let centre = |t: &overhauser::mean_field::SweepTrace| {
        let (num, den) = t
            .records
            .iter()
            .fold((0.0, 0.0), |(n, d), r| (n + r.scan_value * r.count, d + r.count));
        num / den
    };
    assert!(centre(up) > centre(down) + 0.1, "{} {}", centre(up), centre(down));
}

#[test]
fn zero_scan_range_gives_single_point() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::OnePulseHysteresis);
    cfg.sequence.scan = ScanRange::new(1.0, 1.0, 0.1);
    for (_, t) in compute_sweeps(&cfg).unwrap() {
        assert_eq!(t.len(), 1);
    }
}

#[test]
fn fid_alpha_zero_is_bare_sinusoid_in_both_directions() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
    cfg.model.alpha = 0.0;
    let traces = compute_sweeps(&cfg).unwrap();
    assert_eq!(hysteresis_fraction(&traces[0].1, &traces[1].1).unwrap(), 0.0);
    for r in traces[0].1.records.iter() {
        assert_eq!(r.omega_f, 0.0);
        let bare = PulseSequence::TwoPulse { tau: r.scan_value }.count(0.0, &cfg.model);
        assert_eq!(r.count, bare);
    }
}

#[test]
fn fid_within_one_larmor_period_has_no_jumps() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
    cfg.sequence.scan = ScanRange::new(0.0, 0.9 * cfg.model.larmor_period(), 0.0005);
    for (_, t) in compute_sweeps(&cfg).unwrap() {
        assert!(t.records.iter().all(|r| !r.jumped));
    }
}

#[test]
fn single_directions_run_alone() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::TwoPulseFid);
    cfg.sweep.direction = Direction::Down;
    let traces = compute_sweeps(&cfg).unwrap();
    assert_eq!(traces.len(), 1);
    assert_eq!(traces[0].0, Direction::Down);
    assert!(traces[0].1.records[0].scan_value > traces[0].1.records[1].scan_value);
}

#[test]
fn echo_alpha_zero_is_damped_sinusoid() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::ThreePulseEcho);
    cfg.model.alpha = 0.0;
    cfg.sequence.scan = ScanRange::new(0.0, 0.5, 0.01);
    let res = compute_three_pulse_echo(&cfg).unwrap();
    let p = cfg.model;
    let var = p.diffusion_over_kappa();
    for c in &res.columns {
        assert!(c.mean_omega.abs() < 1e-12);
        // Average of C₃ over the fixed Gaussian by dense quadrature.
        let seq = PulseSequence::ThreePulse {
            tau: c.tau,
            echo_half_period: 13.0,
        };
        let n = 20_000;
        let half = 10.0 * var.sqrt();
        let h = 2.0 * half / n as f64;
        let oracle: f64 = (0..n)
            .map(|k| {
                let w = -half + (k as f64 + 0.5) * h;
                (-w * w / (2.0 * var)).exp() * seq.count(w, &p)
            })
            .sum::<f64>()
            * h
            / (2.0 * std::f64::consts::PI * var).sqrt();
        assert!((c.expected_count - oracle).abs() < 1e-6, "{} vs {oracle}", c.expected_count);
    }
}

#[test]
fn echo_single_tau_column_has_unit_mass_and_bounded_count() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::ThreePulseEcho);
    cfg.sequence.scan = ScanRange::new(0.3, 0.3, 0.001);
    let res = compute_three_pulse_echo(&cfg).unwrap();
    assert_eq!(res.columns.len(), 1);
    assert!((res.columns[0].pdf.mass() - 1.0).abs() < 1e-12);
    let bound = 2.0 * cfg.model.s_pump.abs();
    assert!((0.0..=bound).contains(&res.columns[0].expected_count));
}

#[test]
fn atlas_alpha_zero_single_stable_branch() {
    let mut cfg = ExperimentConfig::preset(ExperimentName::FixedPointAtlas);
    cfg.model.alpha = 0.0;
    for e in compute_fixed_point_atlas(&cfg) {
        assert_eq!(e.fixed_points.len(), 1);
        assert_eq!(e.fixed_points.stable_count(), 1);
        assert!(e.fixed_points.points[0].omega.abs() < 1e-9);
    }
}

#[test]
fn mean_field_agrees_with_density_evolution() {
    let p = ModelParams::default();
    let rows = fid_pde_consistency(&p, &[0.03, 0.05, 0.07, 0.15, 0.2], 0.0, 2048).unwrap();
    for r in rows {
        assert!(r.agree, "{r:?}");
        assert!(r.omega_mean_field.abs() > 0.1);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for name in [ExperimentName::TwoPulseFid, ExperimentName::OnePulseHysteresis] {
        let a = run(&preset(name, &tmp.path().join("a"))).unwrap();
        let b = run(&preset(name, &tmp.path().join("b"))).unwrap();
        assert_eq!(a.files.len(), b.files.len());
        for (fa, fb) in a.files.iter().zip(&b.files) {
            assert_eq!(fa.file_name(), fb.file_name());
            assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap(), "{}", fa.display());
        }
    }
}

#[test]
fn fid_writes_three_panels_per_direction() {
    let tmp = tempfile::tempdir().unwrap();
    let report = run(&preset(ExperimentName::TwoPulseFid, tmp.path())).unwrap();
    for dir in ["up", "down"] {
        for panel in ["", "_count", "_overhauser", "_efficiency"] {
            let f = tmp.path().join(format!("two_pulse_fid_{dir}{panel}.csv"));
            assert!(f.exists(), "{}", f.display());
        }
    }
    assert!(tmp.path().join("two_pulse_fid_meta.json").exists());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("two_pulse_fid_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["experiment"], "two_pulse_fid");
    assert!(meta["metrics"]["hysteresis_fraction"].as_f64().unwrap() > 0.05);
    assert_eq!(report.files.len(), 9);
    let eff = fs::read_to_string(tmp.path().join("two_pulse_fid_up_efficiency.csv")).unwrap();
    for line in eff.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}
