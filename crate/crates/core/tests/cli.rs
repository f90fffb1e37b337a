use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use twomode::cli::io::{modes_to_text, parse_modes, parse_trajectory_csv};
use twomode::cli::{phase_diagram, phase_diagram_node, Axis, AxisSpec, RunConfig, SweepSpec};
use twomode::modeparams::{SpatialModes, TwoModeParams};
use twomode::ModelParams;

const PI: &str = "3.141592653589793";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twomode"))
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = bin().current_dir(dir).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let (code, _, err) = run(dir, args);
    assert_eq!(code, 0, "{args:?}: {err}");
}

#[test]
fn simulate_zero_phase_oscillation() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(
        dir.path(),
        &["simulate", "--lambda", "0.6", "--ratio", "--z-a", "0.1", "--z-b", "0.1", "--out", "fig2"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("fig2.csv"));
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,Z_a,Z_b,phi_a,phi_b,H");
    assert_eq!(csv.lines().count(), 1 + 2001);
    let s = json(&dir.path().join("fig2.summary.json"));
    assert_eq!(s["phase_class"], "ZeroPhase");
    assert_eq!(s["trapping"], "Oscillatory");
}

#[test]
fn simulate_fixed_point_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--lambda", "1.0", "--ratio", "--out", "fp"]);
    let table = parse_trajectory_csv(&fs::read_to_string(dir.path().join("fp.csv")).unwrap()).unwrap();
    for s in &table.states {
        assert!(s.z_a.abs() < 1e-12 && s.z_b.abs() < 1e-12);
    }
}

#[test]
fn simulate_pi_self_trapping() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "simulate", "--lambda", "0.8", "--ratio", "--z-a", "0.1", "--z-b", "0.1", "--phi-a", PI, "--phi-b", PI,
            "--out", "fig7",
        ],
    );
    let s = json(&dir.path().join("fig7.summary.json"));
    assert_eq!(s["trapping"], "MQST_Coexisting");
    assert_eq!(s["phase_class"], "PiPhase");
}

#[test]
fn simulate_json_table_and_config_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        model: ModelParams::with_ratio(0.6, 2.13),
        initial: twomode::State::new(0.05, 0.05, 0.0, 0.0),
        ..RunConfig::default()
    };
    fs::write(dir.path().join("c.json"), cfg.to_json()).unwrap();
    ok(
        dir.path(),
        &["simulate", "--config", "c.json", "--t-end", "120", "--format", "json", "--out", "o"],
    );
    let traj: twomode::Trajectory =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o.json")).unwrap()).unwrap();
    assert_eq!(*traj.times.last().unwrap(), 120.0);
    assert_eq!(traj.params, cfg.model);
    assert_eq!(traj.states[0].z_a, 0.05);
}

#[test]
fn classify_relabels_written_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["simulate", "--lambda", "1.8", "--ratio", "--z-a", "0.1", "--z-b", "0.09", "--out", "run"],
    );
    ok(
        dir.path(),
        &["classify", "--lambda", "1.8", "--ratio", "--input", "run.csv", "--out", "again"],
    );
    let a = json(&dir.path().join("run.summary.json"));
    let b = json(&dir.path().join("again.summary.json"));
    assert_eq!(a["trapping"], "MQST_Separated");
    assert_eq!(a["label"], b["label"]);
}

fn fixed_points_of(dir: &Path, args: &[&str]) -> Vec<Value> {
    let mut full = vec!["fixed-points", "--out", "fp"];
    full.extend_from_slice(args);
    ok(dir, &full);
    json(&dir.join("fp.fixed_points.json")).as_array().unwrap().clone()
}

#[test]
fn fixed_points_listing() {
    let dir = tempfile::tempdir().unwrap();
    let all = fixed_points_of(dir.path(), &["--lambda", "2.0", "--ratio"]);
    let nontrivial: Vec<&Value> = all.iter().filter(|r| r["branch"] != "trivial").collect();
    assert_eq!(nontrivial.len(), 4);
    assert_eq!(all.len(), 6);
    for r in &all {
        assert!(r["residual"].as_f64().unwrap() < 1e-10);
        assert!(r["stability_method"].as_str().unwrap().contains("jacobian"));
    }
    let zero: Vec<&&Value> = nontrivial.iter().filter(|r| r["mode"] == "zero").collect();
    assert_eq!(zero.len(), 2);
    assert!((zero[0]["z_a"].as_f64().unwrap() + zero[1]["z_a"].as_f64().unwrap()).abs() < 1e-15);

    let sub = fixed_points_of(dir.path(), &["--lambda", "0.5", "--ratio", "--mode", "zero"]);
    assert_eq!(sub.len(), 1);
    assert_eq!(sub[0]["branch"], "trivial");

    let asym = fixed_points_of(
        dir.path(),
        &["--lambda", "3.0", "--lambda-ab", "6.39", "--k-a", "2.0", "--k-b", "1.0", "--mode", "zero"],
    );
    assert!(asym.iter().any(|r| r["branch"] == "asymmetric"));
    assert!(asym.iter().all(|r| r["branch"] == "asymmetric" || r["branch"] == "trivial"));
}

fn sweep_config(axis1: AxisSpec, axis2: Option<AxisSpec>, model: ModelParams, ratio: Option<f64>) -> RunConfig {
    RunConfig {
        model,
        lambda_ab_ratio: ratio,
        sweep: Some(SweepSpec {
            axis1,
            axis2,
            simulate: false,
        }),
        ..RunConfig::default()
    }
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "axis1,axis2,zero_stable,pi_stable,label");
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// Closed-form stability for `K = 1`, `f = 1/2`: the zero mode needs the
/// matrix `[[1 + La/2, Lab/2], [Lab/2, 1 + Lb/2]]` positive definite, the pi
/// mode needs `[[-1 + La/2, Lab/2], [Lab/2, -1 + Lb/2]]` negative definite.
fn oracle(la: f64, lb: f64, lab: f64) -> (bool, bool) {
    let (a, b, c) = (1.0 + la / 2.0, 1.0 + lb / 2.0, lab / 2.0);
    let zero = a > 0.0 && a * b - c * c > 0.0;
    let (a, b) = (-1.0 + la / 2.0, -1.0 + lb / 2.0);
    let pi = a < 0.0 && a * b - c * c > 0.0;
    (zero, pi)
}

#[test]
fn phase_diagram_matches_closed_form_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let ax = |name| AxisSpec {
        name,
        min: -2.0,
        max: 4.0,
        count: 101,
    };
    let lab = 1.5;
    let cfg = sweep_config(ax(Axis::LambdaA), Some(ax(Axis::LambdaB)), ModelParams::symmetric(1.0, 0.0, lab), None);
    fs::write(dir.path().join("c.json"), cfg.to_json()).unwrap();
    ok(dir.path(), &["phase-diagram", "--config", "c.json", "--out", "pd"]);
    let rows = read_rows(&dir.path().join("pd.phase_diagram.csv"));
    assert_eq!(rows.len(), 101 * 101);

    let h = 6.0 / 100.0;
    let mut mismatches = 0;
    for r in &rows {
        let (la, lb): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let (zero, pi) = (r[2] == "true", r[3] == "true");
        let (ez, ep) = oracle(la, lb, lab);
        for (got, want, pick) in [(zero, ez, 0usize), (pi, ep, 1)] {
            if got != want {
                mismatches += 1;
                // Allowed only within one grid cell of the analytic boundary.
                let near = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)].iter().any(|(dx, dy)| {
                    let o = oracle(la + dx, lb + dy, lab);
                    [o.0, o.1][pick] != want
                });
                assert!(near, "node ({la}, {lb}) disagrees away from the boundary");
            }
        }
    }
    assert!(mismatches < 50, "{mismatches} boundary disagreements");
    assert!(rows.iter().any(|r| r[2] == "true") && rows.iter().any(|r| r[2] == "false"));
    assert!(rows.iter().any(|r| r[3] == "true") && rows.iter().any(|r| r[3] == "false"));
}

#[test]
fn lambda_sweep_flips_near_critical_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let axis = AxisSpec {
        name: Axis::Lambda,
        min: 0.0,
        max: 3.0,
        count: 301,
    };
    let cfg = sweep_config(axis, None, ModelParams::with_ratio(1.0, 2.13), Some(2.13));
    fs::write(dir.path().join("c.json"), cfg.to_json()).unwrap();
    ok(dir.path(), &["phase-diagram", "--config", "c.json", "--out", "l"]);
    let rows = read_rows(&dir.path().join("l.phase_diagram.csv"));
    assert_eq!(rows.len(), 301);
    assert!(rows.iter().all(|r| r[1].is_empty()));
    let flip = rows.windows(2).position(|w| w[0][2] != w[1][2]).unwrap();
    let (lo, hi): (f64, f64) = (rows[flip][0].parse().unwrap(), rows[flip + 1][0].parse().unwrap());
    assert!(lo <= 1.76991 && 1.76991 <= hi, "flip between {lo} and {hi}");
    assert_eq!(rows[flip][2], "true");
}

#[test]
fn single_node_sweep_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let one = |name| AxisSpec {
        name,
        min: 1.0,
        max: 1.0,
        count: 1,
    };
    let cfg = sweep_config(one(Axis::LambdaA), Some(one(Axis::LambdaB)), ModelParams::with_ratio(1.0, 2.13), None);
    fs::write(dir.path().join("c.json"), cfg.to_json()).unwrap();
    ok(dir.path(), &["phase-diagram", "--config", "c.json", "--out", "one"]);
    assert_eq!(read_rows(&dir.path().join("one.phase_diagram.csv")).len(), 1);
}

#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        model: ModelParams::with_ratio(1.0, 2.13),
        lambda_ab_ratio: Some(2.13),
        sweep: Some(SweepSpec {
            axis1: AxisSpec {
                name: Axis::Lambda,
                min: 1.6,
                max: 2.6,
                count: 6,
            },
            axis2: Some(AxisSpec {
                name: Axis::ZB,
                min: 0.0,
                max: 0.1,
                count: 3,
            }),
            simulate: true,
        }),
        initial: twomode::State::new(0.1, 0.0, 0.0, 0.0),
        ..RunConfig::default()
    };
    fs::write(dir.path().join("c.json"), cfg.to_json()).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3", "3"] {
        let out = bin()
            .current_dir(dir.path())
            .env("TWOMODE_THREADS", threads)
            .args(["phase-diagram", "--config", "c.json", "--out", "d"])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(fs::read(dir.path().join("d.phase_diagram.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);

    // Any node computed alone matches the same node inside the sweep.
    let rows = phase_diagram(&cfg).unwrap();
    let sweep = cfg.sweep.unwrap();
    for (i, (a1, a2)) in sweep.nodes().into_iter().enumerate() {
        let alone = phase_diagram_node(&cfg, &sweep, a1, a2).unwrap();
        assert_eq!(alone.label, rows[i].label);
        assert_eq!(alone.zero_stable, rows[i].zero_stable);
        assert_eq!(alone.pi_stable, rows[i].pi_stable);
    }
}

fn box_modes() -> SpatialModes {
    let n = 2001;
    let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let minus: Vec<f64> = x.iter().map(|&v| if v < 0.5 { 1.0 } else { -1.0 }).collect();
    SpatialModes {
        chi_a_plus: vec![1.0; n],
        chi_a_minus: minus.clone(),
        chi_b_plus: vec![1.0; n],
        chi_b_minus: minus,
        x,
        gbar_a: 1.0,
        gbar_b: 1.0,
        gbar_ab: 1.0,
        delta_e_a: 0.5,
        delta_e_b: 0.5,
        f_a: 0.5,
        f_b: 0.5,
    }
}

fn mode_examples() -> Vec<SpatialModes> {
    let boxed = box_modes();
    let mut same = box_modes();
    same.chi_a_minus = same.chi_a_plus.clone();
    let mut empty = box_modes();
    empty.chi_b_plus = vec![0.0; empty.x.len()];
    empty.chi_b_minus = vec![0.0; empty.x.len()];
    vec![boxed, same, empty]
}

#[test]
fn mode_params_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (i, m) in mode_examples().into_iter().enumerate() {
        let input = dir.path().join(format!("m{i}.txt"));
        let text = modes_to_text(&m);
        fs::write(&input, &text).unwrap();
        let reread = parse_modes(&fs::read_to_string(&input).unwrap()).unwrap();
        assert_eq!(reread, m);
        assert_eq!(modes_to_text(&reread).as_bytes(), text.as_bytes());

        let stem = format!("p{i}");
        ok(dir.path(), &["mode-params", "--input", input.to_str().unwrap(), "--out", &stem]);
        let two_text = fs::read_to_string(dir.path().join(format!("{stem}.two_mode.json"))).unwrap();
        let two: TwoModeParams = serde_json::from_str(&two_text).unwrap();
        let mut again = serde_json::to_string_pretty(&two).unwrap();
        again.push('\n');
        assert_eq!(again, two_text);
        let model_text = fs::read_to_string(dir.path().join(format!("{stem}.model.json"))).unwrap();
        let model: ModelParams = serde_json::from_str(&model_text).unwrap();
        assert_eq!(model, two.to_model_params(0.5, 0.5));
        if i == 0 {
            assert!((two.lambda_a - 2.0).abs() < 1e-10);
            assert!(two.c_a.abs() < 1e-10);
        }
    }
}

#[test]
fn mode_params_reports_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = box_modes();
    m.chi_a_plus.iter_mut().for_each(|v| *v *= 1.1);
    fs::write(dir.path().join("bad.txt"), modes_to_text(&m)).unwrap();
    let (code, _, err) = run(dir.path(), &["mode-params", "--input", "bad.txt"]);
    assert_eq!(code, 2);
    assert!(err.contains("norm 1.21"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.json"), "{ not json").unwrap();
    fs::write(d.join("unknown.json"), r#"{"modle": {}}"#).unwrap();
    assert_eq!(run(d, &["simulate", "--config", "bad.json"]).0, 2);
    assert_eq!(run(d, &["simulate", "--config", "unknown.json"]).0, 2);
    assert_eq!(run(d, &["simulate", "--k", "-1"]).0, 2);
    assert_eq!(run(d, &["simulate", "--z-a", "1.5"]).0, 2);
    assert_eq!(run(d, &["simulate", "--lambda-ab", "1", "--ratio"]).0, 2);
    assert_eq!(run(d, &["phase-diagram"]).0, 2);
    assert_eq!(run(d, &["nonsense"]).0, 2);

    let (code, _, err) = run(
        d,
        &["simulate", "--lambda", "3.7", "--ratio", "--z-a", "0.2", "--z-b", "-0.1", "--out", "pole"],
    );
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("pole"));

    assert_eq!(run(d, &["simulate", "--config", "missing.json"]).0, 4);
    assert_eq!(run(d, &["classify", "--input", "missing.csv"]).0, 4);
    fs::write(d.join("file"), "").unwrap();
    assert_eq!(run(d, &["simulate", "--out", "file/sub/x"]).0, 4);

    let out = bin().current_dir(d).env("TWOMODE_THREADS", "0").arg("simulate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_files_round_trip() {
    let cfg = RunConfig {
        model: ModelParams::with_ratio(2.0, 2.13),
        lambda_ab_ratio: Some(2.13),
        sweep: Some(SweepSpec {
            axis1: AxisSpec {
                name: Axis::ZA,
                min: 0.05,
                max: 0.2,
                count: 4,
            },
            axis2: None,
            simulate: true,
        }),
        ..RunConfig::default()
    };
    let text = cfg.to_json();
    let back = RunConfig::from_json(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_json(), text);
}
