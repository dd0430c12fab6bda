//! End-to-end tests of the binary: exit-code contract, JSON round-trips,
//! and bit-for-bit reproducibility under a fixed seed.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qlgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn construct_worked_example_plans_near_target() {
    let dir = tempdir("construct-worked");
    let out = qlgraph(&[
        "construct",
        "--a",
        "0.57735",
        "--b",
        "0.81650",
        "--n",
        "30",
        "--seed",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let plan = read_json(&dir.join("plan.json"));
    // balanced-ish amplitudes select the inverse branch; the realized
    // detuning 17/6 approximates 2√2
    assert_eq!(plan["branch"], "delta_inv");
    assert_eq!(plan["achieved_num"], 6);
    assert_eq!(plan["achieved_den"], 17);
    let report = read_json(&dir.join("report.json"));
    assert!(report["residual"].as_f64().unwrap() <= 1e-8);
    assert!(report["fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
}

#[test]
fn construct_balanced_state_switches_branch() {
    let out = qlgraph(&[
        "construct",
        "--a",
        "0.70711",
        "--b",
        "0.70711",
        "--n",
        "30",
        "--seed",
        "2",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["plan"]["branch"], "delta_inv");
    // a perfectly balanced state needs unbounded detuning; the closest grid
    // point at n = 30 is Δ⁻¹ = 2·1/28 = 1/14
    assert_eq!(doc["plan"]["achieved_num"], 1);
    assert_eq!(doc["plan"]["achieved_den"], 14);
    // the asymmetric family reaches it exactly instead
    let exact = stdout_json(&qlgraph(&[
        "construct",
        "--a",
        "0.70711",
        "--b",
        "0.70711",
        "--mode",
        "asymmetric",
        "--n",
        "30",
        "--seed",
        "2",
    ]));
    assert_eq!(exact["plan"]["branch"], "delta_c_inv");
    assert_eq!(exact["plan"]["l_B"], 0);
    assert_eq!(exact["plan"]["abs_error"], 0.0);
}

#[test]
fn construct_asymmetric_polar_state() {
    let out = qlgraph(&[
        "construct",
        "--a",
        "1",
        "--b",
        "0",
        "--mode",
        "asymmetric",
        "--n",
        "20",
        "--seed",
        "3",
    ]);
    let doc = stdout_json(&out);
    // |+⟩ has equal block weights: the asymmetric plan is l_A = l_B
    assert_eq!(doc["plan"]["branch"], "delta_c");
    assert_eq!(doc["plan"]["l_A"], doc["plan"]["l_B"]);
    assert_eq!(doc["plan"]["abs_error"], 0.0);
    assert!(doc["report"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn construct_continuous_mode_hits_target_exactly() {
    let out = qlgraph(&[
        "construct",
        "--a",
        "0.5773502691896258",
        "--b",
        "0.816496580927726",
        "--mode",
        "continuous-l",
        "--kA",
        "25",
        "--kB",
        "20",
        "--n",
        "30",
        "--seed",
        "7",
    ]);
    let doc = stdout_json(&out);
    let l = doc["plan"]["l_A"].as_f64().unwrap();
    assert!((l - 5.0 * std::f64::consts::SQRT_2 / 8.0).abs() < 1e-12);
    assert!(doc["plan"].get("achieved_num").is_none());
    assert!(doc["report"]["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn infeasible_plan_exits_two() {
    let out = qlgraph(&[
        "construct",
        "--a",
        "0.6",
        "--b",
        "0.8",
        "--n",
        "30",
        "--floor",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("floor"), "constraint must be named: {err}");
}

#[test]
fn verify_reproduces_report_bytes() {
    let dir = tempdir("verify-roundtrip");
    let out = qlgraph(&[
        "construct",
        "--a",
        "0.3",
        "--b",
        "-0.9539392014169457",
        "--n",
        "24",
        "--seed",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report2 = dir.join("report2.json");
    let out = qlgraph(&[
        "verify",
        "--graph",
        dir.join("graph.json").to_str().unwrap(),
        "--plan",
        dir.join("plan.json").to_str().unwrap(),
        "--out",
        report2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let original = std::fs::read(dir.join("report.json")).unwrap();
    let reproduced = std::fs::read(&report2).unwrap();
    assert_eq!(
        original, reproduced,
        "re-ingested graph must verify identically"
    );
}

#[test]
fn runs_are_reproducible_bit_for_bit() {
    let args = [
        "construct",
        "--a",
        "0.6",
        "--b",
        "0.8",
        "--n",
        "16",
        "--seed",
        "9",
    ];
    let first = qlgraph(&args);
    let second = qlgraph(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let changed = qlgraph(&[
        "construct",
        "--a",
        "0.6",
        "--b",
        "0.8",
        "--n",
        "16",
        "--seed",
        "10",
    ]);
    assert_ne!(first.stdout, changed.stdout, "seed must steer the graphs");
}

#[test]
fn gap_closed_forms() {
    let doc = stdout_json(&qlgraph(&["gap", "--min-gap", "1", "--p", "1"]));
    assert_eq!(doc["min_n"].as_f64().unwrap(), 4.0);

    let doc = stdout_json(&qlgraph(&["gap", "--min-gap", "1", "--limit"]));
    let lim = doc["min_regularity"].as_f64().unwrap();
    assert!((lim - (3.0 + 2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
    assert_eq!(lim.ceil(), 6.0);
}

#[test]
fn gap_monte_carlo_table() {
    let doc = stdout_json(&qlgraph(&[
        "gap",
        "--min-gap",
        "1",
        "--n",
        "50",
        "--trials",
        "8",
        "--seed",
        "4",
    ]));
    let trials = &doc["trials"];
    assert_eq!(trials["total"], 8);
    assert_eq!(trials["samples"].as_array().unwrap().len(), 8);
    assert!(trials["passed"].as_u64().unwrap() >= 7);
}

#[test]
fn walk_footnote_values() {
    let doc = stdout_json(&qlgraph(&[
        "walk", "--delta", "0.5", "--n", "40", "--X", "10",
    ]));
    let pi_a = doc["pi_A"].as_f64().unwrap();
    assert_eq!(format!("{pi_a:.4}"), "0.0131");

    let doc = stdout_json(&qlgraph(&[
        "walk", "--delta", "0.5", "--n", "40", "--X", "20",
    ]));
    let pi_a = doc["pi_A"].as_f64().unwrap();
    assert_eq!(format!("{pi_a:.4}"), "0.0128");
}

#[test]
fn walk_asymmetric_matches_closed_form() {
    let doc = stdout_json(&qlgraph(&[
        "walk",
        "--mode",
        "asymmetric",
        "--k",
        "20",
        "--lA",
        "24",
        "--lB",
        "17",
        "--n",
        "30",
    ]));
    let pi_a = doc["pi_A"].as_f64().unwrap();
    let closed = doc["closed_form_pi_A"].as_f64().unwrap();
    assert!((pi_a - closed).abs() <= 1e-10);
    assert!(doc["max_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn walk_csv_has_vertex_rows() {
    let out = qlgraph(&[
        "walk", "--delta", "0.5", "--n", "40", "--X", "10", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertex,block,pi"));
    assert_eq!(text.lines().count(), 81); // header + 2n rows
}

#[test]
fn curves_stay_on_the_circle() {
    let out = qlgraph(&[
        "curves",
        "--branch",
        "delta",
        "--min",
        "-5",
        "--max",
        "5",
        "--samples",
        "101",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    let mut crossover_hits = 0;
    let tau = 0.5 * (2.0 + std::f64::consts::SQRT_2).sqrt();
    for line in text.lines().skip(1) {
        let parts: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((parts[0] * parts[0] + parts[1] * parts[1] - 1.0).abs() <= 1e-12);
        // at ratio ±1 the feasible lines hit the branch-switching
        // intersections |a| = ½√(2+√2)
        if parts[2].abs() == 1.0 {
            let off = (parts[0].abs() - tau)
                .abs()
                .min((parts[1].abs() - tau).abs());
            assert!(off <= 1e-12, "row {line} misses the crossover amplitude");
            crossover_hits += 1;
        }
        rows += 1;
    }
    assert_eq!(rows, 101 * 4);
    assert_eq!(crossover_hits, 8);
}

#[test]
fn curves_delta_c_crossing_at_one() {
    let out = qlgraph(&[
        "curves",
        "--branch",
        "delta_c",
        "--min",
        "0",
        "--max",
        "2",
        "--samples",
        "5",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    // at Δ_C = 1 the feasible lines cross the poles (±1, 0) and (0, ±1)
    let hit = text.lines().skip(1).any(|line| {
        let parts: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        parts[2] == 1.0 && (parts[0].abs() - 1.0).abs() <= 1e-12 && parts[1].abs() <= 1e-12
    });
    assert!(hit, "expected a (±1, 0) row at ratio 1:\n{text}");
}

#[test]
fn twoqubit_reports_findings() {
    let doc = stdout_json(&qlgraph(&[
        "twoqubit", "--n", "8", "--k", "3", "--l", "1", "--j1", "1", "--j2", "1", "--seed", "1",
    ]));
    assert_eq!(doc["all_confirmed_1e9"], false);
    let patterns = doc["patterns"].as_array().unwrap();
    assert_eq!(patterns.len(), 4);
    for p in patterns {
        assert!(p["residual"].as_f64().unwrap() >= 0.0);
        assert!(p["fidelity"].as_f64().unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn spectrum_csv_from_graph_json() {
    let dir = tempdir("spectrum");
    qlgraph(&[
        "construct",
        "--a",
        "0.6",
        "--b",
        "0.8",
        "--n",
        "12",
        "--seed",
        "8",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let out = qlgraph(&[
        "spectrum",
        "--graph",
        dir.join("graph.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,eigenvalue\n"));
    assert_eq!(text.lines().count(), 25); // header + 2n eigenvalues
}

#[test]
fn ratio_input_requires_branch() {
    let out = qlgraph(&["construct", "--ratio", "2.8", "--n", "20"]);
    assert!(!out.status.success());

    let out = qlgraph(&[
        "construct",
        "--ratio",
        "2.8",
        "--branch",
        "delta",
        "--n",
        "20",
        "--seed",
        "6",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["plan"]["branch"], "delta");
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qlgraph-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
