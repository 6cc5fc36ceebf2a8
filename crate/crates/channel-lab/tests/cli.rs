//! End-to-end tests of the `channel-lab` binary against committed fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use channel_lab::report::ReportDocument;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_channel-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_report(args: &[&str]) -> (Output, ReportDocument) {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    full.push("--out".into());
    full.push(out_path.display().to_string());
    let output = Command::new(env!("CARGO_BIN_EXE_channel-lab"))
        .args(&full)
        .output()
        .expect("binary runs");
    let report: ReportDocument = serde_json::from_str(
        &std::fs::read_to_string(&out_path).unwrap_or_else(|_| {
            panic!(
                "no report written; stderr: {}",
                String::from_utf8_lossy(&output.stderr)
            )
        }),
    )
    .unwrap();
    (output, report)
}

#[test]
fn analyze_pauli_fixture() {
    let spec = fixture("pauli.json");
    let (output, report) = run_with_report(&["analyze", "--spec", spec.to_str().unwrap()]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("average purity"));
    let a = report.results.analyze.expect("analyze payload");
    assert_eq!(a.dim, 2);
    assert!(a.unital);
    assert!((a.survey.average_purity - 0.68).abs() <= 1e-12);
    assert!((a.survey.average_fidelity - 0.8).abs() <= 1e-12);
    for lambda in &a.symmetric_spectrum {
        assert!((lambda - 0.68).abs() <= 1e-12);
    }
    assert!((a.full_spectrum[0] - 0.04).abs() <= 1e-12);
    assert!(a.route_deviation <= 1e-10);
    assert!(a.operator_norm <= 1.0 + 1e-9);
    assert_eq!(report.seed, 41);
}

#[test]
fn analyze_numbers_recomputed_by_monte_carlo() {
    // every analytic average in the analyze report is independently
    // reproduced by the montecarlo command within 3 standard errors
    for name in ["pauli.json", "replacement.json", "correlated_uniform.json"] {
        let spec = fixture(name);
        let (_, analyze) = run_with_report(&["analyze", "--spec", spec.to_str().unwrap()]);
        let a = analyze.results.analyze.expect("analyze payload");
        for quantity in ["purity", "fidelity"] {
            let (_, mc) = run_with_report(&[
                "montecarlo",
                "--spec",
                spec.to_str().unwrap(),
                "--quantity",
                quantity,
            ]);
            let m = mc.results.montecarlo.expect("montecarlo payload");
            let analytic = match quantity {
                "purity" => a.survey.average_purity,
                _ => a.survey.average_fidelity,
            };
            assert!((m.analytic - analytic).abs() <= 1e-12);
            let diff = (m.estimate.estimate - analytic).abs();
            if m.estimate.stderr > 1e-14 {
                assert!(
                    diff <= 3.0 * m.estimate.stderr,
                    "{name} {quantity}: diff {diff} stderr {}",
                    m.estimate.stderr
                );
            } else {
                assert!(diff <= 1e-12);
            }
        }
    }
}

#[test]
fn optimize_min_purity_of_uniform_correlated_channel() {
    let spec = fixture("correlated_uniform.json");
    let (output, report) = run_with_report(&[
        "optimize",
        "--spec",
        spec.to_str().unwrap(),
        "--direction",
        "min",
        "--quantity",
        "purity",
    ]);
    assert!(output.status.success());
    let o = report.results.optimize.expect("optimize payload");
    assert!((o.value - 0.25).abs() <= 1e-6, "value {}", o.value);
    assert!(o.oracle.is_none(), "no oracle for d=4");
    assert_eq!(o.restart_values.len(), o.restarts);
}

#[test]
fn optimize_max_flags_dfs_candidates_and_runs_oracle() {
    let spec = fixture("bitflip_mixture.json");
    let (output, report) = run_with_report(&[
        "optimize",
        "--spec",
        spec.to_str().unwrap(),
        "--direction",
        "max",
        "--restarts",
        "8",
    ]);
    assert!(output.status.success());
    let o = report.results.optimize.expect("optimize payload");
    assert!((o.value - 1.0).abs() <= 1e-8);
    assert!(o.dfs_candidate);
    assert_eq!(o.restarts, 8);
    let oracle = o.oracle.expect("qubit channels auto-run the grid oracle");
    assert!((oracle.max_value - 1.0).abs() <= 1e-3);
}

#[test]
fn optimize_fidelity_direction() {
    let spec = fixture("replacement.json");
    let (output, report) = run_with_report(&[
        "optimize",
        "--spec",
        spec.to_str().unwrap(),
        "--direction",
        "max",
        "--quantity",
        "fidelity",
    ]);
    assert!(output.status.success());
    let o = report.results.optimize.expect("optimize payload");
    // |0⟩ is a fixed point of the replacement channel
    assert!((o.value - 1.0).abs() <= 1e-8, "value {}", o.value);
}

#[test]
fn dfs_subspace_fixture_passes() {
    let spec = fixture("dephasing_plus_subspace.json");
    let (output, report) = run_with_report(&["dfs", "--spec", spec.to_str().unwrap()]);
    assert!(output.status.success());
    match report.results.dfs.expect("dfs payload") {
        channel_lab::report::DfsResult::Subspace { is_dfs, .. } => assert!(is_dfs),
        other => panic!("expected subspace mode, got {other:?}"),
    }
}

#[test]
fn qecc_dfs_code_has_unit_purity() {
    let spec = fixture("dfs_code.json");
    let (output, report) = run_with_report(&["qecc", "--spec", spec.to_str().unwrap()]);
    assert!(output.status.success());
    let q = report.results.qecc.expect("qecc payload");
    assert!(q.condition_holds);
    assert!((q.trace_c_squared.unwrap() - 1.0).abs() <= 1e-9);
    for p in &q.codeword_purities {
        assert!((p - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn exit_codes_match_the_documented_matrix() {
    let cases: [(&[&str], i32); 4] = [
        (
            &["analyze", "--spec", &fixture("pauli.json").display().to_string()],
            0,
        ),
        (
            &["analyze", "--spec", &fixture("malformed.json").display().to_string()],
            2,
        ),
        (
            &[
                "analyze",
                "--spec",
                &fixture("trace_decreasing.json").display().to_string(),
            ],
            3,
        ),
        (
            &["qecc", "--spec", &fixture("violated_code.json").display().to_string()],
            4,
        ),
    ];
    for (args, expected) in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(expected),
            "args {args:?}; stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn violated_code_still_writes_a_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_channel-lab"))
        .args(["qecc", "--spec"])
        .arg(fixture("violated_code.json"))
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let report: ReportDocument =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let q = report.results.qecc.expect("qecc payload");
    assert!(!q.condition_holds);
    assert!(q.kl_residual > 0.1);
    assert!(q.trace_c_squared.is_none());
}

#[test]
fn seed_flag_overrides_the_spec_seed() {
    let spec = fixture("pauli.json");
    let (_, report) = run_with_report(&[
        "montecarlo",
        "--spec",
        spec.to_str().unwrap(),
        "--seed",
        "99",
        "--samples",
        "100",
    ]);
    assert_eq!(report.seed, 99);
    let m = report.results.montecarlo.expect("montecarlo payload");
    assert_eq!(m.estimate.samples, 100);
}

#[test]
fn montecarlo_z_scores_stay_small() {
    for quantity in ["purity", "fidelity"] {
        let spec = fixture("replacement.json");
        let (output, report) = run_with_report(&[
            "montecarlo",
            "--spec",
            spec.to_str().unwrap(),
            "--quantity",
            quantity,
        ]);
        assert!(output.status.success());
        let m = report.results.montecarlo.expect("montecarlo payload");
        assert_eq!(m.estimate.samples, 10_000);
        if let Some(z) = m.z_score {
            assert!(z <= 3.0, "{quantity}: z {z}");
        }
    }
}
