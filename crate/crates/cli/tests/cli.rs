use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tailmean::genmean::{MeanLadder, MultiplierSeries, Theorem31Report};
use tailmean::maxent::MaxEntSolution;
use tailmean::spectral::{BridgeReport, SpectralReport};

const BIN: &str = env!("CARGO_BIN_EXE_tailmean");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn examples() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("examples");
    let out = run(&["--emit-examples", "--out", ex.to_str().unwrap()]);
    assert!(out.status.success());
    (dir, ex)
}

fn analyze(sub: &[&str], input: &Path, out: &Path) -> (i32, Value) {
    let mut args = sub.to_vec();
    args.extend(["--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let o = run(&args);
    let code = o.status.code().unwrap();
    assert!(code == 0 || code == 2, "{}", String::from_utf8_lossy(&o.stdout));
    let report = std::fs::read_to_string(out.join(format!("{}.json", sub[0]))).unwrap();
    (code, serde_json::from_str(&report).unwrap())
}

fn results<T: serde::de::DeserializeOwned>(report: &Value) -> T {
    serde_json::from_value(report["results"].clone()).expect("results parse under the strict schema")
}

fn csv_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

#[test]
fn classify_cases_from_example_documents() {
    let (dir, ex) = examples();
    let expected = [
        ("measure_comb_ex1.json", "I"),
        ("measure_comb_ex2.json", "II"),
        ("measure_comb_ex4.json", "IV"),
        ("measure_negated_comb_ex4.json", "V"),
        ("measure_cauchy.json", "III_finite"),
        ("measure_gaussian.json", "III_finite"),
        ("measure_power_tail.json", "III_plus_inf"),
        ("measure_negated_power_tail.json", "III_minus_inf"),
    ];
    for (i, (doc, case)) in expected.iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let (code, report) = analyze(&["classify"], &ex.join(doc), &out);
        assert_eq!(code, 0, "{doc}");
        let r: Theorem31Report = results(&report);
        assert_eq!(r.case.as_str(), *case, "{doc}");
        assert_eq!(report["config"]["seed"], 0);
    }
}

#[test]
fn classify_series_follow_the_csv_contract() {
    let (dir, ex) = examples();
    let out = dir.path().join("c");
    let o = run(&[
        "classify",
        "--input",
        ex.join("measure_comb_ex1.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--schedule",
        "1.5,1.5,30",
        "--c-grid",
        "-3,-1,0,1,3",
    ]);
    assert!(o.status.success());
    for i in 0..5 {
        let lines = csv_lines(&out.join(format!("scan_{i}.csv")));
        assert_eq!(lines[0], "k,M,partial_mean,window_mass");
        assert_eq!(lines.len(), 31);
    }
    assert!(!out.join("scan_5.csv").exists());
}

#[test]
fn cauchy_weak_mean_ladder() {
    let (dir, ex) = examples();
    let out = dir.path().join("w");
    let (code, report) = analyze(&["weakmean"], &ex.join("measure_cauchy.json"), &out);
    assert_eq!(code, 0);
    let ladder: MeanLadder = results(&report);
    assert_eq!(report["results"]["ordinary"]["kind"], "absent");
    assert_eq!(report["results"]["weak"]["kind"], "absent");
    assert!(ladder.doubly_weak.finite().unwrap().abs() <= 1e-6);
    let tail = csv_lines(&out.join("tail_curve.csv"));
    assert_eq!(tail[0], "n,n_tail");
    assert_eq!(tail.len(), ladder.tail_curve.len() + 1);
    let sym = csv_lines(&out.join("symmetric_scan.csv"));
    assert_eq!(sym[0], "k,M,partial_mean,window_mass");
    assert_eq!(
        sym.len(),
        report["config"]["schedule"]["count"].as_u64().unwrap() as usize + 1
    );
}

#[test]
fn multiplier_series_and_soft_exit() {
    let (dir, ex) = examples();
    let cauchy = ex.join("measure_cauchy.json");
    let out = dir.path().join("m");
    let (code, report) = analyze(&["multiplier", "--c-grid", "-2,0,1,3"], &cauchy, &out);
    assert_eq!(code, 0);
    let series: Vec<MultiplierSeries> = results(&report);
    for (s, c) in series.iter().zip([-2.0, 0.0, 1.0, 3.0]) {
        assert!((s.classification.verdict.value().unwrap() - c).abs() < 1e-2);
    }
    let lines = csv_lines(&out.join("multiplier_0.csv"));
    assert_eq!(lines[0], "k,lambda,value,weight");
    assert_eq!(lines.len(), series[0].points.len() + 1);

    // too short a schedule to settle: the run still succeeds but exits 2
    let out = dir.path().join("short");
    let (code, report) = analyze(
        &["multiplier", "--c-grid", "1", "--lambda-schedule", "0.5,0.5,16"],
        &cauchy,
        &out,
    );
    assert_eq!(code, 2);
    assert!(!report["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn maxent_documents() {
    let (dir, ex) = examples();
    let (code, report) = analyze(&["maxent"], &ex.join("maxent_uniform6.json"), &dir.path().join("u"));
    assert_eq!(code, 0);
    let sol: MaxEntSolution = results(&report);
    assert!(sol.p.probs().iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-12));
    assert!((sol.entropy - 6f64.log2()).abs() < 1e-10);

    let o = run(&[
        "maxent",
        "--input",
        ex.join("maxent_die_infeasible.json").to_str().unwrap(),
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(err["error"]["kind"], "infeasible");
}

#[test]
fn spectral_documents() {
    let (dir, ex) = examples();
    let (_, report) = analyze(&["spectral"], &ex.join("spectral_pauli_y.json"), &dir.path().join("p"));
    let r: SpectralReport = results(&report);
    assert!((r.qm_mean - 1.0).abs() < 1e-12);
    assert!(r.qm_variance.abs() < 1e-12);

    let (_, report) = analyze(
        &["spectral"],
        &ex.join("bridge_power_law_3.json"),
        &dir.path().join("b"),
    );
    let b: BridgeReport = results(&report);
    assert!(b.mean_exists && !b.variance_exists);
    let (_, report) = analyze(
        &["spectral"],
        &ex.join("bridge_signed_dyadic.json"),
        &dir.path().join("d"),
    );
    let b: BridgeReport = results(&report);
    assert!(!b.flags.in_dom_e && !b.flags.in_dom_f);
}

#[test]
fn axioms_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["axioms", "--trials", "500", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("axioms.json")).unwrap()).unwrap();
    let reports = report["results"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 18);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| r["statistic"]["name"] == "median" && r["passed"] == false)
        .map(|r| r["axiom"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"COND") && failed.contains(&"ADD"), "{failed:?}");
    assert!(reports
        .iter()
        .filter(|r| r["statistic"]["name"] == "mean")
        .all(|r| r["passed"] == true));
}

#[test]
fn identical_seeds_reproduce_artifacts() {
    let (dir, ex) = examples();
    let gaussian = ex.join("measure_gaussian.json");
    let args = [
        "lln",
        "--ns",
        "10,100",
        "--replications",
        "100",
        "--stride",
        "10",
        "--stability-replications",
        "1000",
    ];
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "11"]);
    let (_, a) = analyze(&seeded, &gaussian, &dir.path().join("a"));
    let (_, b) = analyze(&seeded, &gaussian, &dir.path().join("b"));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["config"]["seed"], 11);
    let traj = |d: &str| std::fs::read(dir.path().join(d).join("trajectory.csv")).unwrap();
    assert_eq!(traj("a"), traj("b"));
    assert_eq!(csv_lines(&dir.path().join("a/trajectory.csv"))[0], "n,running_mean");

    let mut other = args.to_vec();
    other.extend(["--seed", "12"]);
    let (_, c) = analyze(&other, &gaussian, &dir.path().join("c"));
    assert_ne!(a["results"], c["results"]);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"measure": {"family": "cauchy", "loc": 0.0, "scale": 1.0, "extra": 2}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let cases: [(&[&str], &str); 3] = [
        (&["classify", "--input", bad.to_str().unwrap()], "schema"),
        (&["classify", "--tol", "bogus=1"], "usage"),
        (&["classify", "--schedule", "1,0.5,10"], "usage"),
    ];
    for (args, kind) in cases {
        let mut args = args.to_vec();
        args.extend(["--out", out.to_str().unwrap()]);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(err["error"]["kind"], kind, "{args:?}");
    }
    assert!(!out.join("classify.json").exists());
}

#[test]
fn tolerance_overrides_are_echoed() {
    let (dir, ex) = examples();
    let out = dir.path().join("t");
    let (_, report) = analyze(
        &["classify", "--tol", "window=6", "--tol", "abs_tol=1e-11"],
        &ex.join("measure_comb_ex1.json"),
        &out,
    );
    assert_eq!(report["config"]["policies"]["verdict"]["window"], 6);
    assert_eq!(report["config"]["policies"]["quadrature"]["abs_tol"], 1e-11);
}
