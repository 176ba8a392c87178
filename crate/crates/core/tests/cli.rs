use std::fs;
use std::path::{Path, PathBuf};

use photon_core::cli::{
    emit_plot_data, main_with_args, Scenario, GEODESIC_HEADER, H_HEADER, RHO_HEADER, R_HEADER, SLACKS_HEADER,
};
use serde_json::Value;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn run(sub: &str, scenario: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![
        "photon".to_string(),
        sub.to_string(),
        "--scenario".into(),
        scenario.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    main_with_args(args)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn bundled_scenarios_parse() {
    for name in [
        "schwarzschild_m1",
        "schwarzschild_m2",
        "minkowski",
        "negative_mass",
        "reissner_perturbed",
        "r4m_cylinder",
    ] {
        let sc = Scenario::load(&bundled(name)).unwrap();
        assert_eq!(sc.name, name);
        assert_eq!(sc.schema, 1);
    }
}

#[test]
fn detect_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mk");
    assert_eq!(run("run", &bundled("minkowski"), &out, &[]), 1);
    let d = json(&out.join("detect.json"));
    assert!(d["location"].is_null());
    assert_eq!(d["found"], false);
    assert_eq!(d["seed"], 24303);
    let s = json(&out.join("summary.json"));
    assert_eq!((s["exit_code"].as_i64(), s["outcome"].as_str()), (Some(1), Some("false")));

    let out = dir.path().join("neg");
    assert_eq!(run("detect", &bundled("negative_mass"), &out, &[]), 1);
    assert!(json(&out.join("detect.json"))["location"].is_null());

    let out = dir.path().join("m1");
    assert_eq!(run("detect", &bundled("schwarzschild_m1"), &out, &[]), 0);
    let r = json(&out.join("detect.json"))["location"].as_f64().unwrap();
    assert!((r - 3.0).abs() < 1e-12);
}

#[test]
fn certify_refutes_the_r4m_cylinder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    assert_eq!(run("run", &bundled("r4m_cylinder"), &out, &[]), 1);
    let c = json(&out.join("certificate.json"));
    assert_eq!(c["verdict"], "refuted");
    assert_eq!(c["seed"], 24306);
    // the same command on the photon sphere itself certifies
    let out = dir.path().join("ps");
    assert_eq!(run("certify", &bundled("schwarzschild_m1"), &out, &["--seeds", "8"]), 0);
    assert_eq!(json(&out.join("certificate.json"))["verdict"], "certified");
}

#[test]
fn trace_writes_trajectories_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let code = run("trace", &bundled("schwarzschild_m1"), &out, &["--seeds", "4", "--span", "20"]);
    assert_eq!(code, 0);
    let t = json(&out.join("trace.json"));
    assert_eq!(t["trajectories"].as_array().unwrap().len(), 4);
    assert_eq!(t["seed"], 24301);
    for k in 0..4 {
        let csv = fs::read_to_string(out.join(format!("trajectories/seed_{k:03}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("lambda,t,r,theta,phi,vt,vr,vtheta,vphi,null_residual,energy")
        );
        for l in lines {
            let r: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
            assert!((r - 3.0).abs() < 1e-5);
        }
    }
    let g = fs::read_to_string(out.join("geodesic_r_lambda.csv")).unwrap();
    assert!(g.starts_with(&format!("{GEODESIC_HEADER}\n")));
}

#[test]
fn israel_tables_and_flat_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i");
    let code = run(
        "israel",
        &bundled("schwarzschild_m2"),
        &out,
        &["--levels", "12", "--quad", "12x24"],
    );
    assert_eq!(code, 0);
    let rep = json(&out.join("israel.json"));
    assert_eq!(rep["verdict"], "true");
    assert_eq!(rep["seed"], 24302);
    assert!((rep["mass"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    // r(N) passes through the photon sphere: r(1/√3) = 3m
    let rows = csv_rows(&out.join("r_N.csv"));
    assert_eq!(rows.len(), 12);
    assert!((rows[0][0] - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    assert!((rows[0][1] - 6.0).abs() < 1e-10);
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 1e-8 * r[2]);
    }
    for (name, header) in [
        ("slacks_vs_N.csv", SLACKS_HEADER),
        ("rho_N.csv", RHO_HEADER),
        ("H_N.csv", H_HEADER),
    ] {
        let s = fs::read_to_string(out.join(name)).unwrap();
        assert_eq!(s.lines().next(), Some(header));
        assert_eq!(s.lines().count(), 13);
    }
    assert_eq!(fs::read_to_string(out.join("israel_levels.csv")).unwrap().lines().count(), 13);

    let out = dir.path().join("flat");
    assert_eq!(run("israel", &bundled("minkowski"), &out, &[]), 2);
    let rep = json(&out.join("israel.json"));
    assert_eq!(rep["status"], "flat");
    assert_eq!(rep["rigidity"]["verdict"], "rejected");
    let r = fs::read_to_string(out.join("r_N.csv")).unwrap();
    assert_eq!(r, format!("{R_HEADER}\n"));
}

#[test]
fn empty_foliation_tables_are_header_only() {
    let tables = emit_plot_data(None);
    assert_eq!(tables.len(), 4);
    for t in tables {
        assert_eq!(t.contents.lines().count(), 1, "{}", t.name);
    }
}

#[test]
fn non_vacuum_profile_is_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rn");
    assert_eq!(run("run", &bundled("reissner_perturbed"), &out, &["--levels", "12", "--quad", "12x24"]), 1);
    let rep = json(&out.join("israel.json"));
    assert_eq!(rep["verdict"], "false");
    assert_eq!(rep["vacuum"]["vacuum"], false);
    assert!(rep["vacuum"]["scalar_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn reconstruct_from_the_photon_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert_eq!(run("reconstruct", &bundled("schwarzschild_m1"), &out, &[]), 0);
    let rec = json(&out.join("reconstruction.json"));
    assert!((rec["A_ode"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((rec["B_ode"].as_f64().unwrap() + 2.0).abs() < 1e-8);
    assert!(rec["sup_deviation"].as_f64().unwrap() < 1e-8);
    let out = dir.path().join("neg");
    assert_eq!(run("reconstruct", &bundled("negative_mass"), &out, &[]), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &[&str]); 3] = [
        ("full", "schwarzschild_m1", &["--levels", "8", "--quad", "8x16", "--seeds", "6"]),
        ("trace", "schwarzschild_m2", &["--seeds", "3", "--span", "10"]),
        ("certify", "r4m_cylinder", &["--dump-curvature"]),
    ];
    for (sub, name, extra) in cases {
        let a = dir.path().join(format!("{name}_a"));
        let b = dir.path().join(format!("{name}_b"));
        let ca = run(sub, &bundled(name), &a, extra);
        let cb = run(sub, &bundled(name), &b, extra);
        assert_eq!(ca, cb);
        let names: Vec<String> = json(&a.join("summary.json"))["artifacts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        assert!(names.len() > 1);
        for n in names {
            assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{name}/{n}");
        }
    }
}

#[test]
fn malformed_and_referenced_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"schema\": 1,\n  \"name\": \"x\",\n  \"pipeline\": \"detect\",\n  \"profile\": {\"kind\": \"kerr\"}\n}\n").unwrap();
    assert_eq!(run("run", &bad, &dir.path().join("o"), &[]), 2);
    let e = Scenario::load(&bad).unwrap_err();
    assert_eq!(e.line, Some(5));
    assert!(e.message.contains("kerr"));
    assert_eq!(run("run", &dir.path().join("missing.json"), &dir.path().join("o"), &[]), 2);

    // profile_file resolves next to the scenario
    fs::write(dir.path().join("profile.json"), r#"{"kind": "schwarzschild", "m": 0.5}"#).unwrap();
    let sc = dir.path().join("sc.json");
    fs::write(&sc, r#"{"schema": 1, "name": "pf", "pipeline": "detect", "profile_file": "profile.json"}"#).unwrap();
    let out = dir.path().join("pf");
    assert_eq!(run("run", &sc, &out, &[]), 0);
    let r = json(&out.join("detect.json"))["location"].as_f64().unwrap();
    assert!((r - 1.5).abs() < 1e-12);
    fs::remove_file(dir.path().join("profile.json")).unwrap();
    let e = Scenario::load(&sc).unwrap_err();
    assert_eq!(e.field.as_deref(), Some("profile_file"));
    assert_eq!(run("run", &sc, &out, &[]), 2);
}

#[test]
fn expression_errors_are_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("sc.json");
    fs::write(
        &sc,
        r#"{"schema": 1, "name": "e", "pipeline": "detect", "profile": {"kind": "expression", "lapse": "sqrt(1 - 2/r"}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    assert_eq!(run("run", &sc, &out, &[]), 2);
    let s = json(&out.join("summary.json"));
    assert_eq!(s["status"], "parse");
}
