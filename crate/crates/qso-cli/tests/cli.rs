use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qso"))
        .args(args)
        .env_remove("QSO_Q0")
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_so3(dir: &Path, lambda: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("so3_{}.json", lambda.replace('/', "_")));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["so3", "--lambda", lambda, "-o", &p];
    args.extend_from_slice(extra);
    assert_eq!(qso(&args).status.code(), Some(0));
    p
}

#[test]
fn so3_quotient_is_three_dimensional() {
    let o = qso(&["so3", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["dim"], 3);
    let b = v["matrices"].as_object().unwrap();
    assert_eq!(b.len(), 2);
    for m in b.values() {
        let rows = m.as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 3));
    }
}

#[test]
fn verify_accepts_valid_and_rejects_perturbed_modules() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_so3(dir.path(), "1", &[]);
    let o = qso(&["verify", "--input", &p]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );

    let mut v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    v["matrices"]["B2"][0][0] = Value::String("7".into());
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = qso(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&o.stdout).is_empty());
}

#[test]
fn json_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for (lambda, extra) in [
        ("1", vec![]),
        ("3/2", vec!["--symbolic"]),
        ("1", vec!["--ell", "5"]),
    ] {
        let p = write_so3(dir.path(), lambda, &extra);
        let text = fs::read_to_string(&p).unwrap();
        let m = qso_core::quotients::FiniteModule::from_json_str(&text).unwrap();
        assert_eq!(m.to_json_string() + "\n", text, "λ = {lambda} {extra:?}");
    }
}

#[test]
fn environment_overrides_the_default_point() {
    let default = json(&qso(&["so3", "--lambda", "2"]));
    let o = Command::new(env!("CARGO_BIN_EXE_qso"))
        .args(["so3", "--lambda", "2"])
        .env("QSO_Q0", "3")
        .output()
        .unwrap();
    let over = json(&o);
    assert_ne!(default["matrices"], over["matrices"]);
    let flag = json(&qso(&["so3", "--lambda", "2", "--q-rational", "3"]));
    assert_eq!(flag["matrices"], over["matrices"]);
}

#[test]
fn qtorus_decomposes_at_ell_five() {
    let o = qso(&["qtorus", "--n", "3", "--ell", "5", "--decompose"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let mut dims: Vec<u64> = v["decomposition"]["dims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    dims.sort();
    assert_eq!(dims, vec![2, 3]);
    assert!(v["standard_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(qso(&["so3", "--bogus"]).status.code(), Some(64));
    assert_eq!(qso(&[]).status.code(), Some(64));
    assert_eq!(qso(&["--help"]).status.code(), Some(0));
    // not in (1/2)Z
    assert_eq!(qso(&["so3", "--lambda", "1/3"]).status.code(), Some(2));
    // a generic weight is required
    assert_eq!(
        qso(&["baby", "--n", "3", "--ell", "5", "--lambda", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_output() {
    let o = qso(&["so3", "--lambda", "1", "--format", "csv", "--gen", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csv");
    let o = qso(&[
        "so3",
        "--lambda",
        "1",
        "--format",
        "csv",
        "-o",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("m.B1.csv").exists());
    assert!(dir.path().join("m.B2.csv").exists());

    assert_eq!(
        qso(&["so3", "--lambda", "1", "--format", "csv"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        qso(&[
            "so3",
            "--lambda",
            "1",
            "--format",
            "csv",
            "--gen",
            "1",
            "--symbolic"
        ])
        .status
        .code(),
        Some(64)
    );
}

#[test]
fn match_torus_summand_against_quotient() {
    let dir = tempfile::tempdir().unwrap();
    let o = qso(&["qtorus", "--n", "3", "--ell", "4", "--decompose"]);
    let v = json(&o);
    let summands = v["decomposition"]["summands"].as_array().unwrap();
    let q = write_so3(dir.path(), "1", &["--ell", "4"]);
    let mut verdicts = Vec::new();
    for (i, s) in summands.iter().enumerate() {
        let p = dir.path().join(format!("summand{i}.json"));
        fs::write(&p, serde_json::to_string(&s["module"]).unwrap()).unwrap();
        let r = json(&qso(&["match", "--a", p.to_str().unwrap(), "--b", &q]));
        verdicts.push((
            s["dim"].as_u64().unwrap(),
            r["verdict"].as_str().unwrap().to_string(),
        ));
    }
    verdicts.sort();
    assert_eq!(
        verdicts,
        vec![(1, "mismatch".to_string()), (3, "match".to_string())]
    );
}

#[test]
fn verma_abstract_relations_hold() {
    let v = json(&qso(&["verma", "--n", "4", "--truncation", "2"]));
    assert_eq!(v["relations_exact_zero"], true);
    assert_eq!(v["field"], "symbolic");
}
