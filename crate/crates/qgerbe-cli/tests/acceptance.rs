//! CLI acceptance: determinism of JSON outputs plus the exit-code
//! contract of every subcommand.

use std::process::{Command, Output};

fn qgerbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgerbe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verdict(n: usize, title: &str, pass: bool) {
    println!("criterion {n} ({title}): {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({title}) failed");
}

#[test]
fn criterion_10_determinism() {
    let t1 = qgerbe(&["tangent", "--atlas", "synthetic_conformal", "--samples", "5", "--seed", "11"]);
    let t2 = qgerbe(&["tangent", "--atlas", "synthetic_conformal", "--samples", "5", "--seed", "11"]);
    let tangent_ok =
        t1.status.success() && t2.status.success() && !t1.stdout.is_empty() && t1.stdout == t2.stdout;

    let s1 = qgerbe(&["selftest", "--seed", "11"]);
    let s2 = qgerbe(&["selftest", "--seed", "11"]);
    let selftest_ok =
        s1.status.success() && s2.status.success() && !s1.stdout.is_empty() && s1.stdout == s2.stdout;

    verdict(10, "CLI determinism", tangent_ok && selftest_ok);
}

#[test]
fn factorize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let id = dir.path().join("id.json");
    std::fs::write(&id, "[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]").unwrap();
    let out = qgerbe(&["factorize", id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["p"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(v["q"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(v["lambda"], serde_json::json!(1.0));

    let shear = dir.path().join("shear.json");
    std::fs::write(&shear, "[1,0.5,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]").unwrap();
    let out = qgerbe(&["factorize", shear.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no JSON on the failure path");

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    let out = qgerbe(&["factorize", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_cocycle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cc = dir.path().join("cocycle.json");

    let gen = qgerbe(&[
        "tangent",
        "--atlas",
        "affine",
        "--samples",
        "4",
        "--seed",
        "3",
        "--out",
        cc.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let out = qgerbe(&["check-cocycle", cc.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));

    // corrupt one morphism-level field value: verification must fail
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cc).unwrap()).unwrap();
    let field = doc["fields"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|f| f["kind"] == "Q")
        .expect("a triple-level field exists");
    field["values"][0] = serde_json::json!([5.0, 3.0, -2.0, 1.0]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = qgerbe(&["check-cocycle", bad.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(false));
    assert!(report["worst"]["residual"].as_f64().unwrap() > 1e-8);

    let out = qgerbe(&["check-cocycle", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tangent_unknown_atlas_and_vacuous_stereo() {
    let out = qgerbe(&["tangent", "--atlas", "moebius"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cc = dir.path().join("stereo.json");
    let out = qgerbe(&[
        "tangent",
        "--atlas",
        "s4_stereo",
        "--samples",
        "6",
        "--seed",
        "1",
        "--out",
        cc.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = qgerbe(&["check-cocycle", cc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["vacuous"], serde_json::json!(true));
}

#[test]
fn selftest_exit_and_filter() {
    let out = qgerbe(&["selftest", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["failed"], serde_json::json!(0));

    let out = qgerbe(&["selftest", "--filter", "algebra/"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in summary["results"].as_array().unwrap() {
        assert_eq!(r["suite"], serde_json::json!("algebra"));
    }

    let out = qgerbe(&["selftest", "--inject-failure"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_precedence_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();

    // unknown keys are rejected
    let bad_cfg = dir.path().join("bad.json");
    std::fs::write(&bad_cfg, r#"{"tol": 1e-9, "bogus": 1}"#).unwrap();
    let out = qgerbe(&["selftest", "--config", bad_cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // file value is used when no flag overrides it: a strict tolerance
    // from the config makes a sheared matrix check fail, and the flag
    // wins over the file when both are present
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tol": 1e-12}"#).unwrap();
    let near = dir.path().join("near.json");
    std::fs::write(&near, "[1,1e-6,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]").unwrap();
    let out = qgerbe(&["factorize", near.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "config tol 1e-12 rejects");
    let out = qgerbe(&[
        "factorize",
        near.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--tol",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0), "flag tol overrides config");
}

#[test]
fn schema_flag_and_stdout_purity() {
    let out = qgerbe(&["--schema"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("cocycle").is_some());
    assert!(v.get("atlas").is_some());

    // every successful stdout is a single JSON document
    let out = qgerbe(&["tangent", "--atlas", "torus_identity", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let _: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
}

#[test]
fn qg_threads_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_qgerbe"))
        .args(["selftest", "--seed", "5", "--filter", "gerbe/"])
        .env("QG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let single = out.stdout;
    let out = qgerbe(&["selftest", "--seed", "5", "--filter", "gerbe/"]);
    assert_eq!(out.stdout, single, "thread cap must not change results");
}
