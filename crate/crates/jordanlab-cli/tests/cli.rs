use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn jordanlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jordanlab")).args(args).env_remove("JORDANLAB_SEED").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn zoo_commands() {
    let o = jordanlab(&["zoo", "list"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["registry"].as_array().unwrap().iter().any(|v| v == "albert"));
    assert_eq!(code(&jordanlab(&["zoo", "export", "matrix:1"])), 2);
    assert_eq!(code(&jordanlab(&["zoo", "export", "octonions"])), 2);
    assert_eq!(code(&jordanlab(&["zoo", "export", "matrix:2", "--out", "/nonexistent/dir/m.json"])), 3);
    let o = jordanlab(&["zoo", "export", "albert"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["dim"], 27);
}

#[test]
fn kit_commands() {
    let o = jordanlab(&["kit", "build", "--algebra", "matrix:3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["kit"]["E2"].is_object());
    assert!(v["report"]["records"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    let o = jordanlab(&["kit", "build", "--algebra", "spin:4"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["kit"]["E2"].is_null());
    assert_eq!(code(&jordanlab(&["kit", "build", "--algebra", "matrix:2⊕scalar"])), 4);
    assert_eq!(code(&jordanlab(&["kit", "build", "--algebra", "nope"])), 2);
}

#[test]
fn verify_commands() {
    assert_eq!(code(&jordanlab(&["verify", "nope"])), 2);
    let o = jordanlab(&["verify", "negative_controls"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let records = v["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["expected_failure"] == true && r["pass"] == true));
    let o = jordanlab(&["verify", "topping", "--trials", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&jordanlab(&["verify", "kits", "--tol", "-1"])), 2);
    assert_eq!(code(&jordanlab(&["verify", "kits", "--trials", "0"])), 2);
}

#[test]
fn verify_output_is_byte_identical_and_honors_seed_sources() {
    let a = jordanlab(&["verify", "spin_commutant", "--trials", "5", "--seed", "3"]);
    let b = jordanlab(&["verify", "spin_commutant", "--seed", "3", "--trials", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_jordanlab"))
        .args(["verify", "spin_commutant", "--trials", "5"])
        .env("JORDANLAB_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_jordanlab"))
        .args(["verify", "spin_commutant", "--trials", "5", "--seed", "4"])
        .env("JORDANLAB_SEED", "3")
        .output()
        .unwrap();
    assert_ne!(flag_wins.stdout, a.stdout);
    let md = jordanlab(&["verify", "spin_commutant", "--trials", "5", "--format", "md"]);
    assert!(String::from_utf8(md.stdout).unwrap().starts_with("# Suite `spin_commutant`"));
}

#[test]
fn verify_all_with_seed_7() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "all.json");
    let o = jordanlab(&["verify", "all", "--seed", "7", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["suite"], "all");
    assert_eq!(v["config"]["master_seed"], 7);
    let records = v["records"].as_array().unwrap();
    for suite in jordanlab::genverify::SUITES {
        assert!(records.iter().any(|r| r["check_name"].as_str().unwrap().starts_with(&format!("{suite}/"))), "{suite}");
    }
}

#[test]
fn decompose_identity_on_matrix3() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "id.json");
    let mut data = Vec::new();
    for r in 0..9 {
        for c in 0..9 {
            data.push(if r == c { [1.0, 0.0] } else { [0.0, 0.0] });
        }
    }
    let op = serde_json::json!({"algebra": "matrix:3", "matrix": {"rows": 9, "cols": 9, "data": data}});
    std::fs::write(&input, op.to_string()).unwrap();
    let o = jordanlab(&["decompose", "linear", "--algebra", "matrix:3", "--input", &input]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let lambda = v["decomposition"]["lambda"].as_array().unwrap();
    let unit = [1, 0, 0, 0, 1, 0, 0, 0, 1];
    for (k, z) in lambda.iter().enumerate() {
        assert!((z[0].as_f64().unwrap() - unit[k] as f64).abs() < 1e-12 && z[1].as_f64().unwrap().abs() < 1e-12);
    }
    let mu = v["decomposition"]["mu"]["data"].as_array().unwrap();
    assert!(mu.iter().all(|z| z[0].as_f64().unwrap().abs() < 1e-12 && z[1].as_f64().unwrap().abs() < 1e-12));
    let trace = jordanlab(&["decompose", "linear", "--algebra", "matrix:2", "--input", &input]);
    assert_eq!(code(&trace), 3);
}

#[test]
fn decompose_generated_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "p.json");
    assert_eq!(code(&jordanlab(&["gen", "preserver", "--algebra", "matrix:3", "--seed", "2", "--out", &p])), 0);
    let o = jordanlab(&["decompose", "preserver", "--input", &p]);
    assert_eq!(code(&o), 0);
    let got = json(&o)["decomposition"]["J"]["data"].clone();
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    for (g, w) in got.as_array().unwrap().iter().zip(want["params"]["J"]["data"].as_array().unwrap()) {
        assert!((g[0].as_f64().unwrap() - w[0].as_f64().unwrap()).abs() < 1e-8);
        assert!((g[1].as_f64().unwrap() - w[1].as_f64().unwrap()).abs() < 1e-8);
    }

    let k = path(dir.path(), "kit.json");
    let built = jordanlab(&["kit", "build", "--algebra", "matrix:3", "--variant", "alternative"]);
    std::fs::write(&k, json(&built)["kit"].to_string()).unwrap();
    assert_eq!(code(&jordanlab(&["decompose", "preserver", "--input", &p, "--kit", &k])), 0);

    let s = path(dir.path(), "s.json");
    assert_eq!(code(&jordanlab(&["gen", "adversarial", "--kind", "spin_generic_bijection", "--algebra", "spin:4", "--out", &s])), 0);
    let o = jordanlab(&["decompose", "preserver", "--input", &s, "--mode", "spin-bypass"]);
    assert_eq!(code(&o), 7);
    assert_eq!(json(&o)["error"], "JNotMultiplicative");
    assert_eq!(code(&jordanlab(&["decompose", "preserver", "--input", &s])), 4);

    let n = path(dir.path(), "n.json");
    assert_eq!(code(&jordanlab(&["gen", "adversarial", "--kind", "non_associating", "--algebra", "matrix:3", "--out", &n])), 0);
    let o = jordanlab(&["decompose", "linear", "--input", &n]);
    assert_eq!(code(&o), 6);
    assert_eq!(json(&o)["error"], "NotAssociating");

    let t = path(dir.path(), "t.json");
    assert_eq!(code(&jordanlab(&["gen", "trace", "--algebra", "spin:4", "--out", &t])), 0);
    let o = jordanlab(&["decompose", "trace", "--input", &t]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["decomposition"]["lambda"].as_array().unwrap().iter().all(|z| z[0].as_f64().unwrap().abs() <= 1e-10));
    assert_eq!(code(&jordanlab(&["gen", "adversarial", "--kind", "nope", "--algebra", "spin:4"])), 2);
}

#[test]
fn singular_preserver_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "zero.json");
    let op = serde_json::json!({"algebra": "matrix:3", "matrix": {"rows": 9, "cols": 9, "data": vec![[0.0, 0.0]; 81]}});
    std::fs::write(&input, op.to_string()).unwrap();
    let o = jordanlab(&["decompose", "preserver", "--input", &input]);
    assert_eq!(code(&o), 6);
    assert_eq!(json(&o)["error"], "NotBijective");
}
