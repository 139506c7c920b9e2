use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Stdio};

use biaxial::sampling::{pair_with_gap, random_su2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn biaxial(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biaxial"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .env_remove("BIAXIAL_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn biaxial");
    // the binary may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn zx(target: Value) -> String {
    json!({"m": [0.0, 0.0, 1.0], "n": [1.0, 0.0, 0.0], "target": target}).to_string()
}

fn y_pi() -> Value {
    json!({"axis_angle": {"axis": [0.0, 1.0, 0.0], "angle": PI}})
}

#[test]
fn count_examples() {
    let (code, out) = biaxial(&["count"], &zx(json!({"su2": [1.0, 0.0, 0.0, 0.0]})), &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 1);
    assert!(v.get("factors").is_none());

    let (_, out) = biaxial(&["count"], &zx(y_pi()), &[]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 2);

    let d = PI / 3.0;
    // l = m x n = e_y for this pair
    let inst = json!({
        "m": [0.0, 0.0, 1.0],
        "n": [d.sin(), 0.0, d.cos()],
        "target": {"axis_angle": {"axis": [0.0, 1.0, 0.0], "angle": PI}}
    });
    let (_, out) = biaxial(&["count"], &inst.to_string(), &[]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 4);
}

#[test]
fn decompose_examples() {
    let (code, out) = biaxial(&["decompose"], &zx(json!({"su2": [1.0, 0.0, 0.0, 0.0]})), &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["factors"].as_array().unwrap().len(), 1);
    assert_eq!(v["factors"][0]["angle"].as_f64().unwrap(), 0.0);

    let (code, out) = biaxial(&["decompose"], &zx(y_pi()), &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["order"], "right-to-left");
    let f = v["factors"].as_array().unwrap();
    assert_eq!(f.len(), 2);
    assert_eq!(f[0]["axis"], "n");
    assert!((f[0]["angle"].as_f64().unwrap() - PI).abs() < 1e-12);
    assert_eq!(f[1]["axis"], "m");
    assert!((f[1]["angle"].as_f64().unwrap() + PI).abs() < 1e-12);
}

#[test]
fn batch_of_certificates_all_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let items: Vec<Value> = (0..100)
        .map(|_| {
            let delta = rng.random_range(0.2..PI / 2.0);
            let (m, n) = pair_with_gap(&mut rng, delta);
            let u = random_su2(&mut rng);
            json!({"m": m, "n": n, "target": {"su2": u.to_array()}})
        })
        .collect();
    let (code, out) = biaxial(&["decompose"], &Value::Array(items).to_string(), &[]);
    assert_eq!(code, 0);
    let certs: Vec<Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(certs.len(), 100);

    let (code, out) = biaxial(&["verify"], &out, &[]);
    assert_eq!(code, 0, "{out}");
    let reports: Vec<Value> = serde_json::from_str(&out).unwrap();
    assert!(reports.iter().all(|r| r["ok"] == true));
}

#[test]
fn verify_rejects_tampering_and_bad_json() {
    let (_, cert) = biaxial(&["decompose"], &zx(y_pi()), &[]);
    assert_eq!(biaxial(&["verify"], &cert, &[]).0, 0);

    let mut v: Value = serde_json::from_str(&cert).unwrap();
    v["factors"][0]["angle"] = json!(PI + 1e-3);
    assert_ne!(biaxial(&["verify"], &v.to_string(), &[]).0, 0);

    assert_eq!(biaxial(&["verify"], "{\"m\": [0, 0", &[]).0, 2);
}

#[test]
fn exit_codes_for_bad_instances() {
    let par = json!({"m": [0.0, 0.0, 1.0], "n": [0.0, 0.0, -1.0], "target": {"su2": [1.0, 0.0, 0.0, 0.0]}});
    assert_eq!(biaxial(&["decompose"], &par.to_string(), &[]).0, 3);
    let bad = zx(json!({"su2": [1.0, 1.0, 0.0, 0.0]}));
    assert_eq!(biaxial(&["count"], &bad, &[]).0, 2);
    assert_eq!(biaxial(&["count"], "[1, 2", &[]).0, 2);
    assert_eq!(biaxial(&["count", "--tol", "abc"], &zx(y_pi()), &[]).0, 2);
}

#[test]
fn tolerance_override() {
    let slightly_off = zx(json!({"su2": [1.0 + 1e-7, 0.0, 0.0, 0.0]}));
    assert_eq!(biaxial(&["count"], &slightly_off, &[]).0, 2);
    assert_eq!(biaxial(&["count"], &slightly_off, &[("BIAXIAL_TOL", "1e-6")]).0, 0);
    assert_eq!(biaxial(&["count", "--tol", "1e-6"], &slightly_off, &[]).0, 0);
    assert_eq!(
        biaxial(&["count", "--tol", "1e-12"], &slightly_off, &[("BIAXIAL_TOL", "1e-6")]).0,
        2
    );
}

#[test]
fn worst_case_counts() {
    for (delta, want) in [(PI / 2.0, 3), (PI / 3.0, 4), (PI / 4.0, 5)] {
        let axes = json!({"m": [0.0, 0.0, 1.0], "n": [delta.sin(), 0.0, delta.cos()]});
        let (code, out) = biaxial(&["worst-case"], &axes.to_string(), &[]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], want);
        assert_eq!(v["lift"], "witness");
        assert_eq!(biaxial(&["verify"], &out, &[]).0, 0);
    }
}

#[test]
fn file_io_and_trim() {
    let dir = std::env::temp_dir().join(format!("biaxial-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("in.json");
    let output = dir.join("out.json");
    std::fs::write(&input, zx(json!({"euler_zyz": [0.0, 0.4, 0.0]}))).unwrap();
    let (code, _) = biaxial(
        &[
            "decompose",
            "--trim",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
        ],
        "",
        &[],
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["trimmed"], true);
    assert!(v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .all(|f| f["angle"].as_f64().unwrap() != 0.0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_examples_are_deterministic() {
    let d = PI / 3.0;
    let cases = [
        zx(json!({"su2": [1.0, 0.0, 0.0, 0.0]})),
        zx(y_pi()),
        json!({
            "m": [0.0, 0.0, 1.0],
            "n": [d.sin(), 0.0, d.cos()],
            "target": {"axis_angle": {"axis": [0.0, 1.0, 0.0], "angle": PI}}
        })
        .to_string(),
    ];
    for c in &cases {
        let a = biaxial(&["oracle", "--starts", "32", "--seed", "9"], c, &[]);
        assert_eq!(a.0, 0, "{}", a.1);
        let b = biaxial(&["oracle", "--starts", "32", "--seed", "9"], c, &[]);
        assert_eq!(a, b);
    }
}
