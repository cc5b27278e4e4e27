use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/models").join(format!("{name}.model"))
}

fn liekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liekit"))
        .args(args)
        .env_remove("LIEKIT_SEED")
        .env_remove("LIEKIT_OUT")
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn statuses(json: &str) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["records"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap().to_string()).collect()
}

#[test]
fn ex1_triple_passes() {
    let out = liekit(&["triple", "--model", model("ex1").to_str().unwrap(), "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = statuses(&String::from_utf8(out.stdout).unwrap());
    assert!(!s.is_empty());
    assert!(s.iter().all(|x| x == "PASS"));
}

#[test]
fn ex2_b1_triple_has_one_open_region() {
    let out = liekit(&["triple", "--model", model("ex2_b1").to_str().unwrap(), "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let s = statuses(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(s.iter().filter(|x| *x == "UNRESOLVED").count(), 1);
    assert!(s.iter().all(|x| x != "FAIL"));
}

#[test]
fn malformed_algebra_is_an_input_error() {
    let path = scratch("bad.txt");
    std::fs::write(&path, "basis e1 e2\nbracket [e1,e9] = e2\n").unwrap();
    let out = liekit(&["jacobi", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("e9"));
}

#[test]
fn broken_jacobi_exits_one() {
    let path = scratch("mutated.txt");
    std::fs::write(
        &path,
        "basis d e1 e2 e5\nparam b = 2\nbracket [e1,e2] = e5\nbracket [d,e2] = e2\nbracket [d,e5] = b*e5\n",
    )
    .unwrap();
    let out = liekit(&["jacobi", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"FAIL\""));
    assert!(text.contains("e5"));
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for p in [&a, &b] {
        let out = liekit(&[
            "duflo-pair",
            "--model",
            model("ex2_b0").to_str().unwrap(),
            "--samples",
            "10",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_liekit"))
        .args(["coadjoint"])
        .env("LIEKIT_MODEL", model("ex1"))
        .env("LIEKIT_SAMPLES", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["measured"]["samples"], 3.0);
}

#[test]
fn witness_csv() {
    let csv = scratch("w.csv");
    let out = liekit(&[
        "witness",
        "--model",
        model("ex1").to_str().unwrap(),
        "--point",
        "e0 = 1, e1 = 2, e6 = 1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 52);
    let last: f64 = text.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(last <= 1e-6);
}

#[test]
fn kernel_reports_slope() {
    let out = liekit(&["kernel", "--grid", "4096", "--extent", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = v["records"][0]["measured"]["slope"].as_f64().unwrap();
    assert!(slope < -1.0 && slope > -2.5, "{slope}");
}
