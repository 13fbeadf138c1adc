use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extremal-rays"))
        .arg("run")
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("EXTREMAL_RAYS_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn square_modulus_is_one() {
    let t = tempfile::tempdir().unwrap();
    let out = run(
        t.path(),
        &[
            "modulus",
            "--builtin",
            "square",
            "--e",
            "left",
            "--f",
            "right",
            "--h",
            "1/128",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&t.path().join("modulus.json"));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let meta = json(&t.path().join("metadata.json"));
    assert_eq!(meta["status"], "ok");
    assert!(meta["started_unix"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(
        run(t.path(), &["modulus", "--builtin", "nowhere"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(
            t.path(),
            &["modulus", "--builtin", "square", "--e", "middle"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(t.path(), &["modulus", "--builtin", "square", "--h", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(
            t.path(),
            &["ray", "--builtin", "square", "--eps", "1/4,1/2"]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(run(t.path(), &["modulus"]).status.code(), Some(2));
}

#[test]
fn resolution_error_exits_one() {
    let t = tempfile::tempdir().unwrap();
    let out = run(
        t.path(),
        &["modulus", "--builtin", "comb", "--kmax", "3", "--h", "1/16"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn lshape_ray_converges() {
    let t = tempfile::tempdir().unwrap();
    let out = run(
        t.path(),
        &["ray", "--builtin", "lshape", "--eps", "2^-1..2^-8", "--svg"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(t.path().join("convergence.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let gap: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!(gap < 0.05);
    assert_eq!(csv.lines().count(), 9);
    assert!(t.path().join("convergence.svg").exists());
}

#[test]
fn comb_certificate_and_config_file() {
    let t = tempfile::tempdir().unwrap();
    let cfg = t.path().join("comb.toml");
    fs::write(&cfg, "kind = \"comb-certify\"\nkmax = 2\nh = \"1/128\"\n").unwrap();
    let out = run(t.path(), &["--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&t.path().join("certificate.json"));
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["pass"] == true));
    assert_eq!(recs[1]["d_val"].as_f64(), Some(0.25));

    fs::write(&cfg, "kind = \"comb-certify\"\nkmax = 2\nbogus = 1\n").unwrap();
    assert_eq!(
        run(t.path(), &["--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reruns_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "lamination",
        "--qd",
        "1,0,0.3",
        "--samples",
        "48",
        "--seed",
        "7",
    ];
    assert!(run(a.path(), &args).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_extremal-rays"))
        .arg("run")
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("EXTREMAL_RAYS_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let read = |d: &Path| fs::read(d.join("lamination.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(json(&b.path().join("metadata.json"))["threads"], 1);
}

#[test]
fn trace_and_gap_outputs() {
    let t = tempfile::tempdir().unwrap();
    let out = run(
        t.path(),
        &["trajectory", "--qd", "1", "--z0", "0.2+0.1i", "--svg"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(t.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y\n"));
    // Vertical leaves of dz² are vertical chords.
    for line in csv.lines().skip(1) {
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((x - 0.2).abs() < 1e-8);
    }
    assert!(run(t.path(), &["liouville-gap", "--moduli", "2,8"])
        .status
        .success());
    let gap = fs::read_to_string(t.path().join("liouville_gap.csv")).unwrap();
    let last: f64 = gap
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!(last.abs() < 0.01);
}
