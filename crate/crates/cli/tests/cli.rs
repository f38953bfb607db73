use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn oscquad(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oscquad"));
    cmd.args(args)
        .env_remove("OSC_EPS_SVD")
        .env_remove("OSC_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn domain(dir: &TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.tri"));
    let out = oscquad(&["gen-domain", name, "--out", path.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Parses the single data row after the header.
fn row(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "{}", text(&out.stderr));
    let t = text(&out.stdout);
    let mut lines = t.lines();
    lines.next().expect("header");
    lines
        .next()
        .expect("row")
        .split(',')
        .map(String::from)
        .collect()
}

#[test]
fn integrate_unit_square_area() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "unitsquare");
    let r = row(&oscquad(
        &[
            "integrate",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omega",
            "0",
            "--dir",
            "1,0",
        ],
        &[],
    ));
    let (re, im): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
    assert!((re - 1.0).abs() <= 1e-13 && im.abs() <= 1e-13, "{re} {im}");
}

#[test]
fn integrate_reference_triangle_closed_form() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let r = row(&oscquad(
        &[
            "integrate",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omega",
            "1000",
            "--dir",
            "1,0",
        ],
        &[],
    ));
    // (e^{iω} − 1 − iω)/(iω)² at ω = 1000
    let w = 1000.0f64;
    let (re, im) = ((1.0 - w.cos()) / (w * w), (w - w.sin()) / (w * w));
    assert!((r[1].parse::<f64>().unwrap() - re).abs() <= 1e-10);
    assert!((r[2].parse::<f64>().unwrap() - im).abs() <= 1e-10);
}

#[test]
fn missing_mesh_names_path() {
    let out = oscquad(
        &[
            "integrate",
            "--mesh",
            "/nonexistent/m.tri",
            "--integrand",
            "planewave",
            "--omega",
            "1",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("/nonexistent/m.tri"));
}

#[test]
fn helmholtz_needs_positive_frequency() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "resonance");
    let out = oscquad(
        &[
            "integrate",
            "--mesh",
            s(&mesh),
            "--integrand",
            "helmholtz",
            "--omega",
            "0",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nonconvergence_exit_code() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "unitsquare");
    let args = [
        "integrate",
        "--mesh",
        s(&mesh),
        "--integrand",
        "quadratic",
        "--center",
        "0.3,0.4",
        "--omega",
        "1000",
        "--set",
        "max_depth=1",
    ];
    let out = oscquad(&args, &[]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
}

#[test]
fn planewave_sweep_leaf_count_constant() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let out = oscquad(
        &[
            "sweep",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omegas",
            "1e2,1e3,1e4,1e5",
        ],
        &[],
    );
    let t = text(&out.stdout);
    let leaves: Vec<&str> = t
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(7).unwrap())
        .collect();
    assert_eq!(leaves.len(), 4);
    assert!(leaves.iter().all(|l| *l == leaves[0]), "{leaves:?}");
}

#[test]
fn helmholtz_sweep_against_reference() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "resonance");
    let out = oscquad(
        &[
            "sweep",
            "--mesh",
            s(&mesh),
            "--integrand",
            "helmholtz",
            "--omegas",
            "100",
            "--oracle",
        ],
        &[],
    );
    let r = row(&out);
    assert!(r[5].parse::<f64>().unwrap() <= 1e-8, "{r:?}");
    assert_eq!(r[10], "ok");
}

#[test]
fn oracle_skipped_above_limit() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let out = oscquad(
        &[
            "sweep",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omegas",
            "2000",
            "--oracle",
            "--set",
            "oracle_max_omega=1000",
        ],
        &[],
    );
    let r = row(&out);
    assert_eq!((r[3].as_str(), r[4].as_str(), r[5].as_str()), ("", "", ""));
}

#[test]
fn empty_frequency_list() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let out = oscquad(
        &[
            "sweep",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omegas",
            "",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "resonance");
    let args = [
        "sweep",
        "--mesh",
        s(&mesh),
        "--integrand",
        "radial",
        "--omega-range",
        "10:1000:2",
        "--no-timing",
    ];
    let a = oscquad(&args, &[("OSC_THREADS", "1")]);
    let b = oscquad(&args, &[("OSC_THREADS", "3")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(text(&a.stdout).lines().count(), 6);
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let cfg = dir.path().join("solver.cfg");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let base = [
        "integrate",
        "--mesh",
        s(&mesh),
        "--integrand",
        "planewave",
        "--omega",
        "10",
    ];
    let out = oscquad(&[&base[..], &["--config", s(&cfg)]].concat(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("bogus"));
    std::fs::write(&cfg, "k = 6\n").unwrap();
    let out = oscquad(
        &[&base[..], &["--config", s(&cfg), "--set", "l=8"]].concat(),
        &[],
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
}

#[test]
fn output_file() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "reftri");
    let csv = dir.path().join("out.csv");
    let out = oscquad(
        &[
            "oracle",
            "--mesh",
            s(&mesh),
            "--integrand",
            "planewave",
            "--omega",
            "5",
            "--out",
            s(&csv),
        ],
        &[],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let t = std::fs::read_to_string(&csv).unwrap();
    assert!(t.starts_with("omega,ref_re,ref_im\n"));
}

#[test]
fn gen_domain_round_trips() {
    let dir = TempDir::new().unwrap();
    let mesh = domain(&dir, "resonance");
    let loaded = oscquad::meshio::load_mesh(&mesh).unwrap();
    assert_eq!(loaded.len(), 4);
    let out = oscquad(&["gen-domain", "annulus"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("unitsquare"));
}

#[test]
fn selftest_passes_and_detects_bad_truncation() {
    let out = oscquad(&["selftest"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    assert!(!text(&out.stdout).contains("FAIL"));
    let out = oscquad(&["selftest"], &[("OSC_EPS_SVD", "0.5")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stdout).contains("FAIL  collocation residual"));
}
