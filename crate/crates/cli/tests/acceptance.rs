//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use oscquad::domains::Domain;
use oscquad::parallel;
use oscquad_core::geometry::Mesh;
use oscquad_core::hankel::hankel_phase_amp;
use oscquad_core::levin2d::{Levin2d, LevinField};
use oscquad_core::library::make_integrand;
use oscquad_core::oracle::{oracle_2d, oracle_helmholtz_boundary};
use oscquad_core::simplex::{poly_dim, DuffyRule};
use oscquad_core::{
    Complex64, IntegrandKind, IntegrandSpec, Levin2dConfig, OracleConfig, QuadratureResult, RefCell,
};

const HANKEL_ORACLE: &str = include_str!("../../core/tests/data/hankel_oracle.csv");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mesh(d: Domain) -> Mesh {
    d.mesh_file().build().expect("built-in domain")
}

fn threads() -> usize {
    parallel::thread_count()
}

fn levin(
    mesh: &Mesh,
    spec: IntegrandSpec,
    cfg: &Levin2dConfig,
) -> Result<QuadratureResult, String> {
    let f = make_integrand(spec).map_err(|e| e.to_string())?;
    f.check_mesh(mesh).map_err(|e| e.to_string())?;
    parallel::integrate_mesh(mesh, &f, cfg, threads()).map_err(|e| e.to_string())
}

fn reference_2d(mesh: &Mesh, spec: IntegrandSpec) -> Result<Complex64, String> {
    let f = make_integrand(spec).map_err(|e| e.to_string())?;
    oracle_2d(mesh, &f, &OracleConfig::default()).map_err(|e| e.to_string())
}

/// Best of three wall-clock times in milliseconds.
fn best_time(mut run: impl FnMut()) -> f64 {
    (0..3)
        .map(|_| {
            let t = Instant::now();
            run();
            t.elapsed().as_secs_f64() * 1e3
        })
        .fold(f64::INFINITY, f64::min)
}

/// `∫_0^1 (1 − x)·e^{iωx} dx`, by series below `|ω| = 1/2`.
fn planewave_reftri(omega: f64) -> Complex64 {
    let a = Complex64::new(0.0, omega);
    if omega.abs() < 0.5 {
        // Σ aⁿ/(n+2)!
        let (mut term, mut sum) = (Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0));
        for n in 0..30 {
            sum += term;
            term = term * a / (n as f64 + 3.0);
        }
        return sum;
    }
    (a.exp() - 1.0 - a) / (a * a)
}

fn closed_form_planewave() -> Outcome {
    let m = mesh(Domain::RefTri);
    let cfg = Levin2dConfig::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for w in [0.0, 1.0, 1e2, 1e3, 1e5] {
        let r = levin(&m, IntegrandSpec::new(IntegrandKind::Planewave, w), &cfg)?;
        worst = worst.max((r.value - planewave_reftri(w)).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-10 && secs <= 5.0,
        format!("max error {worst:.2e} (limit 1e-10), {secs:.2} s (limit 5 s)"),
    )
}

fn frequency_independence() -> Outcome {
    let m = mesh(Domain::Resonance);
    let cfg = Levin2dConfig::default();
    let omegas = [1e2, 1e3, 1e4, 1e5];
    let mut radial = Vec::new();
    let mut plane = Vec::new();
    for w in omegas {
        radial.push(levin(&m, IntegrandSpec::new(IntegrandKind::Radial, w), &cfg)?.n_leaves);
        plane.push(levin(&m, IntegrandSpec::new(IntegrandKind::Planewave, w), &cfg)?.n_leaves);
    }
    let spec = |w| IntegrandSpec::new(IntegrandKind::Radial, w);
    let t_lo = best_time(|| drop(levin(&m, spec(1e2), &cfg)));
    let t_hi = best_time(|| drop(levin(&m, spec(1e5), &cfg)));
    let same = |v: &[usize]| v.windows(2).all(|p| p[0] == p[1]);
    verdict(
        same(&radial) && same(&plane) && t_hi <= 3.0 * t_lo,
        format!("radial leaves {radial:?}, planewave leaves {plane:?}, time {t_hi:.1} ms at 1e5 vs {t_lo:.1} ms at 1e2 (limit 3x)"),
    )
}

fn low_frequency() -> Outcome {
    let m = mesh(Domain::Resonance);
    let cfg = Levin2dConfig::default();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for kind in IntegrandKind::ALL {
        for w in [0.0, 1e-3] {
            if kind == IntegrandKind::Helmholtz && w == 0.0 {
                continue;
            }
            let spec = IntegrandSpec::new(kind, w)
                .with_direction([0.6, 0.8])
                .with_center(if kind == IntegrandKind::Quadratic {
                    [1.2, 0.9]
                } else {
                    [0.0, 0.0]
                });
            let v = levin(&m, spec, &cfg)?.value;
            worst = worst.max((v - reference_2d(&m, spec)?).norm());
            cases += 1;
        }
    }
    verdict(
        worst <= 1e-11,
        format!("{cases} cases, max error {worst:.2e} (limit 1e-11)"),
    )
}

fn stationary_point() -> Outcome {
    let m = mesh(Domain::Resonance);
    let cfg = Levin2dConfig::default();
    let spec = |w| IntegrandSpec::new(IntegrandKind::Quadratic, w).with_center([1.2, 0.9]);
    let mut worst = 0.0f64;
    let mut runs = Vec::new();
    for w in [1e2, 1e3] {
        let r = levin(&m, spec(w), &cfg)?;
        worst = worst.max((r.value - reference_2d(&m, spec(w))?).norm());
        runs.push(r);
    }
    let added = runs[1]
        .max_depth_reached
        .saturating_sub(runs[0].max_depth_reached);
    let bound = runs[0].n_leaves + 16 * added;
    verdict(
        worst <= 1e-8 && runs[1].n_leaves <= bound,
        format!(
            "max error {worst:.2e} (limit 1e-8), leaves {} -> {} (limit {bound}, depth {} -> {})",
            runs[0].n_leaves,
            runs[1].n_leaves,
            runs[0].max_depth_reached,
            runs[1].max_depth_reached
        ),
    )
}

fn resonance() -> Outcome {
    let m = mesh(Domain::Resonance);
    let cfg = Levin2dConfig::default();
    let spec = |w| IntegrandSpec::new(IntegrandKind::Radial, w);
    let lo = levin(&m, spec(1e2), &cfg)?;
    let err = (lo.value - reference_2d(&m, spec(1e2))?).norm();
    let err_limit = 50.0 * cfg.residual_tol * Domain::Resonance.area();
    let base = levin(&m, spec(1e3), &cfg)?;
    let finer = levin(
        &m,
        spec(1e3),
        &Levin2dConfig {
            extra_levels: 1,
            ..cfg
        },
    )?;
    let shift = (finer.value - base.value).norm();
    let mut segs = Vec::new();
    let mut growth_ok = true;
    for w in [1e2, 1e3, 1e4, 1e5] {
        let n = levin(&m, spec(w), &cfg)?.n_boundary_segments;
        growth_ok &= n as f64
            <= segs.first().map_or(f64::INFINITY, |&n0: &usize| {
                n0 as f64 * w.ln() / 1e2f64.ln()
            });
        segs.push(n);
    }
    verdict(
        err <= err_limit && shift <= 1e-9 && finer.n_leaves == 4 * base.n_leaves && growth_ok,
        format!(
            "error at 1e2 {err:.2e} (limit {err_limit:.1e}), extra level shift at 1e3 {shift:.2e} over {} -> {} leaves (limit 1e-9), boundary segments {segs:?}",
            base.n_leaves, finer.n_leaves
        ),
    )
}

fn helmholtz() -> Outcome {
    let m = mesh(Domain::Resonance);
    let cfg = Levin2dConfig::default();
    let spec = |w| IntegrandSpec::new(IntegrandKind::Helmholtz, w);
    let mut errs = Vec::new();
    for w in [1e2, 1e3] {
        let v = levin(&m, spec(w), &cfg)?.value;
        let r = oracle_helmholtz_boundary(&m, w, &OracleConfig::default())
            .map_err(|e| e.to_string())?;
        errs.push((v - r).norm());
    }
    let t_lo = best_time(|| drop(levin(&m, spec(1e2), &cfg)));
    let t_hi = best_time(|| drop(levin(&m, spec(1e3), &cfg)));
    verdict(
        errs.iter().all(|&e| e <= 1e-8) && t_hi <= 3.0 * t_lo,
        format!("errors {:.2e}, {:.2e} (limit 1e-8), time {t_hi:.1} ms at 1e3 vs {t_lo:.1} ms at 1e2 (limit 3x)", errs[0], errs[1]),
    )
}

fn divergence_identity() -> Outcome {
    let start = Instant::now();
    let solver = Levin2d::new(Levin2dConfig::default()).map_err(|e| e.to_string())?;
    let rule = DuffyRule::new(12).map_err(|e| e.to_string())?;
    let zero = make_integrand(IntegrandSpec::new(IntegrandKind::Planewave, 0.0))
        .map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let degree = rng.gen_range(0..=8);
        let mut cell = RefCell::UNIT;
        for _ in 0..rng.gen_range(0..5) {
            cell = cell.subdivide()[rng.gen_range(0..4)];
        }
        let coeffs = (0..2 * poly_dim(degree))
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let field =
            LevinField::from_coefficients(cell, degree, coeffs).map_err(|e| e.to_string())?;
        let b = solver
            .boundary(&field, &zero)
            .map_err(|e| e.to_string())?
            .value;
        let a = rule.integrate(&cell.vertices, |p| field.divergence(p));
        worst = worst.max((a - b).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-12 && secs < 10.0,
        format!("100 fields, max mismatch {worst:.2e} (limit 1e-12), {secs:.2} s (limit 10 s)"),
    )
}

fn hankel() -> Outcome {
    let (mut rel, mut wr) = (0.0f64, 0.0f64);
    let mut n = 0;
    for line in HANKEL_ORACLE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('z'))
    {
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse().expect("numeric oracle row"))
            .collect();
        let z = v[0];
        let h = hankel_phase_amp(z).map_err(|e| e.to_string())?;
        let (e0, e1) = (Complex64::new(v[1], v[2]), Complex64::new(v[3], v[4]));
        rel = rel
            .max((h.h0() - e0).norm() / e0.norm())
            .max((h.h1() - e1).norm() / e1.norm());
        // J0·Y1 − J1·Y0 = −2/(πz)
        let w = h.m0 * h.m1 * h.phase_gap().sin();
        wr = wr.max((w + 2.0 / (PI * z)).abs() * PI * z / 2.0);
        n += 1;
    }
    verdict(n == 200 && rel <= 1e-12 && wr <= 1e-10, format!("{n} points, max relative error {rel:.2e} (limit 1e-12), Wronskian {wr:.2e} (limit 1e-10)"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("resonance.tri");
    std::fs::write(&path, Domain::Resonance.mesh_file().to_text()).map_err(|e| e.to_string())?;
    let sweep = |threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_oscquad"))
            .args(["sweep", "--mesh"])
            .arg(&path)
            .args([
                "--integrand",
                "radial",
                "--omega-range",
                "100:100000:1",
                "--no-timing",
            ])
            .env("OSC_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("sweep exited with {}", out.status));
        }
        Ok(out.stdout)
    };
    let runs = [sweep("1")?, sweep("1")?, sweep("8")?, sweep("8")?];
    let same = runs.windows(2).all(|p| p[0] == p[1]);
    verdict(
        same && runs[0].len() > 200,
        format!(
            "4 runs at 1 and 8 workers, {} bytes each, identical: {same}",
            runs[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed-form plane wave", closed_form_planewave),
        ("frequency independence", frequency_independence),
        ("low frequency", low_frequency),
        ("interior stationary point", stationary_point),
        ("resonance", resonance),
        ("helmholtz", helmholtz),
        ("divergence identity", divergence_identity),
        ("hankel reconstruction", hankel),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag}: {name}: {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
