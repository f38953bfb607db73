//! Quick invariant checks run by the `selftest` command.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use oscquad_core::hankel::hankel_phase_amp;
use oscquad_core::integrand::{cis, FnIntegrand, PhaseSample};
use oscquad_core::levin1d::{FnLine, Levin1d};
use oscquad_core::levin2d::{Levin2d, LevinField};
use oscquad_core::simplex::{poly_dim, DuffyRule};
use oscquad_core::{svd, Complex64, DenseMatrix, IntegrandKind, IntegrandSpec, Point2, RefCell};

use crate::domains::Domain;
use crate::settings::Settings;
use crate::sweep::{self, SweepOptions};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

fn within(label: &str, err: f64, tol: f64) -> Result<String, String> {
    let msg = format!("{label} {err:.2e} (limit {tol:.0e})");
    if err <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn plane(omega: f64) -> FnIntegrand<impl Fn(Point2) -> PhaseSample + Copy> {
    FnIntegrand(move |x: Point2| PhaseSample {
        amplitude: Complex64::new(1.0, 0.0),
        phase: omega * x[0],
        grad: [omega, 0.0],
    })
}

fn check_svd(rng: &mut StdRng) -> Result<String, String> {
    let (m, n) = (20, 12);
    let data: Vec<Complex64> = (0..m * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let a = DenseMatrix::from_row_major(m, n, data).map_err(|e| e.to_string())?;
    let f = svd(&a).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..n {
            let r: Complex64 = (0..f.sigma.len())
                .map(|k| f.u[(i, k)] * f.sigma[k] * f.v[(j, k)].conj())
                .sum();
            worst = worst.max((r - a[(i, j)]).norm());
        }
    }
    within("max reconstruction error", worst, 1e-12 * f.sigma[0])
}

fn check_levin1d(s: &Settings) -> Result<String, String> {
    let w = 200.0;
    let solver = Levin1d::new(s.levin.cfg1d).map_err(|e| e.to_string())?;
    let osc = FnLine(move |t: f64| (Complex64::new(1.0, 0.0), w * t, w));
    let v = solver.slab(&osc, 0.0, 1.0).map_err(|e| e.to_string())?;
    within(
        "error",
        (v - (cis(w) - 1.0) / Complex64::new(0.0, w)).norm(),
        1e-12,
    )
}

fn check_residual(s: &Settings) -> Result<String, String> {
    let solver = Levin2d::new(s.levin).map_err(|e| e.to_string())?;
    let field = solver
        .solve(&plane(50.0), &RefCell::UNIT)
        .map_err(|e| e.to_string())?;
    within(
        "residual",
        field.residual_inf,
        s.levin.residual_tol * field.f_scale,
    )
}

/// `∫_0^1 (1 − x)·e^{iωx} dx` for `|ω| ≥ 1/2`.
fn planewave_reftri(omega: f64) -> Complex64 {
    let a = Complex64::new(0.0, omega);
    (a.exp() - 1.0 - a) / (a * a)
}

fn check_planewave(s: &Settings) -> Result<String, String> {
    let mesh = Domain::RefTri
        .mesh_file()
        .build()
        .map_err(|e| e.to_string())?;
    let r =
        oscquad_core::integrate_mesh(&mesh, &plane(1e3), &s.levin).map_err(|e| e.to_string())?;
    within("error", (r.value - planewave_reftri(1e3)).norm(), 1e-10)
}

fn check_low_frequency(s: &Settings) -> Result<String, String> {
    let mesh = Domain::UnitSquare
        .mesh_file()
        .build()
        .map_err(|e| e.to_string())?;
    let w = 1e-3;
    let r = oscquad_core::integrate_mesh(&mesh, &plane(w), &s.levin).map_err(|e| e.to_string())?;
    // (e^{iω} − 1)/(iω) by its series
    let a = Complex64::new(0.0, w);
    let exact =
        Complex64::new(1.0, 0.0) + a / 2.0 + a * a / 6.0 + a * a * a / 24.0 + a * a * a * a / 120.0;
    within("error", (r.value - exact).norm(), 1e-11)
}

fn check_divergence(s: &Settings, rng: &mut StdRng) -> Result<String, String> {
    let solver = Levin2d::new(s.levin).map_err(|e| e.to_string())?;
    let rule = DuffyRule::new(12).map_err(|e| e.to_string())?;
    let zero = plane(0.0);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut cell = RefCell::UNIT;
        for _ in 0..rng.gen_range(0..4) {
            cell = cell.subdivide()[rng.gen_range(0..4)];
        }
        let coeffs = (0..2 * poly_dim(8))
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let field = LevinField::from_coefficients(cell, 8, coeffs).map_err(|e| e.to_string())?;
        let b = solver
            .boundary(&field, &zero)
            .map_err(|e| e.to_string())?
            .value;
        let a = rule.integrate(&cell.vertices, |p| field.divergence(p));
        worst = worst.max((a - b).norm());
    }
    within("max mismatch", worst, 1e-12)
}

/// `(z, H0, H1)` at 40 digits.
const HANKEL_REFERENCE: [(f64, [f64; 4]); 5] = [
    (
        0.5,
        [
            0.938_469_807_240_812_9,
            -0.444_518_733_506_706_56,
            0.242_268_457_674_873_9,
            -1.471_472_392_670_243,
        ],
    ),
    (
        1.0,
        [
            0.765_197_686_557_966_6,
            0.088_256_964_215_676_96,
            0.440_050_585_744_933_5,
            -0.781_212_821_300_288_7,
        ],
    ),
    (
        7.5,
        [
            0.266_339_657_880_378_4,
            0.117_313_286_148_208_63,
            0.135_248_427_579_705_5,
            -0.259_128_510_486_116_24,
        ],
    ),
    (
        100.0,
        [
            0.019_985_850_304_223_122,
            -0.077_244_313_365_083_15,
            -0.077_145_352_014_112_16,
            -0.020_372_312_002_759_792,
        ],
    ),
    (
        3000.0,
        [
            -0.007_791_845_261_889_9,
            0.012_308_279_134_657_473,
            0.012_306_980_664_764_856,
            0.007_793_896_749_908_748,
        ],
    ),
];

fn check_hankel() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (z, h) in HANKEL_REFERENCE {
        let v = hankel_phase_amp(z).map_err(|e| e.to_string())?;
        let e0 = Complex64::new(h[0], h[1]);
        let e1 = Complex64::new(h[2], h[3]);
        worst = worst
            .max((v.h0() - e0).norm() / e0.norm())
            .max((v.h1() - e1).norm() / e1.norm());
    }
    within("max relative error", worst, 1e-12)
}

fn check_area() -> Result<String, String> {
    let mesh = Domain::Resonance
        .mesh_file()
        .build()
        .map_err(|e| e.to_string())?;
    let rule = DuffyRule::new(20).map_err(|e| e.to_string())?;
    let area: f64 = mesh
        .elements()
        .iter()
        .map(|el| {
            rule.integrate(&RefCell::UNIT.vertices, |p| {
                let j = el.jacobian(p[0], p[1]).unwrap_or([[f64::NAN; 2]; 2]);
                j[0][0] * j[1][1] - j[0][1] * j[1][0]
            })
        })
        .sum();
    within("area error", (area - PI / 2.0).abs(), 1e-10)
}

fn check_determinism(s: &Settings) -> Result<String, String> {
    let mesh = Domain::Resonance
        .mesh_file()
        .build()
        .map_err(|e| e.to_string())?;
    let spec = IntegrandSpec::new(IntegrandKind::Radial, 0.0);
    let run = |threads| {
        let opts = SweepOptions {
            oracle: false,
            timing: false,
            threads,
        };
        sweep::to_csv(&sweep::run(
            &mesh,
            &spec,
            &[50.0, 500.0],
            s,
            opts,
            &mut |_| {},
        ))
    };
    let (a, b) = (run(1), run(4));
    if a == b && !a.contains("error") && !a.contains("nonconvergence") {
        Ok("1 and 4 workers agree byte for byte".into())
    } else {
        Err("CSV differs between worker counts or contains failures".into())
    }
}

/// Runs every check with the given settings.
pub fn run(settings: &Settings) -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    vec![
        Check {
            name: "svd reconstruction",
            outcome: check_svd(&mut rng),
        },
        Check {
            name: "univariate levin closed form",
            outcome: check_levin1d(settings),
        },
        Check {
            name: "collocation residual",
            outcome: check_residual(settings),
        },
        Check {
            name: "plane wave closed form",
            outcome: check_planewave(settings),
        },
        Check {
            name: "low frequency",
            outcome: check_low_frequency(settings),
        },
        Check {
            name: "divergence identity",
            outcome: check_divergence(settings, &mut rng),
        },
        Check {
            name: "hankel reconstruction",
            outcome: check_hankel(),
        },
        Check {
            name: "resonance domain area",
            outcome: check_area(),
        },
        Check {
            name: "sweep determinism",
            outcome: check_determinism(settings),
        },
    ]
}

/// Fixed-width pass/fail table.
pub fn table(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let (tag, detail) = match &c.outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        s.push_str(&format!("{tag}  {:<30} {detail}\n", c.name));
    }
    s
}
