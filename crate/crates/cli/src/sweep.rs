//! Frequency sweeps and their CSV output.

use std::fmt::Write as _;
use std::time::Instant;

use oscquad_core::geometry::Mesh;
use oscquad_core::library::{make_integrand, BuiltinIntegrand};
use oscquad_core::oracle::oracle_helmholtz_boundary;
use oscquad_core::{Complex64, Error, IntegrandKind, IntegrandSpec, QuadratureResult};

use crate::parallel;
use crate::settings::Settings;

pub const HEADER: &str = "omega,value_re,value_im,ref_re,ref_im,abs_err,time_ms,n_leaves,n_boundary_segments,svd_calls,status";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub result: Option<QuadratureResult>,
    pub reference: Option<Complex64>,
    pub time_ms: Option<f64>,
    /// `ok`, `nonconvergence` or `error`, with `;oracle_<...>` when the reference failed.
    pub status: String,
}

impl SweepRow {
    pub fn abs_err(&self) -> Option<f64> {
        Some((self.result?.value - self.reference?).norm())
    }

    pub fn to_csv(&self) -> String {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.17e}")).unwrap_or_default();
        let cnt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        let r = self.result;
        [
            format!("{:.17e}", self.omega),
            num(r.map(|r| r.value.re)),
            num(r.map(|r| r.value.im)),
            num(self.reference.map(|z| z.re)),
            num(self.reference.map(|z| z.im)),
            num(self.abs_err()),
            self.time_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            cnt(r.map(|r| r.n_leaves)),
            cnt(r.map(|r| r.n_boundary_segments)),
            cnt(r.map(|r| r.svd_calls)),
            self.status.clone(),
        ]
        .join(",")
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.to_csv());
    }
    s
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub oracle: bool,
    pub timing: bool,
    pub threads: usize,
}

/// Builds the integrand for one frequency and checks it against the mesh.
pub fn integrand_for(
    spec: &IntegrandSpec,
    omega: f64,
    mesh: &Mesh,
) -> Result<BuiltinIntegrand, Error> {
    let f = make_integrand(IntegrandSpec { omega, ..*spec })?;
    f.check_mesh(mesh)?;
    Ok(f)
}

/// Reference value: the boundary oracle for the Helmholtz integrand, the
/// area oracle up to `oracle_max_omega` otherwise. `Ok(None)` when skipped.
pub fn reference(
    mesh: &Mesh,
    f: &BuiltinIntegrand,
    settings: &Settings,
    threads: usize,
) -> Result<Option<Complex64>, Error> {
    let spec = f.spec();
    if spec.kind == IntegrandKind::Helmholtz {
        return oracle_helmholtz_boundary(mesh, spec.omega, &settings.oracle).map(Some);
    }
    if spec.omega > settings.oracle_max_omega {
        return Ok(None);
    }
    parallel::oracle_2d(mesh, f, &settings.oracle, threads).map(Some)
}

fn status_of(e: &Error) -> &'static str {
    if e.is_nonconvergence() {
        "nonconvergence"
    } else {
        "error"
    }
}

/// One row per frequency; failures are recorded, not propagated.
pub fn run(
    mesh: &Mesh,
    spec: &IntegrandSpec,
    omegas: &[f64],
    settings: &Settings,
    opts: SweepOptions,
    log: &mut dyn FnMut(String),
) -> Vec<SweepRow> {
    omegas
        .iter()
        .map(|&omega| {
            let f = match integrand_for(spec, omega, mesh) {
                Ok(f) => f,
                Err(e) => {
                    log(format!("omega {omega}: {e}"));
                    return SweepRow {
                        omega,
                        result: None,
                        reference: None,
                        time_ms: None,
                        status: status_of(&e).into(),
                    };
                }
            };
            let start = Instant::now();
            let outcome = parallel::integrate_mesh(mesh, &f, &settings.levin, opts.threads);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let mut row = SweepRow {
                omega,
                result: None,
                reference: None,
                time_ms: opts.timing.then_some(elapsed),
                status: "ok".into(),
            };
            match outcome {
                Ok(r) => row.result = Some(r),
                Err(e) => {
                    log(format!("omega {omega}: {e}"));
                    row.status = status_of(&e).into();
                }
            }
            if opts.oracle {
                match reference(mesh, &f, settings, opts.threads) {
                    Ok(r) => row.reference = r,
                    Err(e) => {
                        log(format!("omega {omega}: reference failed: {e}"));
                        row.status.push_str(if e.is_nonconvergence() {
                            ";oracle_nonconvergence"
                        } else {
                            ";oracle_error"
                        });
                    }
                }
            }
            row
        })
        .collect()
}

/// Parses `lo:hi:points_per_decade` into log-spaced frequencies including both ends.
pub fn omega_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let err = || format!("invalid omega range '{text}', expected lo:hi:points_per_decade");
    if parts.len() != 3 {
        return Err(err());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| err())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| err())?;
    let ppd: usize = parts[2].trim().parse().map_err(|_| err())?;
    if !(lo > 0.0 && hi >= lo && ppd > 0 && hi.is_finite()) {
        return Err(err());
    }
    let decades = (hi / lo).log10();
    let n = (decades * ppd as f64).round() as usize;
    if n == 0 {
        return Ok(vec![lo]);
    }
    Ok((0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo * 10f64.powf(decades * i as f64 / n as f64)
            }
        })
        .collect())
}

/// Parses a comma-separated list of nonnegative frequencies.
pub fn omega_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|w| *w >= 0.0 && w.is_finite())
                .ok_or_else(|| format!("invalid frequency '{}'", s.trim()))
        })
        .collect()
}
