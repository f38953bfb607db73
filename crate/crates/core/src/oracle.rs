//! Brute-force reference values: adaptive Duffy-Gauss quadrature of the full
//! oscillatory integrand, and an adaptive Gauss-Legendre boundary integral for
//! the Helmholtz divergence integrand.

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::geometry::{Mesh, RefCell};
use crate::hankel::hankel_phase_amp;
use crate::integrand::{OscillatoryIntegrand, PulledBack};
use crate::simplex::DuffyRule;
use crate::spectral1d::GaussRule;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub gl_points: usize,
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            gl_points: 30,
            tol: 1e-12,
            max_depth: 30,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gl_points < 2 || self.gl_points > 128 {
            return Err(Error::Contract(format!(
                "gl_points must lie in [2, 128], got {}",
                self.gl_points
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Contract(format!(
                "oracle tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Adaptive 2D quadrature of `f̃·e^{ig̃}` on the reference triangle.
pub fn oracle_reference<I: OscillatoryIntegrand + ?Sized>(
    osc: &I,
    cfg: &OracleConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    let rule = DuffyRule::new(cfg.gl_points)?;
    let cell_value = |c: &RefCell| rule.integrate(&c.vertices, |p| osc.value(p));
    let mut total = Complex64::new(0.0, 0.0);
    refine_cell(
        &cell_value,
        &RefCell::UNIT,
        cell_value(&RefCell::UNIT),
        0,
        cfg,
        &mut total,
    )?;
    Ok(total)
}

fn refine_cell(
    cell_value: &impl Fn(&RefCell) -> Complex64,
    cell: &RefCell,
    whole: Complex64,
    depth: usize,
    cfg: &OracleConfig,
    total: &mut Complex64,
) -> Result<()> {
    let kids = cell.subdivide();
    let parts = kids.map(|k| cell_value(&k));
    let sum: Complex64 = parts.iter().sum();
    if (sum - whole).norm() <= cfg.tol * (1.0 + sum.norm()) {
        *total += sum;
        return Ok(());
    }
    if depth >= cfg.max_depth {
        return Err(Error::OracleNonConvergence {
            what: format!("reference cell {:?}", cell.vertices),
            depth: cfg.max_depth,
        });
    }
    for (k, v) in kids.iter().zip(parts) {
        refine_cell(cell_value, k, v, depth + 1, cfg, total)?;
    }
    Ok(())
}

/// Adaptive 2D quadrature over every element, summed in index order.
pub fn oracle_2d<I: OscillatoryIntegrand + ?Sized>(
    mesh: &Mesh,
    osc: &I,
    cfg: &OracleConfig,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (i, el) in mesh.elements().iter().enumerate() {
        let pb = PulledBack::new(el, osc, i).map_err(|e| e.in_element(i))?;
        total += oracle_reference(&pb, cfg).map_err(|e| e.in_element(i))?;
    }
    Ok(total)
}

/// `∮ n·(G(0, x)·2x) dΓ` over the outer boundary, `G = (i/4)·H0(ω‖x‖)`.
pub fn oracle_helmholtz_boundary(mesh: &Mesh, omega: f64, cfg: &OracleConfig) -> Result<Complex64> {
    cfg.validate()?;
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "boundary oracle needs omega > 0, got {omega}"
        )));
    }
    if !(mesh.min_distance_to([0.0, 0.0]) > 1e-8) {
        return Err(Error::Domain(String::from(
            "boundary oracle needs the origin outside the closed domain",
        )));
    }
    let rule = GaussRule::new(cfg.gl_points)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (seg, &(el, e)) in mesh.boundary_edges().iter().enumerate() {
        let curve = mesh.elements()[el].edge(e);
        let mut bad = None;
        let f = |t: f64| {
            let x = curve.point(t);
            let d = curve.tangent(t);
            match hankel_phase_amp(omega * x[0].hypot(x[1])) {
                Ok(h) => h.h0() * Complex64::new(0.0, 0.5) * (x[0] * d[1] - x[1] * d[0]),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        let value = |a: f64, b: f64| rule.integrate(a, b, f);
        let whole = value(0.0, 1.0);
        if !(whole.re.is_finite() && whole.im.is_finite()) {
            return Err(Error::Domain(format!(
                "boundary segment {seg} (element {el}, edge {e}) touches the origin"
            )));
        }
        let what = || format!("boundary segment {seg} (element {el}, edge {e})");
        total += refine_segment(&value, 0.0, 1.0, whole, 0, cfg, &mut bad).map_err(|_| {
            Error::OracleNonConvergence {
                what: bad
                    .take()
                    .map_or_else(what, |s: String| format!("{}, {s}", what())),
                depth: cfg.max_depth,
            }
        })?;
    }
    Ok(total)
}

fn refine_segment(
    value: &impl Fn(f64, f64) -> Complex64,
    a: f64,
    b: f64,
    whole: Complex64,
    depth: usize,
    cfg: &OracleConfig,
    bad: &mut Option<String>,
) -> core::result::Result<Complex64, ()> {
    let m = 0.5 * (a + b);
    let (l, r) = (value(a, m), value(m, b));
    if (l + r - whole).norm() <= cfg.tol * (1.0 + (l + r).norm()) {
        return Ok(l + r);
    }
    if depth >= cfg.max_depth {
        *bad = Some(format!("t in [{a}, {b}]"));
        return Err(());
    }
    Ok(refine_segment(value, a, m, l, depth + 1, cfg, bad)?
        + refine_segment(value, m, b, r, depth + 1, cfg, bad)?)
}
