//! Built-in oscillatory integrands.

use core::fmt;
use core::str::FromStr;

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::geometry::{Mesh, Point2};
use crate::hankel::hankel_phase_amp;
use crate::integrand::{cis, OscillatoryIntegrand, PhaseSample};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegrandKind {
    /// `f = 1`, `g = ω d·x`.
    Planewave,
    /// `f = 1`, `g = ω‖x − c‖²`.
    Quadratic,
    /// `f = 1`, `g = ω‖x − c‖`.
    Radial,
    /// `∇·(G(0, x)·∇‖x‖²)` with `G = (i/4)·H0(ω‖x‖)`.
    Helmholtz,
}

impl IntegrandKind {
    pub const ALL: [IntegrandKind; 4] = [
        IntegrandKind::Planewave,
        IntegrandKind::Quadratic,
        IntegrandKind::Radial,
        IntegrandKind::Helmholtz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegrandKind::Planewave => "planewave",
            IntegrandKind::Quadratic => "quadratic",
            IntegrandKind::Radial => "radial",
            IntegrandKind::Helmholtz => "helmholtz",
        }
    }
}

impl fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntegrandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegrandKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Contract(format!(
                    "unknown integrand '{s}' (expected planewave, quadratic, radial or helmholtz)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandSpec {
    pub kind: IntegrandKind,
    pub omega: f64,
    /// Plane-wave direction; normalized on construction.
    pub direction: Point2,
    /// Center of the quadratic and radial phases.
    pub center: Point2,
}

impl IntegrandSpec {
    pub fn new(kind: IntegrandKind, omega: f64) -> Self {
        IntegrandSpec {
            kind,
            omega,
            direction: [1.0, 0.0],
            center: [0.0, 0.0],
        }
    }

    pub fn with_direction(mut self, d: Point2) -> Self {
        self.direction = d;
        self
    }

    pub fn with_center(mut self, c: Point2) -> Self {
        self.center = c;
        self
    }
}

/// A validated built-in integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinIntegrand {
    spec: IntegrandSpec,
}

pub fn make_integrand(spec: IntegrandSpec) -> Result<BuiltinIntegrand> {
    if !(spec.omega >= 0.0 && spec.omega.is_finite()) {
        return Err(Error::Contract(format!(
            "omega must be finite and nonnegative, got {}",
            spec.omega
        )));
    }
    let mut spec = spec;
    match spec.kind {
        IntegrandKind::Planewave => {
            let n = spec.direction[0].hypot(spec.direction[1]);
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Contract(format!(
                    "plane-wave direction {:?} has no length",
                    spec.direction
                )));
            }
            spec.direction = [spec.direction[0] / n, spec.direction[1] / n];
        }
        IntegrandKind::Helmholtz if spec.omega == 0.0 => {
            return Err(Error::Domain(String::from(
                "helmholtz integrand needs omega > 0: H0(0) is singular",
            )));
        }
        _ => {}
    }
    if !(spec.center[0].is_finite() && spec.center[1].is_finite()) {
        return Err(Error::Contract(String::from("center must be finite")));
    }
    Ok(BuiltinIntegrand { spec })
}

impl BuiltinIntegrand {
    pub fn spec(&self) -> &IntegrandSpec {
        &self.spec
    }

    /// Checks that the integrand is smooth on the mesh: the Helmholtz kernel
    /// needs the origin outside the closed domain and the radial phase needs
    /// its center outside it.
    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        let origin = match self.spec.kind {
            IntegrandKind::Helmholtz => [0.0, 0.0],
            IntegrandKind::Radial => self.spec.center,
            _ => return Ok(()),
        };
        let rmin = mesh.min_distance_to(origin);
        if !(rmin > 1e-8) {
            return Err(Error::Domain(format!(
                "{} integrand is singular at ({}, {}), which touches the mesh (distance {rmin:e})",
                self.spec.kind, origin[0], origin[1]
            )));
        }
        Ok(())
    }
}

impl OscillatoryIntegrand for BuiltinIntegrand {
    fn sample(&self, x: Point2) -> PhaseSample {
        let s = &self.spec;
        let w = s.omega;
        let one = Complex64::new(1.0, 0.0);
        match s.kind {
            IntegrandKind::Planewave => PhaseSample {
                amplitude: one,
                phase: w * (s.direction[0] * x[0] + s.direction[1] * x[1]),
                grad: [w * s.direction[0], w * s.direction[1]],
            },
            IntegrandKind::Quadratic => {
                let d = [x[0] - s.center[0], x[1] - s.center[1]];
                PhaseSample {
                    amplitude: one,
                    phase: w * (d[0] * d[0] + d[1] * d[1]),
                    grad: [2.0 * w * d[0], 2.0 * w * d[1]],
                }
            }
            IntegrandKind::Radial => {
                let d = [x[0] - s.center[0], x[1] - s.center[1]];
                let r = d[0].hypot(d[1]);
                PhaseSample {
                    amplitude: one,
                    phase: w * r,
                    grad: [w * d[0] / r, w * d[1] / r],
                }
            }
            IntegrandKind::Helmholtz => {
                let r = x[0].hypot(x[1]);
                match hankel_phase_amp(w * r) {
                    Ok(h) => {
                        let i = Complex64::new(0.0, 1.0);
                        let amplitude = i * h.m0 - i * (0.5 * w * r * h.m1) * cis(h.phase_gap());
                        let gr = w * h.dtheta0 / r;
                        PhaseSample {
                            amplitude,
                            phase: h.theta0,
                            grad: [gr * x[0], gr * x[1]],
                        }
                    }
                    Err(_) => PhaseSample {
                        amplitude: Complex64::new(f64::NAN, f64::NAN),
                        phase: f64::NAN,
                        grad: [f64::NAN; 2],
                    },
                }
            }
        }
    }
}
