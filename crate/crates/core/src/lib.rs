//! Adaptive Levin quadrature for bivariate oscillatory integrals
//!
//! Evaluates `∫_Ω f(x)·exp(i·g(x)) dΩ` over domains meshed by curved
//! (transfinite) triangular elements. On each element the Levin equation
//! `∇·p + i∇g·p = f` is collocated in a local monomial basis and solved by
//! truncated SVD on adaptively refined sub-cells; the divergence theorem then
//! turns each sub-cell integral into three edge integrals, which are evaluated
//! by the adaptive univariate Levin method. Stationary points and resonance
//! points are handled by the adaptivity of both levels.
//!
//! The crate is `no_std` (with `alloc`). File formats, threading and the
//! command-line driver live in the `oscquad` companion crate.
//!
//! Modules:
//! - [`numkernel`]: dense complex SVD and truncated-SVD least squares
//! - [`spectral1d`]: Chebyshev grids, expansions, Gauss-Legendre rules
//! - [`geometry`]: curved elements, transfinite map, meshes, reference cells
//! - [`levin1d`]: adaptive univariate Levin method
//! - [`levin2d`]: multivariate Levin solve, boundary reduction, adaptive drivers
//! - [`hankel`], [`library`]: built-in integrands including the 2D Helmholtz kernel
//! - [`oracle`]: independent reference quadratures

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod hankel;
pub mod integrand;
pub mod levin1d;
pub mod levin2d;
pub mod library;
pub mod numkernel;
pub mod oracle;
pub mod simplex;
pub mod spectral1d;

pub use error::{Error, Result};
pub use geometry::{CurvedTriangle, EdgeCurve, Mesh, Point2, RefCell};
pub use integrand::{OscillatoryIntegrand, PhaseSample, PulledBack};
pub use levin1d::{Levin1dConfig, Levin1dResult};
pub use levin2d::{integrate_element, integrate_mesh, Levin2dConfig, LevinField, QuadratureResult};
pub use library::{BuiltinIntegrand, IntegrandKind, IntegrandSpec};
pub use num_complex::Complex64;
pub use numkernel::{svd, tsvd_solve, DenseMatrix, Svd, TsvdReport};
pub use oracle::OracleConfig;
