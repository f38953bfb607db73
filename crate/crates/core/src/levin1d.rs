//! Adaptive univariate Levin method for `∫_a^b F(t)·exp(i·G(t)) dt`.
//!
//! On a slab `[a, b]` the Levin equation `p' + i·G'·p = F` is collocated on a
//! Chebyshev extrema grid and solved by truncated SVD; the integral is then
//! `p(b)·e^{iG(b)} − p(a)·e^{iG(a)}`. The adaptive driver compares a slab
//! against its two halves and bisects until they agree.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::integrand::cis;
use crate::numkernel::{tsvd_solve, DenseMatrix, DEFAULT_EPS_SVD};
use crate::spectral1d::ChebGrid;

/// `F`, `G` and `G'` along a line parameter.
pub trait LineOscillator {
    /// Returns `(F(t), G(t), G'(t))`.
    fn sample(&self, t: f64) -> (Complex64, f64, f64);
}

/// Line oscillator backed by a closure.
#[derive(Clone, Copy)]
pub struct FnLine<F>(pub F);

impl<F: Fn(f64) -> (Complex64, f64, f64)> LineOscillator for FnLine<F> {
    fn sample(&self, t: f64) -> (Complex64, f64, f64) {
        (self.0)(t)
    }
}

impl<T: LineOscillator + ?Sized> LineOscillator for &T {
    fn sample(&self, t: f64) -> (Complex64, f64, f64) {
        (**self).sample(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levin1dConfig {
    /// Chebyshev grid size per slab.
    pub n_points: usize,
    pub eps_svd: f64,
    /// Whole-vs-halves acceptance tolerance, relative to `1 + |I|`.
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for Levin1dConfig {
    fn default() -> Self {
        Levin1dConfig {
            n_points: 16,
            eps_svd: DEFAULT_EPS_SVD,
            tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl Levin1dConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 4 {
            return Err(Error::Contract(format!(
                "n_points must be >= 4, got {}",
                self.n_points
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Contract(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if !(self.eps_svd > 0.0 && self.eps_svd < 1.0) {
            return Err(Error::Contract(format!(
                "eps_svd must lie in (0, 1), got {}",
                self.eps_svd
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Levin1dResult {
    pub value: Complex64,
    pub err_est: f64,
    /// Accepted subintervals.
    pub n_segments: usize,
    pub svd_calls: usize,
}

/// Univariate Levin solver with a cached collocation grid.
#[derive(Debug, Clone)]
pub struct Levin1d {
    cfg: Levin1dConfig,
    grid: ChebGrid,
}

impl Levin1d {
    pub fn new(cfg: Levin1dConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Levin1d {
            cfg,
            grid: ChebGrid::new(cfg.n_points)?,
        })
    }

    pub fn config(&self) -> &Levin1dConfig {
        &self.cfg
    }

    fn degenerate(a: f64, b: f64) -> bool {
        b - a < 1e-15 * (1.0 + a.abs() + b.abs())
    }

    /// Single collocation solve on `[a, b]`.
    pub fn slab<L: LineOscillator + ?Sized>(&self, osc: &L, a: f64, b: f64) -> Result<Complex64> {
        if !(b > a) {
            return Err(Error::Contract(format!("slab needs b > a, got [{a}, {b}]")));
        }
        if Self::degenerate(a, b) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let n = self.grid.len();
        let half = 0.5 * (b - a);
        let ts = self.grid.mapped(a, b);
        let samples: Vec<(Complex64, f64, f64)> = ts.iter().map(|&t| osc.sample(t)).collect();
        // derivative information below the phase's own rounding level is noise
        let gmax = samples.iter().fold(0.0f64, |m, s| m.max(s.1.abs()));
        let floor = 8.0 * f64::EPSILON * gmax / (b - a);
        let mut mat = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let row = mat.row_mut(i);
            for (j, z) in row.iter_mut().enumerate() {
                *z = Complex64::new(self.grid.diff(i, j) / half, 0.0);
            }
            let gp = samples[i].2;
            if gp.abs() > floor {
                row[i].im += gp;
            }
        }
        let rhs: Vec<Complex64> = samples.iter().map(|s| s.0).collect();
        let (p, _) = tsvd_solve(&mat, &rhs, self.cfg.eps_svd)?;
        let (ga, gb) = (samples[0].1, samples[n - 1].1);
        // factor out e^{iG(a)} so nearly equal large phases cancel first
        Ok(cis(ga) * (p[n - 1] * cis(gb - ga) - p[0]))
    }

    /// Adaptive bisection until whole-slab and two-half values agree.
    pub fn adaptive<L: LineOscillator + ?Sized>(
        &self,
        osc: &L,
        a: f64,
        b: f64,
    ) -> Result<Levin1dResult> {
        if !(b > a) {
            return Err(Error::Contract(format!(
                "integration interval needs b > a, got [{a}, {b}]"
            )));
        }
        let mut acc = Levin1dResult::default();
        if Self::degenerate(a, b) {
            return Ok(acc);
        }
        let whole = self.slab(osc, a, b)?;
        acc.svd_calls += 1;
        self.refine(osc, a, b, whole, 0, &mut acc)?;
        Ok(acc)
    }

    fn refine<L: LineOscillator + ?Sized>(
        &self,
        osc: &L,
        a: f64,
        b: f64,
        whole: Complex64,
        depth: usize,
        acc: &mut Levin1dResult,
    ) -> Result<()> {
        let m = 0.5 * (a + b);
        let left = self.slab(osc, a, m)?;
        let right = self.slab(osc, m, b)?;
        acc.svd_calls += 2;
        let halves = left + right;
        let diff = (whole - halves).norm();
        if diff <= self.cfg.tol * (1.0 + halves.norm()) || Self::degenerate(a, m) {
            acc.value += halves;
            acc.err_est += diff;
            acc.n_segments += 1;
            return Ok(());
        }
        if depth >= self.cfg.max_depth {
            return Err(Error::Levin1dNonConvergence {
                a,
                b,
                depth: self.cfg.max_depth,
            });
        }
        self.refine(osc, a, m, left, depth + 1, acc)?;
        self.refine(osc, m, b, right, depth + 1, acc)
    }
}

pub fn levin1d_slab<L: LineOscillator + ?Sized>(
    osc: &L,
    a: f64,
    b: f64,
    cfg: &Levin1dConfig,
) -> Result<Complex64> {
    Levin1d::new(*cfg)?.slab(osc, a, b)
}

pub fn levin1d_adaptive<L: LineOscillator + ?Sized>(
    osc: &L,
    a: f64,
    b: f64,
    cfg: &Levin1dConfig,
) -> Result<Levin1dResult> {
    Levin1d::new(*cfg)?.adaptive(osc, a, b)
}
