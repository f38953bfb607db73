//! Dense complex linear algebra.
//!
//! The SVD is a one-sided Jacobi iteration preceded by a column-pivoted
//! Householder QR (the Jacobi sweeps then act on the small triangular factor,
//! transposed, which converges in a handful of sweeps). Truncated-SVD least
//! squares is the only linear solver used by the Levin methods.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Default relative singular-value cutoff for [`tsvd_solve`].
pub const DEFAULT_EPS_SVD: f64 = 1e-13;

const MAX_SWEEPS: usize = 80;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Contract(format!(
                "matrix must be nonempty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD `A = U·diag(sigma)·V^H` with `min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvdReport {
    pub rank_used: usize,
    pub sigma_max: f64,
    pub sigma_cutoff: f64,
    pub residual_norm: f64,
}

/// Column-major scratch matrix used by the factorizations.
struct ColMajor {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ColMajor {
    fn zeros(rows: usize, cols: usize) -> Self {
        ColMajor {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn two_cols(&mut self, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert!(p < q);
        let r = self.rows;
        let (lo, hi) = self.data.split_at_mut(q * r);
        (&mut lo[p * r..(p + 1) * r], &mut hi[..r])
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[j * self.rows + i] = z;
    }
}

fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `x^H y`
fn dotc(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex64::new(re, im)
}

/// Householder QR with column pivoting of a tall matrix (rows >= cols).
/// Returns the reflectors, the `cols x cols` upper-triangular factor and the
/// column permutation (`perm[j]` = original index of pivoted column `j`).
fn pivoted_qr(mut b: ColMajor) -> (ColMajor, ColMajor, Vec<usize>) {
    let (p, c) = (b.rows, b.cols);
    let mut perm: Vec<usize> = (0..c).collect();
    let mut refl = ColMajor::zeros(p, c);
    let mut r = ColMajor::zeros(c, c);
    for k in 0..c {
        // pivot on largest trailing column norm
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..c {
            let nj = norm_sqr(&b.col(j)[k..]);
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        if best != k {
            perm.swap(k, best);
            for i in 0..p {
                b.data.swap(k * p + i, best * p + i);
            }
        }
        let xnorm = best_norm.sqrt();
        if xnorm == 0.0 {
            // remaining block is exactly zero
            for j in k..c {
                for i in k..c {
                    r.set(i, j, Complex64::zero());
                }
                for i in 0..k {
                    r.set(i, j, b.get(i, j));
                }
            }
            break;
        }
        let x0 = b.get(k, k);
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        {
            let v = refl.col_mut(k);
            v[k] = x0 - alpha;
            for i in k + 1..p {
                v[i] = b.get(i, k);
            }
            let vn = norm_sqr(&v[k..]).sqrt();
            for z in v[k..].iter_mut() {
                *z /= vn;
            }
        }
        // apply H = I - 2 v v^H to trailing columns
        let v: Vec<Complex64> = refl.col(k)[k..].to_vec();
        for j in k + 1..c {
            let col = &mut b.col_mut(j)[k..];
            let s = dotc(&v, col) * 2.0;
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= vi * s;
            }
        }
        for i in 0..k {
            r.set(i, k, b.get(i, k));
        }
        r.set(k, k, alpha);
    }
    (refl, r, perm)
}

/// Applies `Q = H_0 H_1 ... H_{c-1}` to the columns of `m` (rows = p).
fn apply_q(refl: &ColMajor, m: &mut ColMajor) {
    let p = refl.rows;
    for k in (0..refl.cols).rev() {
        let v = &refl.col(k)[k..p];
        if v.iter().all(|z| z.is_zero()) {
            continue;
        }
        for j in 0..m.cols {
            let col = &mut m.col_mut(j)[k..p];
            let s = dotc(v, col) * 2.0;
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= vi * s;
            }
        }
    }
}

/// One-sided Jacobi on a square matrix `x`, accumulating the right rotations
/// in `w`. On return the columns of `x` are mutually orthogonal.
fn jacobi(x: &mut ColMajor, w: &mut ColMajor) -> bool {
    let n = x.cols;
    let tol = f64::EPSILON * (x.rows as f64).sqrt();
    let mut norms: Vec<f64> = (0..n).map(|j| norm_sqr(x.col(j))).collect();
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let a = norms[p];
                let b = norms[q];
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let (xp, xq) = x.two_cols(p, q);
                let c = dotc(xp, xq);
                let cabs = c.norm();
                if cabs <= tol * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let e = (c / cabs).conj();
                let zeta = (b - a) / (2.0 * cabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(xp, xq, e, cs, sn);
                norms[p] = norm_sqr(xp);
                norms[q] = norm_sqr(xq);
                let (wp, wq) = w.two_cols(p, q);
                rotate(wp, wq, e, cs, sn);
            }
        }
        if !rotated {
            return true;
        }
    }
    false
}

/// `y_q = e·x_q;  x_p' = cs·x_p − sn·y_q;  x_q' = sn·x_p + cs·y_q`
#[inline]
fn rotate(xp: &mut [Complex64], xq: &mut [Complex64], e: Complex64, cs: f64, sn: f64) {
    for (zp, zq) in xp.iter_mut().zip(xq.iter_mut()) {
        let yq = e * *zq;
        let np = *zp * cs - yq * sn;
        *zq = *zp * sn + yq * cs;
        *zp = np;
    }
}

/// Extends the nonzero columns of `m` (flagged by `keep`) to an orthonormal
/// set by Gram-Schmidt against coordinate vectors.
fn complete_orthonormal(m: &mut ColMajor, keep: &[bool]) {
    let rows = m.rows;
    let mut next_unit = 0;
    for j in 0..m.cols {
        if keep[j] {
            continue;
        }
        loop {
            let mut cand = vec![Complex64::zero(); rows];
            cand[next_unit % rows] = Complex64::new(1.0, 0.0);
            next_unit += 1;
            for _pass in 0..2 {
                for k in 0..m.cols {
                    if k == j || !(keep[k] || k < j) {
                        continue;
                    }
                    let s = dotc(m.col(k), &cand);
                    for (ci, mk) in cand.iter_mut().zip(m.col(k)) {
                        *ci -= mk * s;
                    }
                }
            }
            let nrm = norm_sqr(&cand).sqrt();
            if nrm > 1e-8 {
                for (dst, z) in m.col_mut(j).iter_mut().zip(&cand) {
                    *dst = z / nrm;
                }
                break;
            }
            if next_unit > 4 * rows {
                break;
            }
        }
    }
}

/// Thin singular value decomposition, singular values in nonincreasing order.
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    let (m, n) = (a.rows, a.cols);
    let transposed = m < n;
    let (p, c) = if transposed { (n, m) } else { (m, n) };
    // tall working copy: B = A or A^H
    let mut b = ColMajor::zeros(p, c);
    for i in 0..m {
        for j in 0..n {
            let z = a[(i, j)];
            if transposed {
                b.set(j, i, z.conj());
            } else {
                b.set(i, j, z);
            }
        }
    }
    let (refl, r, perm) = pivoted_qr(b);
    // X = R^H
    let mut x = ColMajor::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            x.set(j, i, r.get(i, j).conj());
        }
    }
    let mut w = ColMajor::zeros(c, c);
    for i in 0..c {
        w.set(i, i, Complex64::new(1.0, 0.0));
    }
    if !jacobi(&mut x, &mut w) {
        return Err(Error::SvdNonConvergence { rows: m, cols: n });
    }
    let mut sigma: Vec<f64> = (0..c).map(|j| norm_sqr(x.col(j)).sqrt()).collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let floor = f64::MIN_POSITIVE * 1e4;
    let keep: Vec<bool> = sigma
        .iter()
        .map(|&s| s > floor && s > smax * 1e-300)
        .collect();
    // Ux = normalized columns of X
    let mut ux = ColMajor::zeros(c, c);
    for j in 0..c {
        if keep[j] {
            let s = sigma[j];
            for (dst, z) in ux.col_mut(j).iter_mut().zip(x.col(j)) {
                *dst = z / s;
            }
        } else {
            sigma[j] = 0.0;
        }
    }
    complete_orthonormal(&mut ux, &keep);
    // left vectors of B: Q [W; 0]
    let mut left = ColMajor::zeros(p, c);
    for j in 0..c {
        for i in 0..c {
            left.set(i, j, w.get(i, j));
        }
    }
    apply_q(&refl, &mut left);
    // right vectors of B: P Ux
    let mut right = ColMajor::zeros(c, c);
    for j in 0..c {
        for i in 0..c {
            right.set(perm[i], j, ux.get(i, j));
        }
    }
    let (uc, vc) = if transposed {
        (right, left)
    } else {
        (left, right)
    };
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut u = DenseMatrix::zeros(m, c);
    let mut v = DenseMatrix::zeros(n, c);
    let mut s_sorted = Vec::with_capacity(c);
    for (dst, &src) in order.iter().enumerate() {
        s_sorted.push(sigma[src]);
        for i in 0..m {
            u[(i, dst)] = uc.get(i, src);
        }
        for i in 0..n {
            v[(i, dst)] = vc.get(i, src);
        }
    }
    Ok(Svd {
        u,
        sigma: s_sorted,
        v,
    })
}

/// Minimal-norm least-squares solution over the singular subspace with
/// `sigma_j > eps_rel * sigma_max`.
pub fn tsvd_solve(
    a: &DenseMatrix,
    b: &[Complex64],
    eps_rel: f64,
) -> Result<(Vec<Complex64>, TsvdReport)> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    if !(eps_rel > 0.0 && eps_rel < 1.0) {
        return Err(Error::Contract(format!(
            "eps_rel must lie in (0, 1), got {eps_rel}"
        )));
    }
    let f = svd(a)?;
    Ok(solve_with(a, &f, b, eps_rel))
}

/// Truncated solve reusing a precomputed factorization of `a`.
pub fn solve_with(
    a: &DenseMatrix,
    f: &Svd,
    b: &[Complex64],
    eps_rel: f64,
) -> (Vec<Complex64>, TsvdReport) {
    let sigma_max = f.sigma.first().copied().unwrap_or(0.0);
    let sigma_cutoff = eps_rel * sigma_max;
    let mut x = vec![Complex64::zero(); a.cols];
    let mut rank_used = 0;
    if sigma_max > 0.0 {
        for (j, &s) in f.sigma.iter().enumerate() {
            if s <= sigma_cutoff {
                break;
            }
            rank_used += 1;
            let mut coef = Complex64::zero();
            for i in 0..a.rows {
                coef += f.u[(i, j)].conj() * b[i];
            }
            coef /= s;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += f.v[(i, j)] * coef;
            }
        }
    }
    let ax = a.mul_vec(&x);
    let residual_norm = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (
        x,
        TsvdReport {
            rank_used,
            sigma_max,
            sigma_cutoff: sigma_cutoff.min(sigma_max),
            residual_norm,
        },
    )
}
