//! Node sets and quadrature on triangles.

use alloc::vec::Vec;

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::geometry::Point2;
use crate::numkernel::{svd, DenseMatrix};
use crate::spectral1d::GaussRule;

/// `dim P_k` in two variables.
pub const fn poly_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Unisolvent nodes of total degree `degree` on the triangle
/// (0,0), (1,0), (0,1), returned as barycentric triples `(λ1, λ2, λ3)`.
///
/// Built from 1D Chebyshev-Lobatto points by symmetric averaging
/// (Blyth–Pozrikidis construction); vertices and edge nodes included.
pub fn barycentric_nodes(degree: usize) -> Vec<[f64; 3]> {
    if degree == 0 {
        return alloc::vec![[1.0 / 3.0; 3]];
    }
    let w: Vec<f64> = (0..=degree)
        .map(|i| {
            let k = 2 * i as i64 - degree as i64;
            0.5 + 0.5 * (PI * k as f64 / (2 * degree) as f64).sin()
        })
        .collect();
    let mut out = Vec::with_capacity(poly_dim(degree));
    for j in 0..=degree {
        for i in 0..=degree - j {
            let k = degree - i - j;
            // i ↔ vertex 2, j ↔ vertex 3, k ↔ vertex 1
            let l2 = (1.0 + 2.0 * w[i] - w[j] - w[k]) / 3.0;
            let l3 = (1.0 + 2.0 * w[j] - w[i] - w[k]) / 3.0;
            let l1 = (1.0 + 2.0 * w[k] - w[i] - w[j]) / 3.0;
            out.push([l1, l2, l3]);
        }
    }
    out
}

/// Nodes of total degree `degree` mapped onto the triangle `verts`.
pub fn nodes_on(verts: &[Point2; 3], degree: usize) -> Vec<Point2> {
    barycentric_nodes(degree)
        .into_iter()
        .map(|l| {
            [
                l[0] * verts[0][0] + l[1] * verts[1][0] + l[2] * verts[2][0],
                l[0] * verts[0][1] + l[1] * verts[1][1] + l[2] * verts[2][1],
            ]
        })
        .collect()
}

/// Jacobi polynomial `P_n^{(alpha, 0)}(x)`.
fn jacobi_p(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (alpha + 2.0) * x + 0.5 * alpha;
    for k in 2..=n {
        let k = k as f64;
        let a1 = 2.0 * k * (k + alpha) * (2.0 * k + alpha - 2.0);
        let a2 = (2.0 * k + alpha - 1.0) * alpha * alpha;
        let a3 = (2.0 * k + alpha - 2.0) * (2.0 * k + alpha - 1.0) * (2.0 * k + alpha);
        let a4 = 2.0 * (k + alpha - 1.0) * (k - 1.0) * (2.0 * k + alpha);
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Orthogonal (Dubiner) basis of total degree `degree` at a point of the
/// unit reference triangle.
pub fn dubiner_basis(degree: usize, p: Point2) -> Vec<f64> {
    let r = 2.0 * p[0] - 1.0;
    let s = 2.0 * p[1] - 1.0;
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    let mut out = Vec::with_capacity(poly_dim(degree));
    for i in 0..=degree {
        let pa = jacobi_p(i, 0.0, a) * ((1.0 - s) / 2.0).powi(i as i32);
        for j in 0..=degree - i {
            out.push(pa * jacobi_p(j, 2.0 * i as f64 + 1.0, s));
        }
    }
    out
}

/// 2-norm condition number of the degree-`degree` orthogonal-basis
/// Vandermonde matrix at the given reference-triangle points.
pub fn vandermonde_condition(degree: usize, points: &[Point2]) -> Result<f64> {
    let n = poly_dim(degree);
    let mut data = Vec::with_capacity(points.len() * n);
    for &p in points {
        data.extend(dubiner_basis(degree, p));
    }
    let v = DenseMatrix::from_real(points.len(), n, &data)?;
    let f = svd(&v)?;
    let smin = *f.sigma.last().unwrap_or(&0.0);
    Ok(if smin > 0.0 {
        f.sigma[0] / smin
    } else {
        f64::INFINITY
    })
}

/// Tensor Gauss rule collapsed onto a triangle by the Duffy map.
#[derive(Debug, Clone)]
pub struct DuffyRule {
    rule: GaussRule,
}

impl DuffyRule {
    pub fn new(points_per_direction: usize) -> Result<Self> {
        Ok(DuffyRule {
            rule: GaussRule::new(points_per_direction)?,
        })
    }

    /// Quadrature points and weights on the triangle `verts`.
    pub fn points_on(&self, verts: &[Point2; 3]) -> Vec<(Point2, f64)> {
        let [a, b, c] = *verts;
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        let n = self.rule.len();
        let mut out = Vec::with_capacity(n * n);
        for (&xi_t, &wx) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let xi = 0.5 * (1.0 + xi_t);
            for (&eta_t, &wy) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let eta = 0.5 * (1.0 + eta_t);
                let p = [
                    a[0] + xi * (e1[0] + eta * e2[0]),
                    a[1] + xi * (e1[1] + eta * e2[1]),
                ];
                out.push((p, 0.25 * wx * wy * xi * det));
            }
        }
        out
    }

    pub fn integrate<T: crate::spectral1d::Coeff>(
        &self,
        verts: &[Point2; 3],
        mut f: impl FnMut(Point2) -> T,
    ) -> T {
        self.points_on(verts)
            .into_iter()
            .fold(T::zero(), |acc, (p, w)| acc + f(p) * w)
    }
}
