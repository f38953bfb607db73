//! Curved triangular elements.
//!
//! An element is three vertices plus three edge curves given as Chebyshev
//! expansions on `[0, 1]`. The map from the reference triangle
//! `{u, v >= 0, u + v <= 1}` is the affine vertex map plus one blended
//! correction per edge:
//!
//! ```text
//! X(u, v) = λ1 P1 + λ2 P2 + λ3 P3 + Σ_(a,b) λa λb · e_ab(w_ab)
//! w_ab = (1 + λb − λa) / 2,   e_ab(w) = d_ab(w) / (w (1 − w))
//! ```
//!
//! where `d_ab(t) = c_ab(t) − ((1 − t) Pa + t Pb)` is the displacement of the
//! edge curve from its chord. On edge `ab` the correction collapses to
//! `d_ab`, on the other two edges it vanishes, and the map is smooth in the
//! closed triangle. `e_ab` is obtained from `d_ab` by exact division in the
//! Chebyshev basis.

mod mesh;

pub use mesh::{Mesh, SharedEdge, TriangleRecord};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spectral1d::ChebExpansion;

pub type Point2 = [f64; 2];

/// Reference-coordinate tolerance for points of the closed unit triangle.
const REF_SLACK: f64 = 1e-12;

/// A parametric edge curve on `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCurve {
    x: ChebExpansion<f64>,
    y: ChebExpansion<f64>,
    dx: ChebExpansion<f64>,
    dy: ChebExpansion<f64>,
}

impl EdgeCurve {
    pub fn new(x: ChebExpansion<f64>, y: ChebExpansion<f64>) -> Result<Self> {
        for e in [&x, &y] {
            if e.domain() != (0.0, 1.0) {
                return Err(Error::Contract(
                    "edge curves are parameterized on [0, 1]".into(),
                ));
            }
            if e.coefficients().iter().any(|c| !c.is_finite()) {
                return Err(Error::Geometry("non-finite curve coefficient".into()));
            }
        }
        let dx = x.derivative();
        let dy = y.derivative();
        Ok(EdgeCurve { x, y, dx, dy })
    }

    pub fn from_coefficients(cx: Vec<f64>, cy: Vec<f64>) -> Result<Self> {
        Self::new(
            ChebExpansion::new(cx, 0.0, 1.0)?,
            ChebExpansion::new(cy, 0.0, 1.0)?,
        )
    }

    /// Degree-1 segment from `a` to `b`.
    pub fn straight(a: Point2, b: Point2) -> Self {
        let mk = |p: f64, q: f64| {
            ChebExpansion::new(vec![(p + q) / 2.0, (q - p) / 2.0], 0.0, 1.0).unwrap()
        };
        Self::new(mk(a[0], b[0]), mk(a[1], b[1])).unwrap()
    }

    /// Samples `f` at an extrema grid of size `n` on `[0, 1]` and fits.
    pub fn fit(n: usize, f: impl Fn(f64) -> Point2) -> Result<Self> {
        let grid = crate::spectral1d::ChebGrid::new(n)?;
        let ts = grid.mapped(0.0, 1.0);
        let pts: Vec<Point2> = ts.iter().map(|&t| f(t)).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        Self::new(
            ChebExpansion::fit(&xs, 0.0, 1.0)?,
            ChebExpansion::fit(&ys, 0.0, 1.0)?,
        )
    }

    pub fn x(&self) -> &ChebExpansion<f64> {
        &self.x
    }

    pub fn y(&self) -> &ChebExpansion<f64> {
        &self.y
    }

    pub fn point(&self, t: f64) -> Point2 {
        [self.x.eval_unchecked(t), self.y.eval_unchecked(t)]
    }

    pub fn tangent(&self, t: f64) -> Point2 {
        [self.dx.eval_unchecked(t), self.dy.eval_unchecked(t)]
    }

    pub fn start(&self) -> Point2 {
        self.point(0.0)
    }

    pub fn end(&self) -> Point2 {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.x.reversed(), self.y.reversed()).unwrap()
    }
}

/// Divides a Chebyshev series with zeros at both endpoints by `w (1 − w)`,
/// the domain being `[0, 1]`. Endpoint values are projected out first.
fn divide_by_bubble(d: &ChebExpansion<f64>) -> ChebExpansion<f64> {
    let mut c: Vec<f64> = d.coefficients().to_vec();
    // remove the linear part fixing d(0), d(1) so the division is exact
    let d0 = d.eval_unchecked(0.0);
    let d1 = d.eval_unchecked(1.0);
    if c.len() < 2 {
        c.resize(2, 0.0);
    }
    c[0] -= (d0 + d1) / 2.0;
    c[1] -= (d1 - d0) / 2.0;
    let n = c.len() - 1;
    if n < 2 {
        return ChebExpansion::new(vec![0.0], 0.0, 1.0).unwrap();
    }
    // (1 − t²) q(t) = d(t), q = Σ_{k ≤ n−2} b_k T_k; back substitution from the top
    let mut b = vec![0.0; n + 3];
    for j in (2..=n).rev() {
        let tail = b[j] / 2.0 - b[j + 2] / 4.0 - c[j];
        if j == 2 {
            b[0] = 2.0 * tail;
        } else {
            b[j - 2] = 4.0 * tail;
        }
    }
    // w (1 − w) = (1 − t²) / 4
    let q: Vec<f64> = b[..=n - 2].iter().map(|v| 4.0 * v).collect();
    ChebExpansion::new(q, 0.0, 1.0).unwrap()
}

/// Precomputed blending data for one edge.
#[derive(Debug, Clone)]
struct Blend {
    bubble: ChebExpansion<f64>,
    dbubble: ChebExpansion<f64>,
}

/// Triangle with possibly curved edges, vertices counterclockwise.
#[derive(Debug, Clone)]
pub struct CurvedTriangle {
    vertices: [Point2; 3],
    edges: [EdgeCurve; 3],
    blends: [Option<[Blend; 2]>; 3],
}

/// Edge `i` runs from vertex `EDGE_VERTS[i].0` to `EDGE_VERTS[i].1`.
const EDGE_VERTS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

fn is_straight(curve: &EdgeCurve) -> bool {
    let lin = |e: &ChebExpansion<f64>| e.coefficients().iter().skip(2).all(|&c| c == 0.0);
    lin(&curve.x) && lin(&curve.y)
}

impl CurvedTriangle {
    /// Builds an element from vertices and the edge curves `c12, c23, c31`.
    /// Endpoint mismatches above `1e-9` are rejected.
    pub fn new(vertices: [Point2; 3], edges: [EdgeCurve; 3]) -> Result<Self> {
        let area = signed_area(&vertices);
        if !(area > 0.0) {
            return Err(Error::Geometry(format!(
                "vertices {vertices:?} are not counterclockwise"
            )));
        }
        let mut blends: [Option<[Blend; 2]>; 3] = [None, None, None];
        for (i, &(a, b)) in EDGE_VERTS.iter().enumerate() {
            let (pa, pb) = (vertices[a], vertices[b]);
            let curve = &edges[i];
            let mismatch = dist(curve.start(), pa).max(dist(curve.end(), pb));
            if mismatch > 1e-9 {
                return Err(Error::Geometry(format!(
                    "edge {} endpoints miss vertices by {mismatch:e}",
                    i + 1
                )));
            }
            if is_straight(curve) {
                continue;
            }
            let mut pair = Vec::with_capacity(2);
            for (comp, e) in [(0, &curve.x), (1, &curve.y)] {
                // d(t) = c(t) − chord(t); chord is degree 1 in T_0, T_1
                let mut coef = e.coefficients().to_vec();
                if coef.len() < 2 {
                    coef.resize(2, 0.0);
                }
                coef[0] -= (pa[comp] + pb[comp]) / 2.0;
                coef[1] -= (pb[comp] - pa[comp]) / 2.0;
                let d = ChebExpansion::new(coef, 0.0, 1.0)?;
                let bubble = divide_by_bubble(&d);
                let dbubble = bubble.derivative();
                pair.push(Blend { bubble, dbubble });
            }
            let y = pair.pop().unwrap();
            let x = pair.pop().unwrap();
            blends[i] = Some([x, y]);
        }
        Ok(CurvedTriangle {
            vertices,
            edges,
            blends,
        })
    }

    pub fn straight(vertices: [Point2; 3]) -> Result<Self> {
        let edges = [
            EdgeCurve::straight(vertices[0], vertices[1]),
            EdgeCurve::straight(vertices[1], vertices[2]),
            EdgeCurve::straight(vertices[2], vertices[0]),
        ];
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[Point2; 3] {
        &self.vertices
    }

    /// Edge curve `index ∈ {0, 1, 2}` (c12, c23, c31).
    pub fn edge(&self, index: usize) -> &EdgeCurve {
        &self.edges[index]
    }

    pub fn is_affine(&self) -> bool {
        self.blends.iter().all(|b| b.is_none())
    }

    fn check_reference(u: f64, v: f64) -> Result<()> {
        if u < -REF_SLACK
            || v < -REF_SLACK
            || u + v > 1.0 + REF_SLACK
            || !u.is_finite()
            || !v.is_finite()
        {
            return Err(Error::Contract(format!(
                "({u}, {v}) is outside the reference triangle"
            )));
        }
        Ok(())
    }

    /// Transfinite map of a reference point.
    pub fn map(&self, u: f64, v: f64) -> Result<Point2> {
        Self::check_reference(u, v)?;
        Ok(self.map_unchecked(u, v))
    }

    pub fn map_unchecked(&self, u: f64, v: f64) -> Point2 {
        self.map_and_jacobian(u, v).0
    }

    /// Map and its Jacobian `[[∂x/∂u, ∂x/∂v], [∂y/∂u, ∂y/∂v]]`.
    pub fn map_and_jacobian(&self, u: f64, v: f64) -> (Point2, [[f64; 2]; 2]) {
        let [p1, p2, p3] = self.vertices;
        let lam = [1.0 - u - v, u, v];
        let dlam_du = [-1.0, 1.0, 0.0];
        let dlam_dv = [-1.0, 0.0, 1.0];
        let mut x = [0.0; 2];
        let mut jac = [[0.0; 2]; 2];
        for c in 0..2 {
            x[c] = lam[0] * p1[c] + lam[1] * p2[c] + lam[2] * p3[c];
            jac[c][0] = p2[c] - p1[c];
            jac[c][1] = p3[c] - p1[c];
        }
        for (i, &(a, b)) in EDGE_VERTS.iter().enumerate() {
            let Some(bl) = &self.blends[i] else { continue };
            let w = (0.5 * (1.0 + lam[b] - lam[a])).clamp(0.0, 1.0);
            let prod = lam[a] * lam[b];
            let dprod_du = dlam_du[a] * lam[b] + lam[a] * dlam_du[b];
            let dprod_dv = dlam_dv[a] * lam[b] + lam[a] * dlam_dv[b];
            let dw_du = 0.5 * (dlam_du[b] - dlam_du[a]);
            let dw_dv = 0.5 * (dlam_dv[b] - dlam_dv[a]);
            for c in 0..2 {
                let e = bl[c].bubble.eval_unchecked(w);
                let de = bl[c].dbubble.eval_unchecked(w);
                x[c] += prod * e;
                jac[c][0] += dprod_du * e + prod * de * dw_du;
                jac[c][1] += dprod_dv * e + prod * de * dw_dv;
            }
        }
        (x, jac)
    }

    pub fn jacobian(&self, u: f64, v: f64) -> Result<[[f64; 2]; 2]> {
        Self::check_reference(u, v)?;
        Ok(self.map_and_jacobian(u, v).1)
    }

    /// Jacobian determinant, failing with `InvalidElement` when nonpositive.
    pub fn jacobian_det(&self, element: usize, u: f64, v: f64) -> Result<f64> {
        let j = self.jacobian(u, v)?;
        let det = det2(&j);
        if !(det > 0.0) {
            return Err(Error::InvalidElement { element, det, u, v });
        }
        Ok(det)
    }

    /// Point, outward unit normal and speed of physical edge `edge ∈ {0,1,2}`.
    pub fn edge_trace(&self, edge: usize, t: f64) -> Result<(Point2, Point2, f64)> {
        if edge > 2 {
            return Err(Error::Contract(format!("edge index {edge} out of range")));
        }
        if !(-REF_SLACK..=1.0 + REF_SLACK).contains(&t) {
            return Err(Error::Contract(format!(
                "edge parameter {t} outside [0, 1]"
            )));
        }
        let c = &self.edges[edge];
        let d = c.tangent(t);
        let speed = d[0].hypot(d[1]);
        if !(speed > 0.0) {
            return Err(Error::Cusp {
                element: usize::MAX,
                edge,
                t,
            });
        }
        Ok((c.point(t), [d[1] / speed, -d[0] / speed], speed))
    }

    /// Reference point at parameter `t` of reference edge `edge`.
    pub fn reference_edge_point(edge: usize, t: f64) -> Point2 {
        match edge {
            0 => [t, 0.0],
            1 => [1.0 - t, t],
            _ => [0.0, 1.0 - t],
        }
    }
}

pub(crate) fn det2(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

pub(crate) fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn signed_area(v: &[Point2; 3]) -> f64 {
    0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
}

/// A straight sub-triangle of the reference triangle, counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefCell {
    pub vertices: [Point2; 3],
}

impl RefCell {
    pub const UNIT: RefCell = RefCell {
        vertices: [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(vertices: [Point2; 3]) -> Result<Self> {
        if !(signed_area(&vertices) > 0.0) {
            return Err(Error::Contract(format!(
                "reference cell {vertices:?} has nonpositive area"
            )));
        }
        Ok(RefCell { vertices })
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Midpoint 4-way split; the middle child keeps the parent's orientation.
    pub fn subdivide(&self) -> [RefCell; 4] {
        let [a, b, c] = self.vertices;
        let mid = |p: Point2, q: Point2| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        [
            RefCell {
                vertices: [a, ab, ca],
            },
            RefCell {
                vertices: [ab, b, bc],
            },
            RefCell {
                vertices: [ca, bc, c],
            },
            RefCell {
                vertices: [ab, bc, ca],
            },
        ]
    }

    /// Uniform subdivision to the given depth.
    pub fn subdivide_uniform(&self, depth: usize) -> Vec<RefCell> {
        let mut cells = vec![*self];
        for _ in 0..depth {
            cells = cells.iter().flat_map(|c| c.subdivide()).collect();
        }
        cells
    }

    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        let [a, b, c] = self.vertices;
        let area = self.area();
        let l1 = signed_area(&[p, b, c]) / area;
        let l2 = signed_area(&[a, p, c]) / area;
        let l3 = signed_area(&[a, b, p]) / area;
        l1 >= -slack && l2 >= -slack && l3 >= -slack
    }
}

#[cfg(test)]
mod tests;
