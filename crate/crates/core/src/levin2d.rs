//! Multivariate Levin method on curved triangles.
//!
//! For each reference sub-cell the collocation system `∇·p + i∇g̃·p = f̃` is
//! solved in a local monomial basis, the residual is checked on an
//! independent node set, and accepted cells are reduced to boundary integrals
//! `∮ n·p·e^{ig̃}` over their three straight edges. Cells with a large
//! residual are split in four.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{CurvedTriangle, Mesh, Point2, RefCell};
use crate::integrand::{OscillatoryIntegrand, PulledBack};
use crate::levin1d::{Levin1d, Levin1dConfig, Levin1dResult, LineOscillator};
use crate::numkernel::{tsvd_solve, DenseMatrix, DEFAULT_EPS_SVD};
use crate::simplex::{barycentric_nodes, poly_dim};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levin2dConfig {
    /// Basis degree.
    pub k: usize,
    /// Collocation degree, `> k`.
    pub l: usize,
    pub eps_svd: f64,
    /// Leaf acceptance threshold, relative to `max(1, max|f̃|)` on the nodes.
    pub residual_tol: f64,
    pub max_depth: usize,
    /// Extra uniform subdivision levels applied below every accepted cell.
    pub extra_levels: usize,
    pub cfg1d: Levin1dConfig,
}

impl Default for Levin2dConfig {
    fn default() -> Self {
        Levin2dConfig {
            k: 8,
            l: 10,
            eps_svd: DEFAULT_EPS_SVD,
            residual_tol: 1e-10,
            max_depth: 12,
            extra_levels: 0,
            cfg1d: Levin1dConfig::default(),
        }
    }
}

impl Levin2dConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.l <= self.k {
            return Err(Error::Contract(format!(
                "need l > k >= 1, got k = {}, l = {}",
                self.k, self.l
            )));
        }
        if !(self.eps_svd > 0.0 && self.eps_svd < 1.0) {
            return Err(Error::Contract(format!(
                "eps_svd must lie in (0, 1), got {}",
                self.eps_svd
            )));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::Contract(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        self.cfg1d.validate()
    }
}

/// Monomials `û^a v̂^b`, `a + b ≤ degree`, ordered by total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    degree: usize,
    exponents: Vec<(usize, usize)>,
}

impl MonomialBasis {
    pub fn new(degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(poly_dim(degree));
        for d in 0..=degree {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        MonomialBasis { degree, exponents }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    /// Values and first partials at a local point, written into the slices.
    pub fn eval(&self, p: Point2, val: &mut [f64], du: &mut [f64], dv: &mut [f64]) {
        let n = self.degree + 1;
        let mut pu = [1.0f64; 32];
        let mut pv = [1.0f64; 32];
        debug_assert!(n < 32);
        for i in 1..n {
            pu[i] = pu[i - 1] * p[0];
            pv[i] = pv[i - 1] * p[1];
        }
        for (j, &(a, b)) in self.exponents.iter().enumerate() {
            val[j] = pu[a] * pv[b];
            du[j] = if a > 0 {
                a as f64 * pu[a - 1] * pv[b]
            } else {
                0.0
            };
            dv[j] = if b > 0 {
                b as f64 * pu[a] * pv[b - 1]
            } else {
                0.0
            };
        }
    }
}

/// Local frame of a cell: bounding box mapped to `[−1, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    center: Point2,
    half: Point2,
}

impl Frame {
    fn of(cell: &RefCell) -> Frame {
        let v = &cell.vertices;
        let lo = [
            v[0][0].min(v[1][0]).min(v[2][0]),
            v[0][1].min(v[1][1]).min(v[2][1]),
        ];
        let hi = [
            v[0][0].max(v[1][0]).max(v[2][0]),
            v[0][1].max(v[1][1]).max(v[2][1]),
        ];
        Frame {
            center: [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])],
            half: [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])],
        }
    }

    fn local(&self, p: Point2) -> Point2 {
        [
            (p[0] - self.center[0]) / self.half[0],
            (p[1] - self.center[1]) / self.half[1],
        ]
    }
}

/// Solution of the collocation system on one cell.
///
/// The vector field in reference coordinates is
/// `p = (h_u·p̂_1, h_v·p̂_2)` where `p̂_c = Σ_j coeffs[c·n + j]·φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevinField {
    pub cell: RefCell,
    basis: MonomialBasis,
    frame: Frame,
    pub coeffs: Vec<Complex64>,
    /// `max |L[p] − f̃|` on the check nodes.
    pub residual_inf: f64,
    /// `max(1, max|f̃|)` on the collocation nodes.
    pub f_scale: f64,
    pub rank: usize,
}

impl LevinField {
    /// Field with given local-basis coefficients (two blocks of `dim P_k`).
    pub fn from_coefficients(cell: RefCell, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let basis = MonomialBasis::new(degree);
        if coeffs.len() != 2 * basis.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(LevinField {
            cell,
            frame: Frame::of(&cell),
            basis,
            coeffs,
            residual_inf: 0.0,
            f_scale: 1.0,
            rank: 0,
        })
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    fn eval_hat(&self, p: Point2) -> ([Complex64; 2], [Complex64; 2]) {
        let n = self.basis.len();
        let mut val = vec![0.0; n];
        let mut du = vec![0.0; n];
        let mut dv = vec![0.0; n];
        self.basis
            .eval(self.frame.local(p), &mut val, &mut du, &mut dv);
        let zero = Complex64::new(0.0, 0.0);
        let (mut p1, mut p2, mut d1, mut d2) = (zero, zero, zero, zero);
        for j in 0..n {
            p1 += self.coeffs[j] * val[j];
            p2 += self.coeffs[n + j] * val[j];
            d1 += self.coeffs[j] * du[j];
            d2 += self.coeffs[n + j] * dv[j];
        }
        ([p1, p2], [d1, d2])
    }

    /// `p` at a reference point.
    pub fn value(&self, p: Point2) -> [Complex64; 2] {
        let (ph, _) = self.eval_hat(p);
        [ph[0] * self.frame.half[0], ph[1] * self.frame.half[1]]
    }

    /// `∇·p` at a reference point.
    pub fn divergence(&self, p: Point2) -> Complex64 {
        let (_, d) = self.eval_hat(p);
        d[0] + d[1]
    }
}

/// Adaptive quadrature outcome with work counters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Heuristic: accepted residuals times cell areas plus 1D estimates.
    pub err_est: f64,
    pub n_leaves: usize,
    pub n_boundary_segments: usize,
    pub svd_calls: usize,
    pub max_depth_reached: usize,
}

impl QuadratureResult {
    /// Adds `other` into `self`; summation order is the caller's.
    pub fn accumulate(&mut self, other: &QuadratureResult) {
        self.value += other.value;
        self.err_est += other.err_est;
        self.n_leaves += other.n_leaves;
        self.n_boundary_segments += other.n_boundary_segments;
        self.svd_calls += other.svd_calls;
        self.max_depth_reached = self.max_depth_reached.max(other.max_depth_reached);
    }

    /// Index-ordered reduction of per-element results.
    pub fn reduce<'a>(parts: impl IntoIterator<Item = &'a QuadratureResult>) -> QuadratureResult {
        let mut total = QuadratureResult::default();
        for p in parts {
            total.accumulate(p);
        }
        total
    }
}

/// Multivariate Levin solver with precomputed node sets.
#[derive(Debug, Clone)]
pub struct Levin2d {
    cfg: Levin2dConfig,
    basis: MonomialBasis,
    colloc: Vec<[f64; 3]>,
    check: Vec<[f64; 3]>,
    line: Levin1d,
}

fn at(cell: &RefCell, l: &[f64; 3]) -> Point2 {
    let v = &cell.vertices;
    [
        l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
        l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
    ]
}

struct EdgeLine<'a, I: ?Sized> {
    field: &'a LevinField,
    osc: &'a I,
    a: Point2,
    d: Point2,
}

impl<I: OscillatoryIntegrand + ?Sized> LineOscillator for EdgeLine<'_, I> {
    fn sample(&self, t: f64) -> (Complex64, f64, f64) {
        let x = [self.a[0] + t * self.d[0], self.a[1] + t * self.d[1]];
        let p = self.field.value(x);
        let s = self.osc.sample(x);
        // n·p·|γ'| with outward normal (d_y, −d_x)/|d|
        (
            p[0] * self.d[1] - p[1] * self.d[0],
            s.phase,
            s.grad[0] * self.d[0] + s.grad[1] * self.d[1],
        )
    }
}

impl Levin2d {
    pub fn new(cfg: Levin2dConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Levin2d {
            cfg,
            basis: MonomialBasis::new(cfg.k),
            colloc: barycentric_nodes(cfg.l),
            check: barycentric_nodes(cfg.l + 2),
            line: Levin1d::new(cfg.cfg1d)?,
        })
    }

    pub fn config(&self) -> &Levin2dConfig {
        &self.cfg
    }

    /// Rows of `L[φ]` for both components at reference point `x`, plus `f̃(x)`.
    fn operator_row<I: OscillatoryIntegrand + ?Sized>(
        &self,
        osc: &I,
        frame: &Frame,
        x: Point2,
        row: &mut [Complex64],
    ) -> Complex64 {
        let n = self.basis.len();
        let mut val = [0.0f64; 512];
        let mut du = [0.0f64; 512];
        let mut dv = [0.0f64; 512];
        self.basis
            .eval(frame.local(x), &mut val[..n], &mut du[..n], &mut dv[..n]);
        let s = osc.sample(x);
        let gu = s.grad[0] * frame.half[0];
        let gv = s.grad[1] * frame.half[1];
        for j in 0..n {
            row[j] = Complex64::new(du[j], gu * val[j]);
            row[n + j] = Complex64::new(dv[j], gv * val[j]);
        }
        s.amplitude
    }

    /// Collocation solve and residual check on one cell.
    pub fn solve<I: OscillatoryIntegrand + ?Sized>(
        &self,
        osc: &I,
        cell: &RefCell,
    ) -> Result<LevinField> {
        let n = self.basis.len();
        let frame = Frame::of(cell);
        let m = self.colloc.len();
        let mut mat = DenseMatrix::zeros(m, 2 * n);
        let mut rhs = Vec::with_capacity(m);
        let mut f_scale = 1.0f64;
        for (i, l) in self.colloc.iter().enumerate() {
            let f = self.operator_row(osc, &frame, at(cell, l), mat.row_mut(i));
            f_scale = f_scale.max(f.norm());
            rhs.push(f);
        }
        if rhs
            .iter()
            .chain(mat.as_slice())
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain(format!(
                "integrand is not finite on reference cell {:?}",
                cell.vertices
            )));
        }
        let (coeffs, report) = tsvd_solve(&mat, &rhs, self.cfg.eps_svd)?;
        let mut row = vec![Complex64::new(0.0, 0.0); 2 * n];
        let mut residual_inf = 0.0f64;
        for l in &self.check {
            let f = self.operator_row(osc, &frame, at(cell, l), &mut row);
            let lp: Complex64 = row.iter().zip(&coeffs).map(|(a, c)| a * c).sum();
            residual_inf = residual_inf.max((lp - f).norm());
        }
        Ok(LevinField {
            cell: *cell,
            basis: self.basis.clone(),
            frame,
            coeffs,
            residual_inf,
            f_scale,
            rank: report.rank_used,
        })
    }

    /// `∮ n·p·e^{ig̃}` over the cell's three edges.
    pub fn boundary<I: OscillatoryIntegrand + ?Sized>(
        &self,
        field: &LevinField,
        osc: &I,
    ) -> Result<Levin1dResult> {
        let mut total = Levin1dResult::default();
        let v = &field.cell.vertices;
        for e in 0..3 {
            let (a, b) = (v[e], v[(e + 1) % 3]);
            let line = EdgeLine {
                field,
                osc,
                a,
                d: [b[0] - a[0], b[1] - a[1]],
            };
            let r = self.line.adaptive(&line, 0.0, 1.0)?;
            total.value += r.value;
            total.err_est += r.err_est;
            total.n_segments += r.n_segments;
            total.svd_calls += r.svd_calls;
        }
        Ok(total)
    }

    /// Adaptive integral of an integrand already given on the reference triangle.
    pub fn integrate_reference<I: OscillatoryIntegrand + ?Sized>(
        &self,
        osc: &I,
    ) -> Result<QuadratureResult> {
        let mut acc = QuadratureResult::default();
        self.refine(osc, &RefCell::UNIT, 0, self.cfg.extra_levels, &mut acc)?;
        Ok(acc)
    }

    fn refine<I: OscillatoryIntegrand + ?Sized>(
        &self,
        osc: &I,
        cell: &RefCell,
        depth: usize,
        forced: usize,
        acc: &mut QuadratureResult,
    ) -> Result<()> {
        let field = self.solve(osc, cell)?;
        acc.svd_calls += 1;
        let accepted = field.residual_inf <= self.cfg.residual_tol * field.f_scale;
        if accepted && forced == 0 {
            let b = self.boundary(&field, osc)?;
            acc.value += b.value;
            acc.err_est += field.residual_inf * cell.area() + b.err_est;
            acc.n_leaves += 1;
            acc.n_boundary_segments += b.n_segments;
            acc.svd_calls += b.svd_calls;
            acc.max_depth_reached = acc.max_depth_reached.max(depth);
            return Ok(());
        }
        if !accepted && depth >= self.cfg.max_depth {
            return Err(Error::Levin2dNonConvergence {
                cell: cell.vertices,
                depth: self.cfg.max_depth,
            });
        }
        let next = if accepted { forced - 1 } else { forced };
        for child in cell.subdivide().iter() {
            self.refine(osc, child, depth + 1, next, acc)?;
        }
        Ok(())
    }

    pub fn integrate_element<I: OscillatoryIntegrand + ?Sized>(
        &self,
        element: &CurvedTriangle,
        osc: &I,
        index: usize,
    ) -> Result<QuadratureResult> {
        let pb = PulledBack::new(element, osc, index).map_err(|e| e.in_element(index))?;
        self.integrate_reference(&pb)
            .map_err(|e| e.in_element(index))
    }

    /// Sequential sum over elements in index order.
    pub fn integrate_mesh<I: OscillatoryIntegrand + ?Sized>(
        &self,
        mesh: &Mesh,
        osc: &I,
    ) -> Result<QuadratureResult> {
        let mut total = QuadratureResult::default();
        for (i, el) in mesh.elements().iter().enumerate() {
            total.accumulate(&self.integrate_element(el, osc, i)?);
        }
        Ok(total)
    }
}

pub fn levin2d_solve<I: OscillatoryIntegrand + ?Sized>(
    osc: &I,
    cell: &RefCell,
    cfg: &Levin2dConfig,
) -> Result<LevinField> {
    Levin2d::new(*cfg)?.solve(osc, cell)
}

pub fn boundary_reduce<I: OscillatoryIntegrand + ?Sized>(
    field: &LevinField,
    osc: &I,
    cfg1d: &Levin1dConfig,
) -> Result<Levin1dResult> {
    let cfg = Levin2dConfig {
        k: field.basis.degree().max(1),
        l: field.basis.degree().max(1) + 1,
        cfg1d: *cfg1d,
        ..Default::default()
    };
    Levin2d::new(cfg)?.boundary(field, osc)
}

pub fn integrate_element<I: OscillatoryIntegrand + ?Sized>(
    element: &CurvedTriangle,
    osc: &I,
    cfg: &Levin2dConfig,
) -> Result<QuadratureResult> {
    Levin2d::new(*cfg)?.integrate_element(element, osc, 0)
}

pub fn integrate_mesh<I: OscillatoryIntegrand + ?Sized>(
    mesh: &Mesh,
    osc: &I,
    cfg: &Levin2dConfig,
) -> Result<QuadratureResult> {
    Levin2d::new(*cfg)?.integrate_mesh(mesh, osc)
}
