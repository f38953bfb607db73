//! One-dimensional spectral toolkit: Chebyshev extrema grids and
//! differentiation matrices, Chebyshev-T expansions, Gauss-Legendre rules.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Coefficient types an expansion can carry (real or complex).
pub trait Coeff:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Coeff for T where T: Copy + Zero + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Chebyshev extrema on [-1, 1] in ascending order, with the spectral
/// differentiation matrix for that ordering.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    points: Vec<f64>,
    /// Row-major `n x n`.
    diff: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Contract(format!(
                "Chebyshev grid needs n >= 2, got {n}"
            )));
        }
        let m = n - 1;
        // t_j = -cos(j pi / m); written via sin for symmetric rounding
        let points: Vec<f64> = (0..n)
            .map(|j| {
                let k = 2 * j as i64 - m as i64;
                (PI * k as f64 / (2 * m) as f64).sin()
            })
            .collect();
        let weight = |j: usize| -> f64 {
            let c = if j == 0 || j == m { 2.0 } else { 1.0 };
            if j.is_multiple_of(2) {
                c
            } else {
                -c
            }
        };
        let mut diff = vec![0.0; n * n];
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let d = weight(i) / weight(j) / (points[i] - points[j]);
                    diff[i * n + j] = d;
                    row_sum += d;
                }
            }
            // negative-sum trick for the diagonal
            diff[i * n + i] = -row_sum;
        }
        Ok(ChebGrid { points, diff })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Entry `(i, j)` of the differentiation matrix on [-1, 1].
    pub fn diff(&self, i: usize, j: usize) -> f64 {
        self.diff[i * self.points.len() + j]
    }

    /// Applies the differentiation matrix to samples at the grid points.
    pub fn differentiate<T: Coeff>(&self, values: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let row = &self.diff[i * n..(i + 1) * n];
                row.iter()
                    .zip(values)
                    .fold(T::zero(), |acc, (&d, &v)| acc + v * d)
            })
            .collect()
    }

    /// Grid points mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<f64> {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        self.points.iter().map(|&t| c + h * t).collect()
    }
}

/// Chebyshev-T series on an interval `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebExpansion<T = Complex64> {
    coefficients: Vec<T>,
    a: f64,
    b: f64,
}

impl<T: Coeff> ChebExpansion<T> {
    pub fn new(coefficients: Vec<T>, a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Contract(format!(
                "expansion domain [{a}, {b}] must satisfy b > a"
            )));
        }
        if coefficients.is_empty() {
            return Err(Error::Contract(
                "expansion needs at least one coefficient".into(),
            ));
        }
        Ok(ChebExpansion { coefficients, a, b })
    }

    /// Interpolates samples taken at the ascending Chebyshev extrema mapped to `[a, b]`.
    pub fn fit(values: &[T], a: f64, b: f64) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Contract("cannot fit an empty sample set".into()));
        }
        if n == 1 {
            return Self::new(vec![values[0]], a, b);
        }
        let m = n - 1;
        // ascending points t_j = -cos(j pi/m) = cos((m-j) pi/m)
        let mut coefficients = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = T::zero();
            for (j, &v) in values.iter().enumerate() {
                let idx = (k * (m - j)) % (2 * m);
                let tk = (PI * idx as f64 / m as f64).cos();
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                s = s + v * (w * tk);
            }
            let scale = if k == 0 || k == m {
                1.0 / m as f64
            } else {
                2.0 / m as f64
            };
            coefficients.push(s * scale);
        }
        Self::new(coefficients, a, b)
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Clenshaw evaluation; `t` must lie in the domain up to `1e-12` slack.
    pub fn eval(&self, t: f64) -> Result<T> {
        let slack = 1e-12 * (self.b - self.a).max(1.0);
        if !(t >= self.a - slack && t <= self.b + slack) {
            return Err(Error::Contract(format!(
                "evaluation point {t} outside [{}, {}]",
                self.a, self.b
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Clenshaw evaluation without the domain check (clamps the local variable).
    pub fn eval_unchecked(&self, t: f64) -> T {
        let x = ((2.0 * t - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0);
        let mut b1 = T::zero();
        let mut b2 = T::zero();
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + b1 * x - b2
    }

    /// Derivative expansion, rescaled to the domain.
    pub fn derivative(&self) -> Self {
        let n = self.coefficients.len();
        if n == 1 {
            return ChebExpansion {
                coefficients: vec![T::zero()],
                a: self.a,
                b: self.b,
            };
        }
        let mut d = vec![T::zero(); n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + self.coefficients[k] * (2.0 * k as f64);
        }
        d[0] = d[0] * 0.5;
        d.truncate(n - 1);
        let scale = 2.0 / (self.b - self.a);
        ChebExpansion {
            coefficients: d.into_iter().map(|c| c * scale).collect(),
            a: self.a,
            b: self.b,
        }
    }

    /// The same curve traversed backwards: `e'(t) = e(a + b - t)`.
    pub fn reversed(&self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { c * -1.0 })
            .collect();
        ChebExpansion {
            coefficients,
            a: self.a,
            b: self.b,
        }
    }
}

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussRule {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=128).contains(&n) {
            return Err(Error::Contract(format!(
                "Gauss rule size must be in 1..=128, got {n}"
            )));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            // i-th largest root
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            if n % 2 == 1 && i == half - 1 {
                x = 0.0;
            }
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1e-300) || dx == 0.0 {
                    break;
                }
            }
            if n % 2 == 1 && i == half - 1 {
                x = 0.0;
            }
            let (_, d) = legendre(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        Ok(GaussRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: Coeff>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        let s = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + f(c + h * x) * w);
        s * h
    }
}
