//! Oscillatory integrands `f(x)·exp(i·g(x))` and their pullback to the
//! reference triangle of a curved element.

use crate::error::Result;
use crate::geometry::{det2, CurvedTriangle, Point2};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Amplitude, phase and phase gradient at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub amplitude: Complex64,
    pub phase: f64,
    pub grad: Point2,
}

/// `exp(i·theta)`
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// A bivariate integrand split into a slowly varying complex amplitude `f`
/// and a real phase `g`.
pub trait OscillatoryIntegrand {
    fn sample(&self, x: Point2) -> PhaseSample;

    fn amplitude(&self, x: Point2) -> Complex64 {
        self.sample(x).amplitude
    }

    fn phase(&self, x: Point2) -> f64 {
        self.sample(x).phase
    }

    fn grad_phase(&self, x: Point2) -> Point2 {
        self.sample(x).grad
    }

    /// The full oscillatory value `f(x)·exp(i·g(x))`.
    fn value(&self, x: Point2) -> Complex64 {
        let s = self.sample(x);
        s.amplitude * cis(s.phase)
    }
}

impl<T: OscillatoryIntegrand + ?Sized> OscillatoryIntegrand for &T {
    fn sample(&self, x: Point2) -> PhaseSample {
        (**self).sample(x)
    }
}

/// Integrand from a closure returning a [`PhaseSample`].
#[derive(Clone, Copy)]
pub struct FnIntegrand<F>(pub F);

impl<F: Fn(Point2) -> PhaseSample> OscillatoryIntegrand for FnIntegrand<F> {
    fn sample(&self, x: Point2) -> PhaseSample {
        (self.0)(x)
    }
}

/// Integrand pulled back to reference coordinates of one element:
/// `f̃ = f∘X · det J`, `g̃ = g∘X`, `∇g̃ = Jᵀ (∇g)∘X`.
#[derive(Clone, Copy)]
pub struct PulledBack<'a, I: ?Sized> {
    element: &'a CurvedTriangle,
    integrand: &'a I,
}

impl<'a, I: OscillatoryIntegrand + ?Sized> PulledBack<'a, I> {
    /// Checks the Jacobian at the vertices and centroid; elements coming
    /// from a [`crate::Mesh`] have already been validated more thoroughly.
    pub fn new(element: &'a CurvedTriangle, integrand: &'a I, index: usize) -> Result<Self> {
        for (u, v) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0 / 3.0, 1.0 / 3.0)] {
            element.jacobian_det(index, u, v)?;
        }
        Ok(PulledBack { element, integrand })
    }

    pub fn element(&self) -> &CurvedTriangle {
        self.element
    }
}

impl<I: OscillatoryIntegrand + ?Sized> OscillatoryIntegrand for PulledBack<'_, I> {
    fn sample(&self, p: Point2) -> PhaseSample {
        let (x, j) = self.element.map_and_jacobian(p[0], p[1]);
        let s = self.integrand.sample(x);
        PhaseSample {
            amplitude: s.amplitude * det2(&j),
            phase: s.phase,
            grad: [
                j[0][0] * s.grad[0] + j[1][0] * s.grad[1],
                j[0][1] * s.grad[0] + j[1][1] * s.grad[1],
            ],
        }
    }
}

/// Largest relative mismatch between `grad_phase` and central differences
/// of `phase` (step `h`) over the given points.
pub fn gradient_defect<I: OscillatoryIntegrand + ?Sized>(
    osc: &I,
    points: &[Point2],
    h: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for &p in points {
        let g = osc.grad_phase(p);
        let fd = [
            (osc.phase([p[0] + h, p[1]]) - osc.phase([p[0] - h, p[1]])) / (2.0 * h),
            (osc.phase([p[0], p[1] + h]) - osc.phase([p[0], p[1] - h])) / (2.0 * h),
        ];
        let scale = g[0].hypot(g[1]).max(1.0);
        worst = worst.max((fd[0] - g[0]).hypot(fd[1] - g[1]) / scale);
    }
    worst
}
