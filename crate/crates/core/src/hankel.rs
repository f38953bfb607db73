//! Modulus/phase form of the Hankel functions `H_ν^{(1)}(z) = M_ν(z)·e^{iθ_ν(z)}`
//! for `ν = 0, 1`.
//!
//! Below `z = 2` the Bessel functions come from their ascending series and the
//! phase from `atan2`, which stays on one branch there. Above, the integral
//! representation
//!
//! `H_ν(z) = √(2/(πz))·e^{i(z − νπ/2 − π/4)}/Γ(ν+½)·∫ e^{−u} u^{ν−½} (1 + iu/(2z))^{ν−½} du`
//!
//! is evaluated with the trapezoid rule after `u = s²`, which converges
//! geometrically and yields the unwrapped phase directly.

use core::f64::consts::{FRAC_2_PI, FRAC_PI_2, FRAC_PI_4, PI};

use alloc::format;

use crate::error::{Error, Result};
use crate::integrand::cis;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const SWITCH: f64 = 2.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const S_MAX: f64 = 6.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelAmplitudePhase {
    pub m0: f64,
    pub theta0: f64,
    pub m1: f64,
    pub theta1: f64,
    /// `θ0'(z)`, from the Wronskian `M0²·θ0' = 2/(πz)`.
    pub dtheta0: f64,
    z: f64,
    /// `θ_ν − z`, kept separately so large phases lose no digits.
    offset: [f64; 2],
}

impl HankelAmplitudePhase {
    pub fn h0(&self) -> Complex64 {
        cis(self.z) * Complex64::from_polar(self.m0, self.offset[0])
    }

    pub fn h1(&self) -> Complex64 {
        cis(self.z) * Complex64::from_polar(self.m1, self.offset[1])
    }

    /// `θ1 − θ0` without the cancellation of two large phases.
    pub fn phase_gap(&self) -> f64 {
        self.offset[1] - self.offset[0]
    }
}

pub fn hankel_phase_amp(z: f64) -> Result<HankelAmplitudePhase> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "Hankel argument must be positive and finite, got {z}"
        )));
    }
    let (m0, o0, m1, o1) = if z < SWITCH { series(z) } else { integral(z) };
    Ok(HankelAmplitudePhase {
        m0,
        theta0: z + o0,
        m1,
        theta1: z + o1,
        dtheta0: FRAC_2_PI / (z * m0 * m0),
        z,
        offset: [o0, o1],
    })
}

fn series(z: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * z * z;
    let half = 0.5 * z;
    // J0 = Σ (−q)^k/(k!)², J1 = (z/2) Σ (−q)^k/(k!(k+1)!)
    let (mut j0, mut j1) = (0.0, 0.0);
    let (mut y0s, mut y1s) = (0.0, 0.0);
    let mut t0 = 1.0; // (−q)^k/(k!)²
    let mut t1 = half; // (z/2)(−q)^k/(k!(k+1)!)
    let mut hk = 0.0; // H_k
    for k in 0..40 {
        let kf = k as f64;
        let hk1 = hk + 1.0 / (kf + 1.0);
        j0 += t0;
        j1 += t1;
        y0s -= hk * t0;
        y1s += (hk + hk1) * t1;
        if t0.abs() < 1e-18 * j0.abs().max(1e-300) && k > 2 {
            break;
        }
        t0 *= -q / ((kf + 1.0) * (kf + 1.0));
        t1 *= -q / ((kf + 1.0) * (kf + 2.0));
        hk = hk1;
    }
    let lg = (half).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * (lg * j0 + y0s);
    let y1 = -FRAC_2_PI / z + FRAC_2_PI * lg * j1 - y1s / PI;
    (
        j0.hypot(y0),
        y0.atan2(j0) - z,
        j1.hypot(y1),
        y1.atan2(j1) - z,
    )
}

fn integral(z: f64) -> (f64, f64, f64, f64) {
    let h = (2.0 * PI * z.sqrt() / (37.0 + z)).min(0.5);
    let n = (S_MAX / h).ceil() as usize;
    let c = Complex64::new(0.0, 0.5 / z);
    let mut i0 = Complex64::new(0.0, 0.0);
    let mut i1 = Complex64::new(0.0, 0.0);
    // integrands are even in s: sum the positive half twice
    for k in (1..=n).rev() {
        let s2 = (k as f64 * h).powi(2);
        let e = (-s2).exp();
        let r = (Complex64::new(1.0, 0.0) + c * s2).sqrt();
        i0 += e / r;
        i1 += r * (s2 * e);
    }
    i0 = (i0 * 2.0 + 1.0) * h;
    i1 = i1 * 2.0 * h;
    let pre = (FRAC_2_PI / z).sqrt();
    let sqrt_pi = PI.sqrt();
    let m0 = pre * i0.norm() / sqrt_pi;
    let m1 = pre * i1.norm() * 2.0 / sqrt_pi;
    (
        m0,
        i0.arg() - FRAC_PI_4,
        m1,
        i1.arg() - FRAC_PI_2 - FRAC_PI_4,
    )
}
