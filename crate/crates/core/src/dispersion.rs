//! Dispersion analysis for the fluid-loaded plate.
//!
//! The spectral ODE `(1 + 1/k) eta_tt + 2iU eta_t + (k^4 - U^2 k) eta = 0`
//! has characteristic polynomial
//!
//! ```text
//! D(k, omega) = -(1 + 1/k) omega^2 + 2 U omega + (k^4 - U^2 k)
//! ```
//!
//! with roots
//!
//! ```text
//! omega_pm = (U +/- S(k)) / (1 + 1/k),    S(k)^2 = k^4 + k^3 - U^2 k.
//! ```
//!
//! `S` has branch points at k = 0 and at the three roots of
//! `k^3 + k^2 - U^2 = 0`. We realise a single-valued branch as a product of
//! principal square roots paired so that the cuts are: the segment from 0 to
//! the positive real root, and (for the generic conjugate-pair configuration)
//! two horizontal rays running left from the complex pair. The branch is
//! fixed by `S ~ +k^2` as `|k| -> infinity`, which reproduces the large-k
//! expansions `omega_pm ~ +/- k^2 -/+ k/2 + (U +/- 3/8)`.
//!
//! On the real segment between 0 and the positive root the roots form a
//! conjugate pair (the unstable band). Real inputs there take the boundary
//! value from above the cut (`Im S > 0`); contour work below the axis gets
//! the lower boundary value automatically through the principal square roots.

use crate::error::{Error, Result};
use crate::params::PlateParams;
use crate::quad::{cos_sqrt, sinc_sqrt};
use crate::C64;
use alloc::vec::Vec;
use num_traits::Float;

/// Root label for the asymptotic expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootBranch {
    Plus,
    Minus,
}

/// Per-k dispersion data: roots, splitting coefficients, and the measure
/// normalisation `alpha = 1/(i (omega_- - omega_+))`.
#[derive(Debug, Clone, Copy)]
pub struct DispersionData {
    pub k: C64,
    pub omega_plus: C64,
    pub omega_minus: C64,
    pub c_plus: C64,
    pub c_minus: C64,
    pub alpha: C64,
}

/// A branch cut, stored as a start point plus direction and length
/// (`len` is large-but-finite for the ray cuts).
#[derive(Debug, Clone, Copy)]
pub struct Cut {
    pub start: C64,
    pub dir: C64,
    pub len: f64,
}

impl Cut {
    /// Euclidean distance from `p` to the cut.
    pub fn distance(&self, p: C64) -> f64 {
        let d = p - self.start;
        let t = (d.re * self.dir.re + d.im * self.dir.im).clamp(0.0, self.len);
        (d - self.dir * t).norm()
    }
}

/// Branch points of `omega_pm` and the cuts joining them.
#[derive(Debug, Clone)]
pub struct BranchStructure {
    /// k = 0, the positive real cubic root, then the remaining pair
    /// (conjugate for U above 2/(3 sqrt 3), both real and negative below).
    pub branch_points: Vec<C64>,
    pub cuts: Vec<Cut>,
    /// Positive real root of the cubic.
    pub real_root: f64,
    /// Remaining two cubic roots.
    pub pair: (C64, C64),
}

/// Characteristic polynomial of the spectral ODE evaluated at `(k, omega)`.
pub fn dispersion_residual(k: C64, omega: C64, params: &PlateParams) -> Result<C64> {
    if k.norm() == 0.0 {
        return Err(Error::BranchPointProximity {
            k: (0.0, 0.0),
            distance: 0.0,
        });
    }
    let u = params.u;
    Ok(-(C64::new(1.0, 0.0) + k.inv()) * omega * omega
        + omega * (2.0 * u)
        + (k * k * k * k - k * (u * u)))
}

/// `k^4 + k^3 - U^2 k`, the radicand of the root square root.
#[inline]
pub fn radicand(k: C64, u: f64) -> C64 {
    (k * k * (k + 1.0) - u * u) * k
}

/// Roots of the cubic `k^3 + k^2 - U^2 = 0`, polished by Newton steps.
/// Returns (positive real root, remaining pair).
fn cubic_roots(u: f64) -> (f64, (C64, C64)) {
    // Depressed form y^3 + p y + q with k = y - 1/3.
    let p = -1.0 / 3.0;
    let q = 2.0 / 27.0 - u * u;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let mut roots: Vec<C64> = Vec::with_capacity(3);
    if disc > 0.0 {
        let sd = disc.sqrt();
        let y = Float::cbrt(-q / 2.0 + sd) + Float::cbrt(-q / 2.0 - sd);
        roots.push(C64::new(y - 1.0 / 3.0, 0.0));
        let b = y - 1.0 / 3.0;
        // Deflate: k^2 + (1 + b) k + U^2 / b = 0.
        let half = -(1.0 + b) / 2.0;
        let rad = C64::new(half * half - u * u / b, 0.0).sqrt();
        roots.push(C64::new(half, 0.0) + rad);
        roots.push(C64::new(half, 0.0) - rad);
    } else {
        // Three real roots (small U): trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        for j in 0..3 {
            let y = m * ((theta - 2.0 * core::f64::consts::PI * j as f64) / 3.0).cos();
            roots.push(C64::new(y - 1.0 / 3.0, 0.0));
        }
    }
    // Newton polish on k^3 + k^2 - U^2.
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = *r * *r * (*r + 1.0) - u * u;
            let df = *r * (*r * 3.0 + 2.0);
            if df.norm() > 0.0 {
                *r -= f / df;
            }
        }
    }
    // The cubic is monotone on k > 0, so exactly one root is positive real.
    let mut pos = None;
    let mut rest = Vec::new();
    for &r in &roots {
        if pos.is_none() && r.im.abs() < 1e-12 && r.re > 0.0 {
            pos = Some(r.re);
        } else {
            rest.push(r);
        }
    }
    let b = pos.expect("cubic k^3 + k^2 - U^2 always has one positive root");
    (b, (rest[0], rest[1]))
}

/// Branch points `{0, roots of the cubic}` and the cut layout.
pub fn branch_points(params: &PlateParams) -> BranchStructure {
    let u = params.u;
    let (b, (w1, w2)) = cubic_roots(u);
    let mut branch_points = Vec::with_capacity(4);
    branch_points.push(C64::new(0.0, 0.0));
    branch_points.push(C64::new(b, 0.0));
    branch_points.push(w1);
    branch_points.push(w2);
    let mut cuts = Vec::new();
    cuts.push(Cut {
        start: C64::new(0.0, 0.0),
        dir: C64::new(1.0, 0.0),
        len: b,
    });
    if w1.im.abs() > 1e-12 {
        // Conjugate pair: principal-sqrt cuts run left from each point.
        for &w in &[w1, w2] {
            cuts.push(Cut {
                start: w,
                dir: C64::new(-1.0, 0.0),
                len: 1e9,
            });
        }
    } else {
        // Two real roots: the product cut is the segment between them.
        let (lo, hi) = if w1.re <= w2.re { (w1.re, w2.re) } else { (w2.re, w1.re) };
        cuts.push(Cut {
            start: C64::new(lo, 0.0),
            dir: C64::new(1.0, 0.0),
            len: hi - lo,
        });
    }
    BranchStructure {
        branch_points,
        cuts,
        real_root: b,
        pair: (w1, w2),
    }
}

/// The branch of `sqrt(k^4 + k^3 - U^2 k)` described in the module docs.
fn sqrt_radicand(k: C64, bs: &BranchStructure) -> C64 {
    let f1 = k.sqrt() * (k - bs.real_root).sqrt();
    let f2 = (k - bs.pair.0).sqrt() * (k - bs.pair.1).sqrt();
    f1 * f2
}

fn check_proximity(k: C64, bs: &BranchStructure, params: &PlateParams) -> Result<()> {
    for &bp in &bs.branch_points {
        let d = (k - bp).norm();
        if d < params.exclusion_radius {
            return Err(Error::BranchPointProximity {
                k: (k.re, k.im),
                distance: d,
            });
        }
    }
    Ok(())
}

/// Dispersion environment: parameters plus the branch structure, so that the
/// per-k operations do not re-solve the cubic.
#[derive(Debug, Clone)]
pub struct Dispersion {
    pub params: PlateParams,
    pub branch: BranchStructure,
}

impl Dispersion {
    pub fn new(params: PlateParams) -> Self {
        let branch = branch_points(&params);
        Dispersion { params, branch }
    }

    /// Both roots `(omega_+, omega_-)` of `D(k, .) = 0` on the continuous
    /// branch. Errors within the exclusion radius of a branch point.
    pub fn omega_pm(&self, k: C64) -> Result<(C64, C64)> {
        check_proximity(k, &self.branch, &self.params)?;
        let s = sqrt_radicand(k, &self.branch);
        let u = self.params.u;
        let pref = k / (k + 1.0);
        Ok((pref * (u + s), pref * (u - s)))
    }

    /// d(omega_-)/dk on the same branch.
    pub fn omega_minus_prime(&self, k: C64) -> Result<C64> {
        check_proximity(k, &self.branch, &self.params)?;
        let u = self.params.u;
        let s = sqrt_radicand(k, &self.branch);
        // S' = R'/(2S) with R = k^4 + k^3 - U^2 k.
        let rp = k * k * (k * 4.0 + 3.0) - u * u;
        let sp = rp / (s * 2.0);
        let us = C64::new(u, 0.0) - s;
        Ok((us - k * sp * (k + 1.0)) / ((k + 1.0) * (k + 1.0)))
    }

    /// Splitting coefficients of the two-mode solution plus `alpha`.
    pub fn coefficients(&self, k: C64, eta0_hat: C64) -> Result<DispersionData> {
        let (wp, wm) = self.omega_pm(k)?;
        let denom = wm * wm - wp * wp;
        let scale = 1.0 + k.norm().powi(4);
        if denom.norm() < self.params.tol_root * scale {
            return Err(Error::DegenerateRoots);
        }
        let k4 = k * k * k * k;
        let c_plus = (wm * wm - k4) / denom * eta0_hat;
        let c_minus = -((wp * wp - k4) / denom) * eta0_hat;
        let alpha = ((wm - wp) * C64::new(0.0, 1.0)).inv();
        Ok(DispersionData {
            k,
            omega_plus: wp,
            omega_minus: wm,
            c_plus,
            c_minus,
            alpha,
        })
    }

    /// Large-k expansion `+/- k^2 -/+ k/2 + (U +/- 3/8)`.
    pub fn asymptotic_omega(&self, k: C64, branch: RootBranch) -> C64 {
        let u = self.params.u;
        match branch {
            RootBranch::Plus => k * k - k * 0.5 + (u + 0.375),
            RootBranch::Minus => -k * k + k * 0.5 + (u - 0.375),
        }
    }

    /// `(eta_hat, d eta_hat/dt)` for the free two-mode evolution with initial
    /// transform value `eta0_hat`, evaluated in a confluent form that is
    /// polynomial in k (no square roots), hence stable arbitrarily close to
    /// the branch points:
    ///
    /// ```text
    /// eta_hat = eta0 e^{-i wbar t} [cos(q t) - i mu sin(q t)/q]
    /// ```
    ///
    /// with `wbar = kU/(k+1)`, `q^2 = k^2 (k^4 + k^3 - U^2 k)/(k+1)^2` and
    /// `mu = (q^2-free combination)` below; only even powers of `q` appear.
    pub fn mode_state(&self, k: C64, t: f64, eta0_hat: C64) -> (C64, C64) {
        let u = self.params.u;
        let kp1 = k + 1.0;
        let wbar = k * u / kp1;
        let r = radicand(k, u);
        let q2 = k * k * r / (kp1 * kp1);
        let mu = (r + k * k * (u * u)) / (kp1 * (2.0 * u));
        let w = q2 * (t * t);
        let a = cos_sqrt(w);
        let b = sinc_sqrt(w) * t; // sin(q t)/q
        let i = C64::new(0.0, 1.0);
        let phase = (-i * wbar * t).exp();
        let core = a - i * mu * b;
        let eta = eta0_hat * phase * core;
        let eta_t = eta0_hat * phase * (-i * wbar * core - q2 * b - i * mu * a);
        (eta, eta_t)
    }

    /// Second time derivative from the spectral ODE.
    pub fn mode_state_tt(&self, k: C64, eta: C64, eta_t: C64) -> C64 {
        let u = self.params.u;
        let one_over = C64::new(1.0, 0.0) + k.inv();
        -(eta_t * C64::new(0.0, 2.0 * u) + eta * (k * k * k * k - k * (u * u))) / one_over
    }
}
