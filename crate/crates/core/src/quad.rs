//! Adaptive complex-path quadrature and small analytic quadrature helpers.
//!
//! The engine is a Gauss-Kronrod 7-15 pair with recursive bisection, applied
//! to straight segments in the complex k-plane (paths are piecewise linear or
//! rays). Rays are integrated panel by panel with geometric growth until the
//! tail stops contributing.

use crate::error::{Error, Result};
use crate::C64;
use alloc::vec::Vec;
use num_traits::Float;

/// Kronrod-15 abscissae on [-1, 1], positive half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];
/// Kronrod-15 weights.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];
/// Gauss-7 weights, matching the odd Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_depth: 28,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }
}

/// One Gauss-Kronrod 7-15 panel over the straight segment `a -> b`.
/// Returns (kronrod value, error estimate).
fn gk15<F: Fn(C64) -> C64>(f: &F, a: C64, b: C64) -> (C64, f64) {
    let half = (b - a) * 0.5;
    let mid = (a + b) * 0.5;
    let mut kron = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let fv = f(mid);
            kron += fv * wk;
            gauss += fv * WG[3];
        } else {
            let fp = f(mid + half * x);
            let fm = f(mid - half * x);
            kron += (fp + fm) * wk;
            if i % 2 == 1 {
                gauss += (fp + fm) * WG[i / 2];
            }
        }
    }
    let scale = half.norm();
    let err = (kron - gauss).norm() * scale;
    (kron * half, err)
}

/// Adaptive integral of `f` along the straight segment `a -> b`: global
/// worst-leaf-first subdivision against a shared error budget.
pub fn integrate_segment<F: Fn(C64) -> C64>(
    f: &F,
    a: C64,
    b: C64,
    opt: &QuadOptions,
) -> Result<(C64, f64)> {
    struct Leaf {
        a: C64,
        b: C64,
        val: C64,
        err: f64,
        depth: usize,
    }
    let (v0, e0) = gk15(f, a, b);
    let mut leaves = alloc::vec![Leaf {
        a,
        b,
        val: v0,
        err: e0,
        depth: 0
    }];
    let max_leaves = 4096usize;
    loop {
        let mut total = C64::new(0.0, 0.0);
        let mut err = 0.0;
        for l in &leaves {
            total += l.val;
            err += l.err;
        }
        let target = opt.abs_tol.max(opt.rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        // split the worst leaf still allowed to split
        let mut worst: Option<usize> = None;
        let mut worst_err = 0.0;
        for (i, l) in leaves.iter().enumerate() {
            if l.depth < opt.max_depth && l.err > worst_err {
                worst_err = l.err;
                worst = Some(i);
            }
        }
        let stop = worst.is_none() || leaves.len() >= max_leaves;
        if stop {
            // the Gauss-Kronrod gap overestimates near the roundoff floor;
            // allow a slack factor before declaring failure
            if err <= 16.0 * target + 1e-13 * total.norm() {
                return Ok((total, err));
            }
            return Err(Error::NonconvergentQuadrature {
                achieved: err,
                requested: target,
            });
        }
        let i = worst.unwrap();
        let Leaf {
            a: la,
            b: lb,
            depth,
            ..
        } = leaves.swap_remove(i);
        let mid = (la + lb) * 0.5;
        let (v1, e1) = gk15(f, la, mid);
        let (v2, e2) = gk15(f, mid, lb);
        leaves.push(Leaf {
            a: la,
            b: mid,
            val: v1,
            err: e1,
            depth: depth + 1,
        });
        leaves.push(Leaf {
            a: mid,
            b: lb,
            val: v2,
            err: e2,
            depth: depth + 1,
        });
    }
}

/// Adaptive integral of `f` along a polyline through `points`.
pub fn integrate_polyline<F: Fn(C64) -> C64>(
    f: &F,
    points: &[C64],
    opt: &QuadOptions,
) -> Result<(C64, f64)> {
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in points.windows(2) {
        let (v, e) = integrate_segment(f, w[0], w[1], opt)?;
        total += v;
        err += e;
    }
    Ok((total, err))
}

/// Adaptive integral of `f` along the ray `start + sigma * dir`, `sigma >= 0`,
/// where `dir` is a unit direction. Panels grow geometrically from
/// `first_len`; integration stops once two consecutive panels contribute
/// below tolerance. Callers pick `first_len` on the decay scale of `f`.
pub fn integrate_ray<F: Fn(C64) -> C64>(
    f: &F,
    start: C64,
    dir: C64,
    first_len: f64,
    opt: &QuadOptions,
) -> Result<(C64, f64)> {
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut s0 = 0.0;
    let mut len = first_len;
    let mut quiet = 0usize;
    for _ in 0..200 {
        let a = start + dir * s0;
        let b = start + dir * (s0 + len);
        let (v, e) = integrate_segment(f, a, b, opt)?;
        total += v;
        err += e;
        s0 += len;
        len *= 1.6;
        let cut = opt.abs_tol.max(opt.rel_tol * total.norm());
        if v.norm() + e < cut * 0.25 {
            quiet += 1;
            if quiet >= 2 {
                return Ok((total, err));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonconvergentQuadrature {
        achieved: f64::INFINITY,
        requested: opt.abs_tol,
    })
}

/// `integral of exp(i omega tau) * L(tau)` over `[t0, t1]`, where `L` is the
/// linear interpolant through `(t0, f0)` and `(t1, f1)`. Exact, stable for
/// small `|omega| * (t1 - t0)` via a series for the phi-functions.
pub fn exp_linear_panel(omega: C64, t0: f64, t1: f64, f0: C64, f1: C64) -> C64 {
    let h = t1 - t0;
    let z = C64::new(0.0, 1.0) * omega * h;
    let (e0, e1) = phi01(z);
    (C64::new(0.0, 1.0) * omega * t0).exp() * ((f0 * e0 + (f1 - f0) * e1) * h)
}

/// (phi0, phi1) with phi0 = (e^z - 1)/z, phi1 = int_0^1 v e^{zv} dv.
fn phi01(z: C64) -> (C64, C64) {
    if z.norm() < 0.25 {
        // phi0 = sum z^n/(n+1)!, phi1 = sum z^n/(n! (n+2))
        let mut p0 = C64::new(0.0, 0.0);
        let mut p1 = C64::new(0.0, 0.0);
        let mut zn = C64::new(1.0, 0.0);
        let mut fact = 1.0f64;
        for n in 0..14usize {
            if n > 0 {
                fact *= n as f64;
                zn *= z;
            }
            p0 += zn / (fact * (n as f64 + 1.0));
            p1 += zn / (fact * (n as f64 + 2.0));
        }
        (p0, p1)
    } else {
        let ez = z.exp();
        let p0 = (ez - 1.0) / z;
        let p1 = (ez * (z - 1.0) + 1.0) / (z * z);
        (p0, p1)
    }
}

/// cos(sqrt(w)), entire in `w` (stable through w = 0 and w < 0).
pub fn cos_sqrt(w: C64) -> C64 {
    if w.norm() < 0.25 {
        let mut acc = C64::new(1.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for n in 1..10usize {
            let d = ((2 * n - 1) * (2 * n)) as f64;
            term = -term * w / d;
            acc += term;
        }
        acc
    } else {
        w.sqrt().cos()
    }
}

/// sin(sqrt(w))/sqrt(w), entire in `w`.
pub fn sinc_sqrt(w: C64) -> C64 {
    if w.norm() < 0.25 {
        let mut acc = C64::new(1.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for n in 1..10usize {
            let d = ((2 * n) * (2 * n + 1)) as f64;
            term = -term * w / d;
            acc += term;
        }
        acc
    } else {
        let s = w.sqrt();
        s.sin() / s
    }
}

/// Estimate `integral_{r0}^{inf} A(sigma) d sigma` for an integrand with an
/// algebraic tail `A ~ a2/s^2 + a3/s^3 + a4/s^4`, from three samples.
/// Used to close slowly decaying non-oscillatory contour tails.
pub fn algebraic_tail<F: Fn(f64) -> C64>(a: &F, r0: f64) -> C64 {
    let rs = [r0, 1.7 * r0, 2.9 * r0];
    let vals: Vec<C64> = rs.iter().map(|&r| a(r)).collect();
    // Solve the 3x3 Vandermonde-like system for (a2, a3, a4).
    let mut m = [[0.0f64; 3]; 3];
    for (i, &r) in rs.iter().enumerate() {
        m[i][0] = Float::powi(r, -2);
        m[i][1] = Float::powi(r, -3);
        m[i][2] = Float::powi(r, -4);
    }
    let det = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return C64::new(0.0, 0.0);
    }
    let mut coef = [C64::new(0.0, 0.0); 3];
    for j in 0..3 {
        let mut mj = m;
        for i in 0..3 {
            mj[i][j] = 1.0;
        }
        // Cramer with complex right-hand side, expanded per component.
        let dj_re = {
            let mut mm = m;
            for i in 0..3 {
                mm[i][j] = vals[i].re;
            }
            det(&mm)
        };
        let dj_im = {
            let mut mm = m;
            for i in 0..3 {
                mm[i][j] = vals[i].im;
            }
            det(&mm)
        };
        coef[j] = C64::new(dj_re / d, dj_im / d);
    }
    coef[0] / r0 + coef[1] / (2.0 * r0 * r0) + coef[2] / (3.0 * r0 * r0 * r0)
}
