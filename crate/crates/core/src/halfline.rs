//! Half-line IBVP machinery: the global relation for the transform with
//! unknown hinge curvatures, the contour-integral kernel `K(t)` and forcing
//! `g(t)`, and the trace-determination step via the weakly singular
//! convolution equation
//!
//! ```text
//! 2 pi i eta_xx(0,t) = g(t) - int_0^t K(t - tau) eta_xxx(0,tau) d tau.
//! ```
//!
//! Contours: the working path follows the classical one (down the line
//! `Re k = 1/4`, then along the positive real axis) with two adjustments
//! that are exact by Cauchy's theorem: a shallow notch below the segment of
//! the real axis that coincides with the branch cut (boundary values are
//! taken from the fourth quadrant), and, outside a disc containing every
//! branch point, deformation onto the rays `arg k = pi/4` and
//! `arg k = -3 pi/4`, where `exp(-i omega_-(k) t)` decays like
//! `exp(-r^2 t)` instead of oscillating. Orientation is fixed so that the
//! sifting identity integrates test functions to `+f(t)`: from large
//! positive real `k` (where `omega_-` is very negative) toward
//! `1/4 - i inf` (where it is very positive).

use crate::dispersion::Dispersion;
use crate::error::{Error, Result};
use crate::params::PlateParams;
use crate::quad::{
    algebraic_tail, cos_sqrt, exp_linear_panel, integrate_ray, integrate_segment, sinc_sqrt,
    QuadOptions,
};
use crate::spectral::{fourier_forward, fourier_inverse_real, FieldSlice, Profile, SpectralGrid};
use crate::volterra::{
    forward_convolution, l2_distance, laplace_deconvolve, solve_first_kind, LaplaceDeconvOptions,
    SqrtKernel,
};
use crate::C64;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

const TWO_PI: f64 = core::f64::consts::TAU;

/// One piece of a contour.
#[derive(Debug, Clone, Copy)]
pub enum PathSegment {
    Line { start: C64, end: C64 },
    /// Circular arc about the origin, traversed from `theta0` to `theta1`.
    Arc { radius: f64, theta0: f64, theta1: f64 },
    /// Infinite ray `start + sigma e^{i angle}`; `inward` rays are traversed
    /// from infinity toward `start`.
    Ray { start: C64, angle: f64, inward: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourLabel {
    /// The truncated classical contour (vertical line + real axis).
    Gamma,
    /// The ray-deformed evaluation contour.
    DeformedRays,
}

/// Piecewise path in the complex k-plane.
#[derive(Debug, Clone)]
pub struct ContourPath {
    pub label: ContourLabel,
    pub segments: Vec<PathSegment>,
    /// Disc radius separating the compact part from the rays.
    pub delta: f64,
    /// Depth of the notch below the on-axis branch cut.
    pub rho: f64,
}

impl ContourPath {
    /// Ray-deformed contour adapted to the branch structure: disc radius
    /// `delta = 1 + max(|branch point|, sqrt(2) |Im pair|)` (the latter keeps
    /// the lower deformation sector clear of the pair's cut rays).
    pub fn deformed(disp: &Dispersion) -> Result<ContourPath> {
        let bs = &disp.branch;
        let mut delta: f64 = 0.0;
        for &bp in &bs.branch_points {
            delta = delta.max(bp.norm());
            delta = delta.max(core::f64::consts::SQRT_2 * bp.im.abs());
        }
        let delta = 1.0 + delta;
        let rho = 0.05;
        Self::build(disp, delta, rho, ContourLabel::DeformedRays, None)
    }

    /// Same geometry with altered disc radius / notch depth (refinement and
    /// independence studies).
    pub fn deformed_with(disp: &Dispersion, delta_extra: f64, rho: f64) -> Result<ContourPath> {
        let base = Self::deformed(disp)?;
        Self::build(disp, base.delta + delta_extra, rho, ContourLabel::DeformedRays, None)
    }

    /// The classical contour itself, truncated at `|Re k| = k_real_max` and
    /// `|Im k| = y_max` (callers account for the truncated oscillatory
    /// tails).
    pub fn truncated_gamma(disp: &Dispersion, k_real_max: f64, y_max: f64) -> Result<ContourPath> {
        Self::build(
            disp,
            0.0,
            0.05,
            ContourLabel::Gamma,
            Some((k_real_max, y_max)),
        )
    }

    fn build(
        disp: &Dispersion,
        delta: f64,
        rho: f64,
        label: ContourLabel,
        truncation: Option<(f64, f64)>,
    ) -> Result<ContourPath> {
        let b = disp.branch.real_root;
        let c = |re: f64, im: f64| C64::new(re, im);
        let mut segments = Vec::new();
        // Real-axis arrival point of the compact part.
        let (arrive, depart_y) = match truncation {
            Some((kmax, ymax)) => (kmax, ymax),
            None => (delta, (delta * delta - 1.0 / 16.0).sqrt()),
        };
        if label == ContourLabel::DeformedRays {
            segments.push(PathSegment::Ray {
                start: C64::from_polar(delta, core::f64::consts::FRAC_PI_4),
                angle: core::f64::consts::FRAC_PI_4,
                inward: true,
            });
            segments.push(PathSegment::Arc {
                radius: delta,
                theta0: core::f64::consts::FRAC_PI_4,
                theta1: 0.0,
            });
        }
        // Real axis toward the corner, stepping below the on-axis cut when
        // the positive branch point lies right of the corner.
        if b > 0.25 + 2.0 * rho {
            segments.push(PathSegment::Line {
                start: c(arrive, 0.0),
                end: c(b + rho, 0.0),
            });
            segments.push(PathSegment::Line {
                start: c(b + rho, 0.0),
                end: c(b + rho, -rho),
            });
            segments.push(PathSegment::Line {
                start: c(b + rho, -rho),
                end: c(0.25, -rho),
            });
            segments.push(PathSegment::Line {
                start: c(0.25, -rho),
                end: c(0.25, -depart_y),
            });
        } else {
            segments.push(PathSegment::Line {
                start: c(arrive, 0.0),
                end: c(0.25, 0.0),
            });
            segments.push(PathSegment::Line {
                start: c(0.25, 0.0),
                end: c(0.25, -depart_y),
            });
        }
        if label == ContourLabel::DeformedRays {
            let theta_exit = (-depart_y).atan2(0.25);
            segments.push(PathSegment::Arc {
                radius: delta,
                theta0: theta_exit,
                theta1: -3.0 * core::f64::consts::FRAC_PI_4,
            });
            segments.push(PathSegment::Ray {
                start: C64::from_polar(delta, -3.0 * core::f64::consts::FRAC_PI_4),
                angle: -3.0 * core::f64::consts::FRAC_PI_4,
                inward: false,
            });
        }
        let path = ContourPath {
            label,
            segments,
            delta,
            rho,
        };
        path.validate(disp)?;
        Ok(path)
    }

    /// Sampled clearance check: no point of the path may fall within the
    /// exclusion radius of a branch point, nor on the wrong side of a cut.
    pub fn validate(&self, disp: &Dispersion) -> Result<()> {
        let excl = disp.params.exclusion_radius;
        let mut probe = |p: C64| -> Result<()> {
            for &bp in &disp.branch.branch_points {
                let d = (p - bp).norm();
                if d < excl {
                    return Err(Error::BranchPointProximity {
                        k: (p.re, p.im),
                        distance: d,
                    });
                }
            }
            Ok(())
        };
        for seg in &self.segments {
            match *seg {
                PathSegment::Line { start, end } => {
                    for i in 0..=16 {
                        probe(start + (end - start) * (i as f64 / 16.0))?;
                    }
                }
                PathSegment::Arc {
                    radius,
                    theta0,
                    theta1,
                } => {
                    for i in 0..=16 {
                        let th = theta0 + (theta1 - theta0) * i as f64 / 16.0;
                        probe(C64::from_polar(radius, th))?;
                    }
                }
                PathSegment::Ray { start, angle, .. } => {
                    for i in 0..=16 {
                        probe(start + C64::from_polar(3.0 * self.delta * i as f64 / 16.0, angle))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Integrate `f(k) dk` along the path. `ray_first_len` seeds the panel
    /// length on infinite rays (callers set it to the integrand decay
    /// scale).
    pub fn integrate<F: Fn(C64) -> C64>(
        &self,
        f: &F,
        ray_first_len: f64,
        opt: &QuadOptions,
    ) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for seg in &self.segments {
            acc += match *seg {
                PathSegment::Line { start, end } => integrate_segment(f, start, end, opt)?.0,
                PathSegment::Arc {
                    radius,
                    theta0,
                    theta1,
                } => {
                    // k = r e^{i theta}, dk = i k d theta
                    let g = |th: C64| {
                        let k = C64::from_polar(radius, th.re);
                        f(k) * k * C64::new(0.0, 1.0)
                    };
                    integrate_segment(&g, C64::new(theta0, 0.0), C64::new(theta1, 0.0), opt)?.0
                }
                PathSegment::Ray {
                    start,
                    angle,
                    inward,
                } => {
                    let dir = C64::from_polar(1.0, angle);
                    let (v, _) = integrate_ray(f, start, dir, ray_first_len, opt)?;
                    if inward {
                        -v
                    } else {
                        v
                    }
                }
            };
        }
        Ok(acc)
    }
}

/// Time-sampled hinge curvatures on a uniform grid starting at 0.
#[derive(Debug, Clone)]
pub struct BoundaryTraces {
    pub t_nodes: Vec<f64>,
    pub eta_xx0: Vec<C64>,
    pub eta_xxx0: Vec<C64>,
}

impl BoundaryTraces {
    pub fn new(t_nodes: Vec<f64>, eta_xx0: Vec<C64>, eta_xxx0: Vec<C64>) -> Result<Self> {
        if t_nodes.len() != eta_xx0.len() || t_nodes.len() != eta_xxx0.len() {
            return Err(Error::InvalidInput("trace arrays must share a length".to_string()));
        }
        if t_nodes.first() != Some(&0.0) {
            return Err(Error::InvalidInput("trace grid must start at t = 0".to_string()));
        }
        if !t_nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("trace grid must increase".to_string()));
        }
        Ok(BoundaryTraces {
            t_nodes,
            eta_xx0,
            eta_xxx0,
        })
    }

    pub fn zero(t_nodes: Vec<f64>) -> Self {
        let n = t_nodes.len();
        BoundaryTraces {
            t_nodes,
            eta_xx0: vec![C64::new(0.0, 0.0); n],
            eta_xxx0: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn dt(&self) -> f64 {
        if self.t_nodes.len() > 1 {
            self.t_nodes[1] - self.t_nodes[0]
        } else {
            f64::INFINITY
        }
    }

    /// `f(k, t) = eta_xxx(0,t) + i k eta_xx(0,t)` at node `j`.
    fn forcing_at(&self, j: usize, k: C64) -> C64 {
        self.eta_xxx0[j] + C64::new(0.0, 1.0) * k * self.eta_xx0[j]
    }

    fn forcing_interp(&self, t: f64, k: C64) -> C64 {
        let n = self.t_nodes.len();
        if n == 0 {
            return C64::new(0.0, 0.0);
        }
        let h = self.dt();
        let j = ((t / h) as usize).min(n.saturating_sub(2));
        let (t0, t1) = (self.t_nodes[j], self.t_nodes[j + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.forcing_at(j, k) * (1.0 - w) + self.forcing_at(j + 1, k) * w
    }
}

/// `phi_hat = eta_hat_t / k + i U eta_hat` for `k` in the closed fourth
/// quadrant away from the origin.
pub fn surface_potential_relation(
    eta_hat: C64,
    eta_hat_t: C64,
    k: C64,
    params: &PlateParams,
) -> Result<C64> {
    if k.norm() == 0.0 {
        return Err(Error::InvalidInput("k = 0 rejected in the potential relation".to_string()));
    }
    if k.re < 0.0 || k.im > 1e-12 {
        return Err(Error::InvalidInput(
            "the potential relation holds on the closed fourth quadrant".to_string(),
        ));
    }
    Ok(eta_hat_t / k + eta_hat * C64::new(0.0, params.u))
}

/// `F_t(omega, k) = int_0^t e^{i omega tau} (eta_xxx + i k eta_xx)(tau) d tau`
/// by exact integration of the piecewise-linear trace interpolant.
pub fn f_t(omega: C64, k: C64, traces: &BoundaryTraces, t: f64) -> Result<C64> {
    let h = traces.dt();
    if omega.norm() * h > core::f64::consts::PI {
        return Err(Error::UnderResolvedOscillation {
            omega_dt: omega.norm() * h,
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..traces.t_nodes.len().saturating_sub(1) {
        let (t0, t1) = (traces.t_nodes[j], traces.t_nodes[j + 1]);
        if t0 >= t {
            break;
        }
        let tb = t1.min(t);
        let f0 = traces.forcing_at(j, k);
        let f1 = traces.forcing_interp(tb, k);
        acc += exp_linear_panel(omega, t0, tb, f0, f1);
    }
    Ok(acc)
}

/// Solution transform of the forced problem (the global relation),
/// `eta_hat = [c_+ + alpha F_t(w_+)] e^{-i w_+ t} + [c_- - alpha F_t(w_-)] e^{-i w_- t}`,
/// evaluated in the confluent form
///
/// ```text
/// eta_hat = H(k,t) + int_0^t (t-tau) sinc(q (t-tau)) e^{-i wbar (t-tau)} f(k,tau) d tau
/// ```
///
/// (`H` the free evolution, `wbar` the mean root, `q` the half-gap), which
/// is branch-free and stays stable where the roots collide. Returns
/// `(eta_hat, eta_hat_t)`.
pub fn global_relation_eta_hat(
    disp: &Dispersion,
    k: C64,
    t: f64,
    traces: &BoundaryTraces,
    eta0_hat_k: C64,
) -> Result<(C64, C64)> {
    let (free, free_t) = disp.mode_state(k, t, eta0_hat_k);
    // oscillation guard for the trace panels
    let u = disp.params.u;
    let kp1 = k + 1.0;
    let wbar = k * u / kp1;
    let q2 = k * k * crate::dispersion::radicand(k, u) / (kp1 * kp1);
    let omega_scale = wbar.norm() + q2.norm().sqrt();
    if omega_scale * traces.dt() > core::f64::consts::PI && !traces_are_zero(traces) {
        return Err(Error::UnderResolvedOscillation {
            omega_dt: omega_scale * traces.dt(),
        });
    }
    if traces_are_zero(traces) || t == 0.0 {
        return Ok((free, free_t));
    }
    let i = C64::new(0.0, 1.0);
    // Duhamel weight: the mode pair solves the homogeneous equation, so the
    // particular solution carries 1/(leading coefficient) = k/(k+1).
    let duhamel = k / kp1;
    // Per trace panel, 8-point Gauss on the smooth confluent integrand.
    let mut b = C64::new(0.0, 0.0);
    let mut b_t = C64::new(0.0, 0.0);
    for j in 0..traces.t_nodes.len().saturating_sub(1) {
        let (t0, t1) = (traces.t_nodes[j], traces.t_nodes[j + 1]);
        if t0 >= t {
            break;
        }
        let tb = t1.min(t);
        let mid = 0.5 * (t0 + tb);
        let half = 0.5 * (tb - t0);
        for n in 0..8 {
            let (x, w) = gl8_node(n);
            let tau = mid + half * x;
            let s = t - tau;
            let wq = q2 * (s * s);
            let sinc = sinc_sqrt(wq);
            let phase = (-i * wbar * s).exp();
            let fv = traces.forcing_interp(tau, k);
            b += phase * sinc * fv * (s * half * w);
            // d/dt of (s sinc(qs) e^{-i wbar s}):
            //   [sinc + q^2 s^2 h(q^2 s^2) - i wbar s sinc] e^{-i wbar s}
            let hterm = cos_minus_sinc_over_w(wq);
            b_t += phase * (sinc + wq * hterm - i * wbar * s * sinc) * fv * (half * w);
        }
    }
    Ok((free + duhamel * b, free_t + duhamel * b_t))
}

fn traces_are_zero(tr: &BoundaryTraces) -> bool {
    tr.eta_xx0.iter().all(|v| v.norm() == 0.0) && tr.eta_xxx0.iter().all(|v| v.norm() == 0.0)
}

/// `(cos sqrt(w) - sinc sqrt(w)) / w`, entire, -1/3 at w = 0.
fn cos_minus_sinc_over_w(w: C64) -> C64 {
    if w.norm() < 0.25 {
        // -1/3 + w/30 - w^2/840 + w^3/45360 ...
        let mut acc = C64::new(-1.0 / 3.0, 0.0);
        acc += w / 30.0;
        acc -= w * w / 840.0;
        acc += w * w * w / 45360.0;
        acc -= w * w * w * w / 3991680.0;
        acc
    } else {
        (cos_sqrt(w) - sinc_sqrt(w)) / w
    }
}

fn gl8_node(i: usize) -> (f64, f64) {
    const X: [f64; 4] = [
        0.183_434_642_495_649_805,
        0.525_532_409_916_328_986,
        0.796_666_477_413_626_740,
        0.960_289_856_497_536_232,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_983,
        0.313_706_645_877_887_287,
        0.222_381_034_453_374_471,
        0.101_228_536_290_376_259,
    ];
    if i < 4 {
        (-X[i], W[i])
    } else {
        (X[i - 4], W[i - 4])
    }
}

/// Kernel and forcing samples plus the measured weak-singularity constant.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub t_nodes: Vec<f64>,
    pub kernel: Vec<C64>,
    pub forcing: Vec<C64>,
    /// sup over sampled t in (0, 1] of sqrt(t) |K(t)| (0 if no kernel part).
    pub weak_sing_constant: f64,
}

impl KernelTable {
    pub fn merge(kernel: KernelTable, forcing: KernelTable) -> Result<KernelTable> {
        if kernel.t_nodes != forcing.t_nodes {
            return Err(Error::InvalidInput("kernel/forcing grids differ".to_string()));
        }
        Ok(KernelTable {
            t_nodes: kernel.t_nodes,
            kernel: kernel.kernel,
            forcing: forcing.forcing,
            weak_sing_constant: kernel.weak_sing_constant,
        })
    }
}

/// Measure integrand `d mu / dk = omega_-'(k) / k`.
fn measure_density(disp: &Dispersion, k: C64) -> C64 {
    disp.omega_minus_prime(k).map(|wp| wp / k).unwrap_or(C64::new(0.0, 0.0))
}

/// Forcing density `c_-(k)/alpha~(k)` where `alpha~ = alpha k/(k+1)` is the
/// Duhamel-normalised weight of the forced representation. Reduced to
/// `-i (omega_+^2 - k^4)/(omega_+ + omega_-) (k+1)/k eta0_hat(k)`,
/// which stays finite at root collisions.
fn forcing_density(disp: &Dispersion, k: C64, eta0_hat_k: C64) -> C64 {
    let u = disp.params.u;
    let kp1 = k + 1.0;
    let wsum = k * (2.0 * u) / kp1;
    let wp = match disp.omega_pm(k) {
        Ok((wp, _)) => wp,
        Err(_) => return C64::new(0.0, 0.0),
    };
    -C64::new(0.0, 1.0) * (wp * wp - k.powu(4)) / wsum * (kp1 / k) * eta0_hat_k
}

/// `K(t) = int_gamma e^{-i omega_-(k) t} d mu(k)` on the given contour, for
/// each `t` in `t_nodes` (all > 0 for the deformed path; the truncated gamma
/// route adds first-order stationary-phase tail corrections).
pub fn compute_kernel(
    disp: &Dispersion,
    contour: &ContourPath,
    t_nodes: &[f64],
    opt: &QuadOptions,
) -> Result<KernelTable> {
    let mut kernel = Vec::with_capacity(t_nodes.len());
    for &t in t_nodes {
        if t <= 0.0 {
            return Err(Error::InvalidInput("kernel nodes must satisfy t > 0".to_string()));
        }
        let f = |k: C64| {
            let w = match disp.omega_pm(k) {
                Ok((_, wm)) => wm,
                Err(_) => return C64::new(0.0, 0.0),
            };
            (-C64::new(0.0, 1.0) * w * t).exp() * measure_density(disp, k)
        };
        let first_len = (0.7 / t.sqrt()).clamp(0.25, 40.0);
        let mut v = contour_integral_osc(contour, &f, t, first_len, opt)?;
        if contour.label == ContourLabel::Gamma {
            v += gamma_tail_corrections(disp, contour, t, &|k| measure_density(disp, k))?;
        }
        kernel.push(v);
    }
    let mut wsc: f64 = 0.0;
    for (&t, v) in t_nodes.iter().zip(kernel.iter()) {
        if t <= 1.0 {
            wsc = wsc.max(t.sqrt() * v.norm());
        }
    }
    Ok(KernelTable {
        t_nodes: t_nodes.to_vec(),
        kernel,
        forcing: Vec::new(),
        weak_sing_constant: wsc,
    })
}

/// `g(t) = int_gamma (c_-/alpha)(k) e^{-i omega_-(k) t} d mu(k)`.
/// Needs hinge class >= 2; `t = 0` additionally needs class >= 3 (the
/// integral only converges absolutely then) and is evaluated on the
/// undeformed contour with algebraic tail closure.
pub fn compute_g(
    profile: &Profile,
    disp: &Dispersion,
    contour: &ContourPath,
    t_nodes: &[f64],
    opt: &QuadOptions,
) -> Result<KernelTable> {
    if matches!(profile, Profile::Zero) {
        return Ok(KernelTable {
            t_nodes: t_nodes.to_vec(),
            kernel: Vec::new(),
            forcing: vec![C64::new(0.0, 0.0); t_nodes.len()],
            weak_sing_constant: 0.0,
        });
    }
    if profile.support() != crate::spectral::Support::HalfLine {
        return Err(Error::InvalidInput("g(t) needs a half-line profile".to_string()));
    }
    let class = profile.hinge_class();
    if class < 2 {
        return Err(Error::HingeViolation {
            order: class + 1,
            value: profile.eval(0.0, class + 1).abs(),
        });
    }
    let topt = QuadOptions {
        abs_tol: opt.abs_tol.max(1e-13),
        ..*opt
    };
    let mut forcing = Vec::with_capacity(t_nodes.len());
    for &t in t_nodes {
        if t == 0.0 {
            if class < 3 {
                return Err(Error::InvalidInput(
                    "g(0) diverges logarithmically below hinge class 3".to_string(),
                ));
            }
            forcing.push(g_at_zero(profile, disp, contour, &topt)?);
            continue;
        }
        let f = |k: C64| {
            let w = match disp.omega_pm(k) {
                Ok((_, wm)) => wm,
                Err(_) => return C64::new(0.0, 0.0),
            };
            let e0 = fourier_forward(profile, k, &topt).unwrap_or(C64::new(0.0, 0.0));
            forcing_density(disp, k, e0)
                * (-C64::new(0.0, 1.0) * w * t).exp()
                * measure_density(disp, k)
        };
        let first_len = (0.7 / t.sqrt()).clamp(0.25, 40.0);
        let mut v = contour_integral_osc(contour, &f, t, first_len, opt)?;
        if contour.label == ContourLabel::Gamma {
            v += gamma_tail_corrections(disp, contour, t, &|k| {
                let e0 = fourier_forward(profile, k, &topt).unwrap_or(C64::new(0.0, 0.0));
                forcing_density(disp, k, e0) * measure_density(disp, k)
            })?;
        }
        forcing.push(v);
    }
    Ok(KernelTable {
        t_nodes: t_nodes.to_vec(),
        kernel: Vec::new(),
        forcing,
        weak_sing_constant: 0.0,
    })
}

/// `g(0)` on the undeformed contour: the integrand decays only like
/// `k^{-2}`, so close both directions with fitted algebraic tails.
fn g_at_zero(
    profile: &Profile,
    disp: &Dispersion,
    contour: &ContourPath,
    opt: &QuadOptions,
) -> Result<C64> {
    let dens = |k: C64| -> C64 {
        let e0 = fourier_forward(profile, k, opt).unwrap_or(C64::new(0.0, 0.0));
        forcing_density(disp, k, e0) * measure_density(disp, k)
    };
    // compact part: reuse the gamma geometry truncated at R0/Y0
    let r0 = 150.0;
    let finite = ContourPath::truncated_gamma(disp, r0, r0)?;
    let mut acc = finite.integrate(&dens, 1.0, opt)?;
    // real-direction tail, traversed inward (enters from +infinity)
    let real_tail = algebraic_tail(&|s: f64| dens(C64::new(s, 0.0)), r0);
    acc -= real_tail;
    // vertical tail k = 1/4 - i sigma, dk = -i d sigma, traversed outward
    let vert_tail = algebraic_tail(
        &|s: f64| dens(C64::new(0.25, -s)) * C64::new(0.0, -1.0),
        r0,
    );
    acc += vert_tail;
    let _ = contour;
    Ok(acc)
}

/// Oscillation-aware dispatch: the classical contour's straight pieces get
/// phase-bounded pre-splitting; deformed contours go through the generic
/// path integrator (their rays already decay).
fn contour_integral_osc<F: Fn(C64) -> C64>(
    contour: &ContourPath,
    f: &F,
    t: f64,
    first_len: f64,
    opt: &QuadOptions,
) -> Result<C64> {
    if contour.label == ContourLabel::Gamma {
        let mut acc = C64::new(0.0, 0.0);
        for seg in &contour.segments {
            match *seg {
                PathSegment::Line { start, end } => {
                    acc += integrate_osc_line(f, start, end, t, opt)?;
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "the classical contour consists of line segments".to_string(),
                    ))
                }
            }
        }
        Ok(acc)
    } else {
        contour.integrate(f, first_len, opt)
    }
}

/// Integrate along a straight segment whose integrand oscillates like
/// `exp(-i omega_-(k) t)`: pre-split into panels of bounded phase
/// (rate ~ t (2|k| + 1)), each handled adaptively.
fn integrate_osc_line<F: Fn(C64) -> C64>(
    f: &F,
    a: C64,
    b: C64,
    t: f64,
    opt: &QuadOptions,
) -> Result<C64> {
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let mut acc = C64::new(0.0, 0.0);
    let mut s = 0.0;
    while s < len {
        let rate = t * (2.0 * (a + dir * s).norm() + 1.0) + 1e-9;
        let step = (30.0 / rate).min(len - s).max(1e-9);
        let (v, _) = integrate_segment(f, a + dir * s, a + dir * (s + step), opt)?;
        acc += v;
        s += step;
    }
    Ok(acc)
}

/// Stationary-phase corrections (two orders) for the truncated ends of the
/// classical contour:
///
/// ```text
/// int_{x0}^{inf} e^{-i w t} H dx
///   ~ e^{-i w(x0) t}/(i t w'(x0)) [H(x0) + (1/(i t)) (H/w')'(x0)].
/// ```
fn gamma_tail_corrections<H: Fn(C64) -> C64>(
    disp: &Dispersion,
    contour: &ContourPath,
    t: f64,
    h: &H,
) -> Result<C64> {
    let (mut kmax, mut ymax) = (0.0f64, 0.0f64);
    for seg in &contour.segments {
        if let PathSegment::Line { start, end } = seg {
            kmax = kmax.max(start.re).max(end.re);
            ymax = ymax.max(-start.im).max(-end.im);
        }
    }
    let i = C64::new(0.0, 1.0);
    let gfun = |k: C64| -> C64 {
        match disp.omega_minus_prime(k) {
            Ok(wp) => h(k) / wp,
            Err(_) => C64::new(0.0, 0.0),
        }
    };
    let correction = |k: C64, dir: C64, sign: f64| -> Result<C64> {
        let (_, wm) = disp.omega_pm(k)?;
        let wp = disp.omega_minus_prime(k)?;
        let fd = 0.01 * k.norm().max(1.0);
        let gprime = (gfun(k + dir * fd) - gfun(k - dir * fd)) / (dir * (2.0 * fd));
        Ok((-i * wm * t).exp() / (i * t * wp) * (h(k) + gprime / (i * t)) * sign)
    };
    // missing head along the real axis (traversed inward: subtract the
    // outward tail), and missing vertical tail below -i ymax.
    let head = correction(C64::new(kmax, 0.0), C64::new(1.0, 0.0), -1.0)?;
    let tail = correction(C64::new(0.25, -ymax), C64::new(0.0, -1.0), 1.0)?;
    Ok(head + tail)
}

/// Growth rate of `|K(t)|` fitted on `t in [2, 10]` (least squares on
/// `log |K|`); the Laplace weight uses `max(rate, 0) + 1`.
pub fn kernel_growth_rate(table: &KernelTable) -> f64 {
    let pts: Vec<(f64, f64)> = table
        .t_nodes
        .iter()
        .zip(table.kernel.iter())
        .filter(|(&t, v)| t >= 2.0 && v.norm() > 0.0)
        .map(|(&t, v)| (t, v.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Exchanged-order Laplace transform of the kernel:
/// `L[K](s) = int_gamma d mu(k) / (s + i omega_-(k))`, valid for
/// `Re s` above the kernel growth rate; smooth, with fitted algebraic ray
/// tails.
pub fn kernel_laplace_exchanged(
    disp: &Dispersion,
    contour: &ContourPath,
    s: C64,
    opt: &QuadOptions,
) -> Result<C64> {
    let dens = |k: C64| -> C64 {
        let wm = match disp.omega_pm(k) {
            Ok((_, wm)) => wm,
            Err(_) => return C64::new(0.0, 0.0),
        };
        measure_density(disp, k) / (s + C64::new(0.0, 1.0) * wm)
    };
    // compact pieces exactly as laid out, rays truncated + fitted
    let mut acc = C64::new(0.0, 0.0);
    let ray_len = 60.0;
    for seg in &contour.segments {
        match *seg {
            PathSegment::Line { start, end } => {
                acc += integrate_segment(&dens, start, end, opt)?.0;
            }
            PathSegment::Arc {
                radius,
                theta0,
                theta1,
            } => {
                let g = |th: C64| {
                    let k = C64::from_polar(radius, th.re);
                    dens(k) * k * C64::new(0.0, 1.0)
                };
                acc += integrate_segment(&g, C64::new(theta0, 0.0), C64::new(theta1, 0.0), opt)?.0;
            }
            PathSegment::Ray {
                start,
                angle,
                inward,
            } => {
                let dir = C64::from_polar(1.0, angle);
                let (finite, _) =
                    integrate_segment(&dens, start, start + dir * ray_len, opt)?;
                let tail = algebraic_tail(&|r: f64| dens(start + dir * r) * dir, ray_len);
                let v = finite + tail;
                acc += if inward { -v } else { v };
            }
        }
    }
    Ok(acc)
}

/// Distributional sifting diagnostic: evaluates
/// `(1/2 pi) int_gamma e^{-i omega_- t} [int_0^T e^{i omega_- tau} f(tau) d tau] d omega_-`
/// on the truncated classical contour; for smooth `f` supported in `(0,T)`
/// this reproduces `f(t)`.
pub fn delta_identity_check<F: Fn(f64) -> f64>(
    disp: &Dispersion,
    f_test: &F,
    t_support: f64,
    t: f64,
    opt: &QuadOptions,
) -> Result<C64> {
    let contour = ContourPath::truncated_gamma(disp, 9.5, 9.5)?;
    // fixed 64-point Gauss for the inner transform
    let inner = |w: C64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let panels = 16;
        let h = t_support / panels as f64;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for n in 0..8 {
                let (x, wt) = gl8_node(n);
                let tau = mid + 0.5 * h * x;
                acc += (C64::new(0.0, 1.0) * w * tau).exp() * f_test(tau) * (0.5 * h * wt);
            }
        }
        acc
    };
    let f = |k: C64| {
        let wm = match disp.omega_pm(k) {
            Ok((_, wm)) => wm,
            Err(_) => return C64::new(0.0, 0.0),
        };
        let wp = match disp.omega_minus_prime(k) {
            Ok(wp) => wp,
            Err(_) => return C64::new(0.0, 0.0),
        };
        (-C64::new(0.0, 1.0) * wm * t).exp() * inner(wm) * wp
    };
    let v = contour.integrate(&f, 1.0, opt)?;
    Ok(v / TWO_PI)
}

/// Kernel data prepared for the trace solvers on `Sigma = [0, sigma_max]`:
/// the factored kernel, forcing samples on the uniform grid (and on the
/// extended Laplace window), and the contour for transform evaluations.
#[derive(Debug, Clone)]
pub struct TraceKernels {
    pub h: f64,
    pub t_grid: Vec<f64>,
    pub g_samples: Vec<C64>,
    pub kernel: SqrtKernel,
    pub growth_rate: f64,
    contour: ContourPath,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceKernelOptions {
    /// Number of uniform steps across Sigma.
    pub n_steps: usize,
    /// Refinement multiplier (doubles sampling, tightens quadrature).
    pub resolution: u32,
    pub quad_tol: f64,
}

impl Default for TraceKernelOptions {
    fn default() -> Self {
        TraceKernelOptions {
            n_steps: 512,
            resolution: 1,
            quad_tol: 1e-10,
        }
    }
}

/// Computes `K` (factored) and `g` for the profile on `[0, sigma_max]`.
pub fn prepare_trace_kernels(
    profile: &Profile,
    disp: &Dispersion,
    sigma_max: f64,
    o: &TraceKernelOptions,
) -> Result<TraceKernels> {
    let contour = ContourPath::deformed(disp)?;
    let opt = QuadOptions::with_tol(o.quad_tol / o.resolution as f64);
    // factored kernel out to t = 12 (the Laplace weight fit looks there)
    let n_kappa = 260 * o.resolution as usize;
    let kf = |t: f64| -> C64 {
        let tab = compute_kernel(disp, &contour, &[t], &opt);
        tab.map(|t| t.kernel[0]).unwrap_or(C64::new(0.0, 0.0))
    };
    let kernel = SqrtKernel::from_kernel_fn(&kf, 12.0_f64.max(sigma_max), n_kappa);
    // growth rate from samples on [2, 10]
    let fit_nodes: Vec<f64> = (0..33).map(|i| 2.0 + 0.25 * i as f64).collect();
    let fit_vals: Vec<C64> = fit_nodes.iter().map(|&t| kernel.kernel(t)).collect();
    let growth_rate = kernel_growth_rate(&KernelTable {
        t_nodes: fit_nodes,
        kernel: fit_vals,
        forcing: Vec::new(),
        weak_sing_constant: 0.0,
    });
    let n = o.n_steps * o.resolution as usize;
    let h = sigma_max / n as f64;
    let t_grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let g_samples = compute_g(profile, disp, &contour, &t_grid, &opt)?.forcing;
    Ok(TraceKernels {
        h,
        t_grid,
        g_samples,
        kernel,
        growth_rate,
        contour,
    })
}

/// Direct side of the convolution equation: given `eta_xxx(0, .)` on the
/// uniform grid, produce `eta_xx(0, .) = (g - K * eta_xxx) / (2 pi i)`.
pub fn solve_eta_xx_given_eta_xxx(m: &TraceKernels, eta_xxx: &[C64]) -> Result<Vec<C64>> {
    if eta_xxx.len() != m.t_grid.len() {
        return Err(Error::InvalidInput("trace samples must match the kernel grid".to_string()));
    }
    let conv = forward_convolution(&|t| m.kernel.kappa(t), eta_xxx, m.h);
    let i2pi = C64::new(0.0, TWO_PI);
    Ok(m.g_samples
        .iter()
        .zip(conv.iter())
        .map(|(g, c)| (g - c) / i2pi)
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct DeconvolveOptions {
    /// Maximum allowed L2 disagreement between the two backends.
    pub agreement_tol: f64,
    pub laplace: LaplaceDeconvOptions,
}

impl Default for DeconvolveOptions {
    fn default() -> Self {
        DeconvolveOptions {
            agreement_tol: 1e-4,
            laplace: LaplaceDeconvOptions::default(),
        }
    }
}

/// Deconvolution side: given `eta_xx(0, .)`, recover `eta_xxx(0, .)` from
/// `K * theta = g - 2 pi i eta_xx` by BOTH the time-domain product
/// integration march and the Laplace-domain division, cross-validated.
/// `theta0` is the initial value (zero for hinge class >= 3 data).
pub fn solve_eta_xxx_given_eta_xx(
    disp: &Dispersion,
    m: &TraceKernels,
    eta_xx: &[C64],
    theta0: C64,
    o: &DeconvolveOptions,
) -> Result<Vec<C64>> {
    if eta_xx.len() != m.t_grid.len() {
        return Err(Error::InvalidInput("trace samples must match the kernel grid".to_string()));
    }
    let i2pi = C64::new(0.0, TWO_PI);
    let rhs: Vec<C64> = m
        .g_samples
        .iter()
        .zip(eta_xx.iter())
        .map(|(g, x)| g - i2pi * x)
        .collect();
    let time_domain = solve_first_kind(&|t| m.kernel.kappa(t), &rhs, theta0, m.h)?;
    if rhs.iter().all(|v| v.norm() == 0.0) {
        return Ok(time_domain); // Titchmarsh: zero data, zero trace
    }
    let sigma = m.growth_rate.max(0.0) + 1.0;
    let lopt = LaplaceDeconvOptions {
        sigma,
        ..o.laplace
    };
    let qopt = QuadOptions::with_tol(1e-9);
    let lk = |s: C64| {
        kernel_laplace_exchanged(disp, &m.contour, s, &qopt).unwrap_or(C64::new(0.0, 0.0))
    };
    let laplace = laplace_deconvolve(&lk, &rhs, m.h, &m.t_grid, &lopt);
    let gap = l2_distance(&laplace, &time_domain, m.h);
    if gap > o.agreement_tol {
        return Err(Error::IllConditionedDeconvolution { discrepancy: gap });
    }
    Ok(time_domain)
}

/// How the one-equation/two-unknowns closure is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosurePolicy {
    /// `eta_xxx` supplied; `eta_xx` from the convolution equation.
    GivenXxx,
    /// `eta_xx` supplied; `eta_xxx` recovered by deconvolution.
    GivenXx,
    /// Both supplied; the equation is scored as a consistency residual.
    FreeEdgeZero,
}

impl ClosurePolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "given-xxx" => Ok(ClosurePolicy::GivenXxx),
            "given-xx" => Ok(ClosurePolicy::GivenXx),
            "free-edge-zero" => Ok(ClosurePolicy::FreeEdgeZero),
            other => Err(Error::InvalidInput(alloc::format!(
                "unknown closure policy '{other}'"
            ))),
        }
    }
}

/// Assembled half-line solution.
#[derive(Debug, Clone)]
pub struct HalfLineSolution {
    pub disp: Dispersion,
    pub grid: SpectralGrid,
    pub profile: Profile,
    pub eta0_hat: Vec<C64>,
    pub traces: BoundaryTraces,
    /// L2 residual of the convolution equation when both traces were
    /// supplied (policy `FreeEdgeZero`).
    pub closure_residual: Option<f64>,
}

impl HalfLineSolution {
    pub fn eta_hat_at(&self, j: usize, t: f64) -> Result<C64> {
        let k = C64::new(self.grid.nodes[j], 0.0);
        Ok(global_relation_eta_hat(&self.disp, k, t, &self.traces, self.eta0_hat[j])?.0)
    }

    pub fn field(&self, x_nodes: &[f64], t: f64) -> Result<FieldSlice> {
        let mut vals = Vec::with_capacity(self.grid.len());
        for j in 0..self.grid.len() {
            vals.push(self.eta_hat_at(j, t)?);
        }
        Ok(fourier_inverse_real(&vals, &self.grid, x_nodes, t))
    }

    /// Clamped-hinge diagnostic `(|eta(0,t)|, |eta_x(0,t)|)` from the grid
    /// sums; a closure-quality meter, small only when the trace pair is
    /// consistent with the initial profile.
    pub fn hinge_residual(&self, t: f64) -> Result<(f64, f64)> {
        let mut eta0 = C64::new(0.0, 0.0);
        let mut etax0 = C64::new(0.0, 0.0);
        for j in 0..self.grid.len() {
            let k = self.grid.nodes[j];
            let v = self.eta_hat_at(j, t)?;
            let w = self.grid.weights[j];
            eta0 += v * w;
            etax0 += v * C64::new(0.0, k) * w;
        }
        let pref = 2.0 / (TWO_PI / 2.0).sqrt() / core::f64::consts::SQRT_2; // 2/sqrt(2 pi)
        Ok(((pref * eta0.re).abs(), (pref * etax0.re).abs()))
    }
}

#[derive(Debug, Clone)]
pub struct HalfLineConfig {
    pub sigma_max: f64,
    pub policy: ClosurePolicy,
    pub kernels: TraceKernelOptions,
    pub deconv: DeconvolveOptions,
}

impl Default for HalfLineConfig {
    fn default() -> Self {
        HalfLineConfig {
            sigma_max: 1.0,
            policy: ClosurePolicy::GivenXxx,
            kernels: TraceKernelOptions::default(),
            deconv: DeconvolveOptions::default(),
        }
    }
}

/// Full pipeline: kernels, trace closure, spectral assembly.
/// `supplied_xxx` / `supplied_xx` are sampled on the uniform Sigma grid of
/// `cfg.kernels` (length `n_steps * resolution + 1`).
pub fn solve_half_line(
    profile: &Profile,
    params: &PlateParams,
    grid: SpectralGrid,
    cfg: &HalfLineConfig,
    supplied_xxx: Option<Vec<C64>>,
    supplied_xx: Option<Vec<C64>>,
    opt: &QuadOptions,
) -> Result<HalfLineSolution> {
    let disp = Dispersion::new(*params);
    let mut eta0_hat = Vec::with_capacity(grid.len());
    for &k in &grid.nodes {
        eta0_hat.push(fourier_forward(profile, C64::new(k, 0.0), opt)?);
    }
    // trivial data: zero profile and no supplied traces
    let zero_data = matches!(profile, Profile::Zero)
        && supplied_xxx.as_ref().map_or(true, |v| v.iter().all(|x| x.norm() == 0.0))
        && supplied_xx.as_ref().map_or(true, |v| v.iter().all(|x| x.norm() == 0.0));
    let n = cfg.kernels.n_steps * cfg.kernels.resolution as usize;
    let h = cfg.sigma_max / n as f64;
    let t_grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    if zero_data {
        return Ok(HalfLineSolution {
            disp,
            grid,
            profile: profile.clone(),
            eta0_hat,
            traces: BoundaryTraces::zero(t_grid),
            closure_residual: None,
        });
    }
    if profile.hinge_class() < 3 {
        return Err(Error::HingeViolation {
            order: profile.hinge_class() + 1,
            value: profile.eval(0.0, profile.hinge_class() + 1).abs(),
        });
    }
    let m = prepare_trace_kernels(profile, &disp, cfg.sigma_max, &cfg.kernels)?;
    let (eta_xx, eta_xxx, residual) = match cfg.policy {
        ClosurePolicy::GivenXxx => {
            let xxx = supplied_xxx.ok_or_else(|| {
                Error::ClosureUnavailable("policy given-xxx needs eta_xxx samples".to_string())
            })?;
            let xx = solve_eta_xx_given_eta_xxx(&m, &xxx)?;
            (xx, xxx, None)
        }
        ClosurePolicy::GivenXx => {
            let xx = supplied_xx.ok_or_else(|| {
                Error::ClosureUnavailable("policy given-xx needs eta_xx samples".to_string())
            })?;
            let xxx =
                solve_eta_xxx_given_eta_xx(&disp, &m, &xx, C64::new(0.0, 0.0), &cfg.deconv)?;
            (xx, xxx, None)
        }
        ClosurePolicy::FreeEdgeZero => {
            let xxx = supplied_xxx.ok_or_else(|| {
                Error::ClosureUnavailable("policy free-edge-zero needs both traces".to_string())
            })?;
            let xx = supplied_xx.ok_or_else(|| {
                Error::ClosureUnavailable("policy free-edge-zero needs both traces".to_string())
            })?;
            let implied_xx = solve_eta_xx_given_eta_xxx(&m, &xxx)?;
            let res = l2_distance(&implied_xx, &xx, m.h);
            (xx, xxx, Some(res))
        }
    };
    let traces = BoundaryTraces::new(m.t_grid.clone(), eta_xx, eta_xxx)?;
    Ok(HalfLineSolution {
        disp,
        grid,
        profile: profile.clone(),
        eta0_hat,
        traces,
        closure_residual: residual,
    })
}
