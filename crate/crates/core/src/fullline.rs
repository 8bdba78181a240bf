//! Cauchy problem for the plate on the full line, solved spectrally:
//! per wavenumber the transform evolves as a two-mode oscillation, and the
//! field is recovered by the conjugate-symmetric inverse transform. Also
//! carries the continuous-dependence validators (the L2/H2 ratio report and
//! the trigonometric identity behind it).

use crate::dispersion::{Dispersion, DispersionData};
use crate::error::{Error, Result};
use crate::params::PlateParams;
use crate::quad::QuadOptions;
use crate::spectral::{
    fourier_forward, fourier_inverse_real, sobolev_norm, FieldSlice, Profile, SpectralGrid,
    GRID_K_FLOOR,
};
use crate::C64;
use alloc::vec::Vec;
use num_traits::Float;

/// Spectral solution of the full-line problem: initial transform samples on
/// a grid plus the dispersion environment that evolves them.
#[derive(Debug, Clone)]
pub struct FullLineSolution {
    pub dispersion: Dispersion,
    pub grid: SpectralGrid,
    pub profile: Profile,
    pub eta0_hat: Vec<C64>,
}

/// Default inversion grid for a profile: truncation where the transform is
/// negligible, oscillation resolved for `|x| <= x_scale`, `t <= t_scale`.
pub fn default_grid(params: &PlateParams, x_scale: f64, t_scale: f64, refine: u32) -> SpectralGrid {
    SpectralGrid::graded(GRID_K_FLOOR, params.k_max, x_scale, t_scale, refine)
}

/// Sample the initial transform and package the spectral solution.
/// Half-line profiles are admitted as their zero extensions.
pub fn solve_full_line(
    profile: &Profile,
    params: &PlateParams,
    grid: SpectralGrid,
    opt: &QuadOptions,
) -> Result<FullLineSolution> {
    let mut eta0_hat = Vec::with_capacity(grid.len());
    for &k in &grid.nodes {
        eta0_hat.push(fourier_forward(profile, C64::new(k, 0.0), opt)?);
    }
    Ok(FullLineSolution {
        dispersion: Dispersion::new(*params),
        grid,
        profile: profile.clone(),
        eta0_hat,
    })
}

impl FullLineSolution {
    /// `(eta_hat, phi_hat)` at grid node `j`, time `t`; the surface potential
    /// follows from `phi_hat = eta_hat_t / k + i U eta_hat` (valid k > 0).
    pub fn eta_phi_hat(&self, j: usize, t: f64) -> (C64, C64) {
        let k = C64::new(self.grid.nodes[j], 0.0);
        let (eta, eta_t) = self.dispersion.mode_state(k, t, self.eta0_hat[j]);
        let phi = eta_t / k + eta * C64::new(0.0, self.dispersion.params.u);
        (eta, phi)
    }

    pub fn eta_hat_at(&self, j: usize, t: f64) -> C64 {
        self.dispersion.mode_state(C64::new(self.grid.nodes[j], 0.0), t, self.eta0_hat[j]).0
    }

    /// Two-mode decomposition per grid node; `None` inside the exclusion
    /// radius of a branch point, where the split (not the solution) is
    /// ill-conditioned.
    pub fn decomposition(&self) -> Vec<Option<DispersionData>> {
        self.grid
            .nodes
            .iter()
            .zip(self.eta0_hat.iter())
            .map(|(&k, &e0)| self.dispersion.coefficients(C64::new(k, 0.0), e0).ok())
            .collect()
    }

    /// Parseval L2 norm of `eta(., t)` from the grid samples.
    pub fn l2_eta(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &w) in self.grid.weights.iter().enumerate() {
            acc += w * self.eta_hat_at(j, t).norm_sqr();
        }
        (2.0 * acc).sqrt()
    }
}

/// Plate elevation slice at time `t`.
pub fn evaluate_field(sol: &FullLineSolution, x_nodes: &[f64], t: f64) -> FieldSlice {
    let eta: Vec<C64> = (0..sol.grid.len()).map(|j| sol.eta_hat_at(j, t)).collect();
    fourier_inverse_real(&eta, &sol.grid, x_nodes, t)
}

/// Surface-potential slice at time `t`.
pub fn evaluate_potential(sol: &FullLineSolution, x_nodes: &[f64], t: f64) -> FieldSlice {
    let phi: Vec<C64> = (0..sol.grid.len())
        .map(|j| sol.eta_phi_hat(j, t).1)
        .collect();
    fourier_inverse_real(&phi, &sol.grid, x_nodes, t)
}

/// One row of the continuous-dependence report.
#[derive(Debug, Clone, Copy)]
pub struct WellposednessRow {
    pub t: f64,
    pub l2_eta: f64,
    pub h2_eta0: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct WellposednessReport {
    pub rows: Vec<WellposednessRow>,
    pub sup_ratio: f64,
    /// max over sampled (k, t) of the two-sided identity residual where the
    /// radicand is positive (propagating band) / negative (unstable band).
    pub identity_residual_propagating: f64,
    pub identity_residual_unstable: f64,
}

/// Per time: `||eta(., t)||_{L2}`, `||eta0||_{H2}`, their ratio; plus the
/// pointwise verification of the modulus identity
///
/// ```text
/// |c~_- e^{-i w_- t} + c~_+ e^{-i w_+ t}|^2
///   = |cos(kQt/(1+k)) + (1/2ik)(Q/U + k^2 U/Q) sin(kQt/(1+k))|^2,
/// Q = sqrt(k (k^3 + k^2 - U^2)),
/// ```
///
/// evaluated in complex arithmetic so the `Q^2 < 0` band is covered by the
/// analytic continuation (cos -> cosh).
pub fn wellposedness_report(
    sol: &FullLineSolution,
    t_nodes: &[f64],
    opt: &QuadOptions,
) -> Result<WellposednessReport> {
    let h2 = sobolev_norm(&sol.profile, 2, opt)?;
    if h2 == 0.0 {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "well-posedness ratio undefined for the zero profile",
        )));
    }
    let mut rows = Vec::with_capacity(t_nodes.len());
    let mut sup_ratio: f64 = 0.0;
    for &t in t_nodes {
        let l2 = sol.l2_eta(t);
        let ratio = l2 / h2;
        sup_ratio = sup_ratio.max(ratio);
        rows.push(WellposednessRow {
            t,
            l2_eta: l2,
            h2_eta0: h2,
            ratio,
        });
    }
    let (mut res_prop, mut res_unst) = (0.0f64, 0.0f64);
    let d = &sol.dispersion;
    let u = d.params.u;
    let b = d.branch.real_root;
    for &k in sol.grid.nodes.iter().step_by(7) {
        if (k - b).abs() < 10.0 * d.params.exclusion_radius || k < 1e-3 {
            continue;
        }
        let kk = C64::new(k, 0.0);
        let dd = match d.coefficients(kk, C64::new(1.0, 0.0)) {
            Ok(dd) => dd,
            Err(_) => continue,
        };
        let q2 = crate::dispersion::radicand(kk, u);
        let q = q2.sqrt(); // real-axis convention: +i sqrt(|.|) below the root
        let i = C64::new(0.0, 1.0);
        for &t in t_nodes {
            let lhs = (dd.c_minus * (-i * dd.omega_minus * t).exp()
                + dd.c_plus * (-i * dd.omega_plus * t).exp())
            .norm_sqr();
            let arg = q * k * t / (k + 1.0);
            let rhs = (arg.cos()
                + (q / u + kk * kk * u / q) / (i * 2.0 * k) * arg.sin())
            .norm_sqr();
            let res = (lhs - rhs).abs();
            if q2.re > 0.0 {
                res_prop = res_prop.max(res);
            } else {
                res_unst = res_unst.max(res / (1.0 + lhs.abs()));
            }
        }
    }
    Ok(WellposednessReport {
        rows,
        sup_ratio,
        identity_residual_propagating: res_prop,
        identity_residual_unstable: res_unst,
    })
}
