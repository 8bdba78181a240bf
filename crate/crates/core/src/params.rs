use crate::error::{Error, Result};
use alloc::string::ToString;

/// Physical parameters and the validated numeric tolerances shared by the
/// solvers.
///
/// `U = 0` is rejected: the splitting coefficients `c_pm` carry a factor
/// `1/(omega_-^2 - omega_+^2)` that degenerates there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateParams {
    /// Uniform flow speed (dimensionless), strictly positive.
    pub u: f64,
    /// Relative tolerance on dispersion-relation residuals.
    pub tol_root: f64,
    /// Lower spectral cutoff for real-line quadrature (k = 0 is excluded).
    pub k_min: f64,
    /// Spectral truncation for real-line quadrature.
    pub k_max: f64,
    /// Radius around branch points inside which root evaluation is refused.
    pub exclusion_radius: f64,
}

impl PlateParams {
    pub fn new(u: f64) -> Result<Self> {
        Self::with_cutoffs(u, 1e-6, 12.0)
    }

    pub fn with_cutoffs(u: f64, k_min: f64, k_max: f64) -> Result<Self> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::InvalidParams("U must be finite and > 0".to_string()));
        }
        if !(k_min > 0.0 && k_min < k_max) || !k_max.is_finite() {
            return Err(Error::InvalidParams("require 0 < k_min < k_max".to_string()));
        }
        Ok(PlateParams {
            u,
            tol_root: 1e-10,
            k_min,
            k_max,
            exclusion_radius: 1e-3,
        })
    }
}
