use alloc::string::String;
use core::fmt;

/// Errors reported by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid construction parameters (message names the offending field).
    InvalidParams(String),
    /// Spectral parameter too close to a branch point of the dispersion roots.
    BranchPointProximity { k: (f64, f64), distance: f64 },
    /// The two dispersion roots coincide to working tolerance (U -> 0 limit).
    DegenerateRoots,
    /// An adaptive quadrature failed to reach the requested tolerance.
    NonconvergentQuadrature { achieved: f64, requested: f64 },
    /// A half-line profile violates the hinge vanishing conditions.
    HingeViolation { order: usize, value: f64 },
    /// Trace sampling too coarse for the oscillation `exp(i omega t)`.
    UnderResolvedOscillation { omega_dt: f64 },
    /// The two deconvolution backends disagree beyond tolerance.
    IllConditionedDeconvolution { discrepancy: f64 },
    /// The requested trace-closure policy lacks the data it needs.
    ClosureUnavailable(String),
    /// Malformed user input (sampled profiles, surface states).
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::BranchPointProximity { k, distance } => write!(
                f,
                "k = {} + {}i lies within {distance:.3e} of a branch point",
                k.0, k.1
            ),
            Error::DegenerateRoots => {
                write!(f, "dispersion roots degenerate: |omega_-^2 - omega_+^2| below tolerance")
            }
            Error::NonconvergentQuadrature { achieved, requested } => write!(
                f,
                "quadrature tolerance not reached: estimated error {achieved:.3e} > {requested:.3e}"
            ),
            Error::HingeViolation { order, value } => write!(
                f,
                "hinge condition violated: |d^{order} eta0/dx^{order}(0)| = {value:.3e}"
            ),
            Error::UnderResolvedOscillation { omega_dt } => {
                write!(f, "trace grid under-resolves oscillation: |omega|*dt = {omega_dt:.3e}")
            }
            Error::IllConditionedDeconvolution { discrepancy } => write!(
                f,
                "deconvolution backends disagree (L2 discrepancy {discrepancy:.3e}); \
                 data outside the regularised range"
            ),
            Error::ClosureUnavailable(msg) => write!(f, "trace closure unavailable: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
