use thiserror::Error;

/// Errors produced by the packet, density and observable computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("radius {radius} exceeds the tabulated range r_max = {r_max}")]
    OutOfRange { radius: f64, r_max: f64 },

    #[error("charge density vanishes at ({x}, {y}, {z}); velocity is undefined")]
    UndefinedVelocity { x: f64, y: f64, z: f64 },

    #[error(
        "quadrature for {what} did not converge: error {error:.3e} > tolerance {tolerance:.3e} \
         (worst panel [{worst_lo:.6e}, {worst_hi:.6e}] with estimate {worst_error:.3e})"
    )]
    NotConverged {
        what: String,
        error: f64,
        tolerance: f64,
        worst_lo: f64,
        worst_hi: f64,
        worst_error: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than failed numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::OutOfRange { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
