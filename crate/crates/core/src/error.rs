use thiserror::Error;

/// Errors raised by the simulation, operator and estimation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FbmError {
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("circulant embedding has negative eigenvalue {eigenvalue:e} (max {max:e})")]
    NegativeEigenvalue { eigenvalue: f64, max: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("method `{0}` does not expose the driving Brownian path")]
    NoDrivingPath(&'static str),

    #[error("Stein integrand is undefined at ‖x‖² = 0")]
    ZeroNorm,

    #[error("unknown estimator `{0}` (expected mle, js or js-rational)")]
    UnknownEstimator(String),
}

pub type Result<T> = std::result::Result<T, FbmError>;

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name: "hurst",
            value: hurst,
            constraint: "must lie in (0, 1)",
        })
    }
}

pub(crate) fn check_rough_hurst(hurst: f64) -> Result<()> {
    check_hurst(hurst)?;
    if hurst < 0.5 {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name: "hurst",
            value: hurst,
            constraint: "must be below 1/2",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name,
            value,
            constraint: "must be positive and finite",
        })
    }
}
