//! Drifted fractional Brownian motion: exact and Volterra path simulation,
//! Riemann–Liouville operators and the `K_H` transform, the Girsanov
//! density, and Monte Carlo risk estimation for the path estimator and
//! James–Stein-type shrinkage.

pub mod drift;
pub mod error;
pub mod estimators;
pub mod frac;
pub mod quadrature;
pub mod risk;
pub mod sim;
pub mod special;

pub use drift::{
    builtin_drift, girsanov_log_density, validate_membership, DriftKind, DriftSpec,
    GirsanovEvaluation, GirsanovIntegrand, MembershipReport,
};
pub use error::{FbmError, Result};
pub use estimators::{
    mle_estimate, shrinkage_estimate, stein_integrand, validate_dominance_conditions,
    DominanceCheck, Estimator, RFunctionSpec, ShrinkageSpec, Violation,
};
pub use frac::{
    apply_k, apply_k_inverse, apply_k_inverse_normalized, apply_k_inverse_smooth, c_h,
    kernel_k, rl_derivative, rl_integral, AcFunction, SampledFunction,
};
pub use risk::{
    cramer_rao_bound, empirical_covariance, girsanov_check, inverse_norm_moment_check,
    quadratic_risk_mc, risk_difference_paired, risk_difference_paired_multi,
    stein_identity_check, unbiasedness_check, DominanceReport, RiskEstimate,
};
pub use sim::{
    add_drift, fbm_covariance, fgn_autocovariance, simulate_fbm, FbmModel, FbmSampler, Method,
    PathMatrix, RngStream, SimulatedPath, TimeGrid,
};
pub use special::{beta_fn, gamma_fn};
