//! Fractional calculus: kernel, Riemann–Liouville operators, `K_H` and its inverse.

pub mod function;
pub mod kernel;
pub mod rl;
pub mod transform;

pub use function::{AcFunction, RealFn, SampledFunction};
pub use kernel::{c_h, kernel_covariance, kernel_k, KernelProfile, KernelWeights};
pub use rl::{rl_derivative, rl_derivative_fn, rl_integral, rl_integral_fn, rl_integral_sampled, Operand};
pub use transform::{
    apply_k, apply_k_inverse, apply_k_inverse_normalized, apply_k_inverse_smooth, apply_k_with,
    inverse_scale,
};
