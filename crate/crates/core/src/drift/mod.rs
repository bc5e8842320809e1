//! Drift functions of the Cameron–Martin space and the Girsanov density.

pub mod girsanov;

use ndarray::Array2;

use crate::error::{check_rough_hurst, FbmError, Result};
use crate::frac::transform::apply_k_inverse;
use crate::frac::AcFunction;
use crate::sim::{FbmModel, TimeGrid};

pub use girsanov::{girsanov_log_density, GirsanovEvaluation, GirsanovIntegrand};

/// A `d`-dimensional drift `θ` with `θ(0) = 0`, one absolutely continuous
/// function per component.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    components: Vec<AcFunction>,
    label: String,
}

impl DriftSpec {
    pub fn new(components: Vec<AcFunction>, label: impl Into<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(FbmError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for c in &components {
            let v0 = c.value(0.0);
            if v0 != 0.0 {
                return Err(FbmError::InvalidParameter {
                    name: "drift(0)",
                    value: v0,
                    constraint: "drift must vanish at t = 0",
                });
            }
        }
        Ok(Self {
            components,
            label: label.into(),
        })
    }

    /// The same scalar function in every component.
    pub fn replicated(f: AcFunction, dim: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![f; dim], label)
    }

    pub fn zero(dim: usize) -> Self {
        Self::replicated(AcFunction::zero(), dim, "zero").expect("zero drift is valid")
    }

    /// `θ^i(t) = c t`.
    pub fn linear(c: f64, dim: usize) -> Self {
        Self::replicated(AcFunction::power(c, 1.0), dim, format!("linear({c})"))
            .expect("linear drift vanishes at 0")
    }

    /// `θ^i(t) = c t^{2H}`.
    pub fn power_two_h(c: f64, hurst: f64, dim: usize) -> Self {
        Self::replicated(
            AcFunction::power(c, 2.0 * hurst),
            dim,
            format!("power2H({c})"),
        )
        .expect("power drift vanishes at 0")
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn component(&self, i: usize) -> &AcFunction {
        &self.components[i]
    }

    pub fn components(&self) -> &[AcFunction] {
        &self.components
    }

    /// `θ^i(t)` for each component.
    pub fn at(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.value(t)).collect()
    }

    /// `d × (n+1)` matrix of drift values on the grid.
    pub fn values_on(&self, grid: &TimeGrid) -> Array2<f64> {
        Array2::from_shape_fn((self.dim(), grid.len()), |(i, j)| {
            self.components[i].value(grid.time(j))
        })
    }
}

/// Built-in drift families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftKind {
    Zero,
    /// `c t`
    Linear { c: f64 },
    /// `c t^{2H}` with the model's Hurst index.
    PowerTwoH { c: f64 },
    /// `c t^p` for `p > 0`.
    Power { c: f64, exponent: f64 },
}

pub fn builtin_drift(kind: DriftKind, model: &FbmModel) -> Result<DriftSpec> {
    let d = model.dim;
    for (name, v) in match kind {
        DriftKind::Zero => vec![],
        DriftKind::Linear { c } | DriftKind::PowerTwoH { c } => vec![("c", c)],
        DriftKind::Power { c, exponent } => vec![("c", c), ("exponent", exponent)],
    } {
        if !v.is_finite() {
            return Err(FbmError::InvalidParameter {
                name,
                value: v,
                constraint: "drift parameters must be finite",
            });
        }
    }
    Ok(match kind {
        DriftKind::Zero => DriftSpec::zero(d),
        DriftKind::Linear { c } => DriftSpec::linear(c, d),
        DriftKind::PowerTwoH { c } => DriftSpec::power_two_h(c, model.hurst, d),
        DriftKind::Power { c, exponent } => {
            if exponent <= 0.0 {
                return Err(FbmError::InvalidParameter {
                    name: "exponent",
                    value: exponent,
                    constraint: "power drift needs a positive exponent",
                });
            }
            DriftSpec::replicated(
                AcFunction::power(c, exponent),
                d,
                format!("power({c},{exponent})"),
            )?
        }
    })
}

/// `∫_0^T v(s)² ds` for `v` sampled at `t_1..t_n` (index 0 ignored): trapezoid
/// on `[t_1, T]` plus the `[0, t_1]` sliver integrated exactly under the
/// power law fitted to `(t_1, t_2)`.
pub(crate) fn squared_integral(values: &[f64], grid: &TimeGrid) -> f64 {
    let n = grid.steps();
    let dt = grid.dt();
    let t1 = grid.time(1);
    let v1 = values[1];
    if n == 1 {
        return v1 * v1 * t1;
    }
    let mut trap = 0.0;
    for j in 1..n {
        trap += 0.5 * (values[j] * values[j] + values[j + 1] * values[j + 1]);
    }
    trap *= dt;
    let v2 = values[2];
    let sliver = if v1 == 0.0 {
        0.0
    } else if v2 != 0.0 && v1.signum() == v2.signum() {
        let p = (v2 / v1).ln() / std::f64::consts::LN_2;
        if 2.0 * p + 1.0 > 0.0 {
            v1 * v1 * t1 / (2.0 * p + 1.0)
        } else {
            f64::INFINITY
        }
    } else {
        v1 * v1 * t1
    };
    trap + sliver
}

/// Outcome of [`validate_membership`].
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    /// Discrete `∫_0^T (K_H⁻¹θ^i)² ds` at the model resolution.
    pub energy: Vec<f64>,
    /// The same at twice the resolution.
    pub energy_refined: Vec<f64>,
    /// `energy_refined / energy`, 1 where both vanish.
    pub refinement_ratio: Vec<f64>,
    pub suspected_non_member: bool,
}

/// Growth under refinement above which membership is doubted.
pub const MEMBERSHIP_GROWTH_LIMIT: f64 = 1.2;

/// Discrete energy of `K_H⁻¹θ^i` at resolutions `n` and `2n`, using the
/// fractional-calculus form of the inverse.
pub fn validate_membership(drift: &DriftSpec, model: &FbmModel) -> Result<MembershipReport> {
    check_rough_hurst(model.hurst)?;
    let coarse = model.grid;
    let fine = coarse.refined(2);
    let energy_at = |grid: &TimeGrid| -> Result<Vec<f64>> {
        drift
            .components()
            .iter()
            .map(|c| {
                let inv = apply_k_inverse(c, model.hurst, grid)?;
                Ok(squared_integral(&inv.values, grid))
            })
            .collect()
    };
    let energy = energy_at(&coarse)?;
    let energy_refined = energy_at(&fine)?;
    let refinement_ratio: Vec<f64> = energy
        .iter()
        .zip(&energy_refined)
        .map(|(a, b)| if *a == 0.0 && *b == 0.0 { 1.0 } else { b / a })
        .collect();
    let suspected_non_member = refinement_ratio
        .iter()
        .any(|r| !r.is_finite() || *r > MEMBERSHIP_GROWTH_LIMIT);
    Ok(MembershipReport {
        energy,
        energy_refined,
        refinement_ratio,
        suspected_non_member,
    })
}
