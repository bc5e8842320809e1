//! Estimators of the drift from one observed path: the path itself and
//! shrinkage `δ(B)_t = (1 − a t^{2H} r(‖B_t‖²)/‖B_t‖²) B_t`.
//!
//! Throughout, the shrinkage correction is `g(x, t) = −a t^{2H} r(u)/u · x`
//! with `u = ‖x‖²`, so that `δ(B)_t = B_t + g(B_t, t)`.

use std::fmt;

use crate::error::{check_hurst, FbmError, Result};
use crate::frac::RealFn;
use crate::sim::PathMatrix;

/// Below this squared norm the shrink factor is taken to be 1.
pub const DEGENERATE_NORM: f64 = 1e-300;

/// Probe range and count used to validate a user-supplied `r`.
pub const PROBE_RANGE: (f64, f64) = (1e-8, 1e4);
pub const PROBE_POINTS: usize = 1000;

/// The weight function `r` of the shrinkage family with its derivative.
#[derive(Clone)]
pub struct RFunctionSpec {
    r: RealFn,
    r_prime: RealFn,
    label: String,
}

impl fmt::Debug for RFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RFunctionSpec")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl RFunctionSpec {
    pub fn custom(
        label: impl Into<String>,
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            r: std::sync::Arc::new(r),
            r_prime: std::sync::Arc::new(r_prime),
            label: label.into(),
        }
    }

    /// `r ≡ 1`: the James–Stein weight.
    pub fn one() -> Self {
        Self::custom("1", |_| 1.0, |_| 0.0)
    }

    /// `r(u) = u / (1 + u)`.
    pub fn rational() -> Self {
        Self::custom(
            "u/(1+u)",
            |u| u / (1.0 + u),
            |u| {
                let v = 1.0 + u;
                1.0 / (v * v)
            },
        )
    }

    /// `r(u) = u^p / (1 + u^p)` for `p > 0`.
    pub fn hill(p: f64) -> Self {
        Self::custom(
            format!("u^{p}/(1+u^{p})"),
            move |u| {
                let w = u.powf(p);
                w / (1.0 + w)
            },
            move |u| {
                let w = u.powf(p);
                p * w / (u * (1.0 + w) * (1.0 + w))
            },
        )
    }

    #[inline]
    pub fn r(&self, u: f64) -> f64 {
        (self.r)(u)
    }

    #[inline]
    pub fn r_prime(&self, u: f64) -> f64 {
        (self.r_prime)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Log-spaced probe points on [`PROBE_RANGE`].
    pub fn probe_points() -> Vec<f64> {
        let (lo, hi) = (PROBE_RANGE.0.ln(), PROBE_RANGE.1.ln());
        (0..PROBE_POINTS)
            .map(|k| (lo + (hi - lo) * k as f64 / (PROBE_POINTS - 1) as f64).exp())
            .collect()
    }

    /// Probe-based check of `0 ≤ r ≤ 1`, `r′ ≥ 0` and `r′` against central
    /// differences; returns every failure found.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut range = None;
        let mut monotone = None;
        let mut slope = None;
        for u in Self::probe_points() {
            let r = self.r(u);
            let d = self.r_prime(u);
            if range.is_none() && !(0.0..=1.0).contains(&r) {
                range = Some(Violation::RangeOutsideUnit { u, r });
            }
            if monotone.is_none() && (d.is_nan() || d < 0.0) {
                monotone = Some(Violation::Decreasing { u, r_prime: d });
            }
            if slope.is_none() && d.abs() > 1e-8 {
                let h = 1e-4 * u;
                let fd = (self.r(u + h) - self.r(u - h)) / (2.0 * h);
                if (fd - d).abs() > 1e-5 * d.abs() {
                    slope = Some(Violation::DerivativeMismatch {
                        u,
                        r_prime: d,
                        finite_difference: fd,
                    });
                }
            }
        }
        out.extend(range);
        out.extend(monotone);
        out.extend(slope);
        out
    }
}

/// Parameters of one member of the shrinkage family.
#[derive(Debug, Clone)]
pub struct ShrinkageSpec {
    pub a: f64,
    pub r: RFunctionSpec,
    pub hurst: f64,
}

impl ShrinkageSpec {
    pub fn new(a: f64, r: RFunctionSpec, hurst: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(FbmError::InvalidParameter {
                name: "a",
                value: a,
                constraint: "shrinkage scale must be positive",
            });
        }
        check_hurst(hurst)?;
        Ok(Self { a, r, hurst })
    }

    pub fn james_stein(a: f64, hurst: f64) -> Result<Self> {
        Self::new(a, RFunctionSpec::one(), hurst)
    }

    /// `1 − a t^{2H} r(u)/u`, given `t^{2H}`; 1 for degenerate `u`.
    #[inline]
    pub fn factor(&self, t_2h: f64, u: f64) -> f64 {
        if u < DEGENERATE_NORM {
            1.0
        } else {
            1.0 - self.a * t_2h * self.r(u) / u
        }
    }

    #[inline]
    fn r(&self, u: f64) -> f64 {
        self.r.r(u)
    }

    /// `a t^{4H} (a r²/u − 2(d−2) r/u − 4 r′)`, given `t^{2H}` and `u > 0`.
    #[inline]
    pub fn stein_term(&self, t_2h: f64, u: f64, dim: usize) -> f64 {
        let r = self.r(u);
        let rp = self.r.r_prime(u);
        let d2 = dim as f64 - 2.0;
        self.a * t_2h * t_2h * (self.a * r * r / u - 2.0 * d2 * r / u - 4.0 * rp)
    }

    /// `Σ_i ∂_i g^i = −a t^{2H} (2 r′(u) + (d−2) r(u)/u)`, given `t^{2H}`.
    #[inline]
    pub fn divergence_term(&self, t_2h: f64, u: f64, dim: usize) -> f64 {
        let d2 = dim as f64 - 2.0;
        -self.a * t_2h * (2.0 * self.r.r_prime(u) + d2 * self.r(u) / u)
    }
}

/// Estimator registry entry.
#[derive(Debug, Clone)]
pub enum Estimator {
    Mle,
    Shrinkage(ShrinkageSpec),
}

impl Estimator {
    /// Registry lookup: `mle`, `js` (`r ≡ 1`) and `js-rational`
    /// (`r(u) = u/(1+u)`). Custom weights go through [`Estimator::Shrinkage`].
    pub fn from_label(label: &str, a: f64, hurst: f64) -> Result<Self> {
        match label {
            "mle" => Ok(Estimator::Mle),
            "js" => Ok(Estimator::Shrinkage(ShrinkageSpec::new(a, RFunctionSpec::one(), hurst)?)),
            "js-rational" => Ok(Estimator::Shrinkage(ShrinkageSpec::new(
                a,
                RFunctionSpec::rational(),
                hurst,
            )?)),
            _ => Err(FbmError::UnknownEstimator(label.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Estimator::Mle => "mle".to_string(),
            Estimator::Shrinkage(s) => match s.r.label() {
                "1" => "js".to_string(),
                "u/(1+u)" => "js-rational".to_string(),
                other => format!("custom[{other}]"),
            },
        }
    }

    pub fn apply(&self, path: &PathMatrix) -> PathMatrix {
        match self {
            Estimator::Mle => mle_estimate(path),
            Estimator::Shrinkage(s) => shrinkage_estimate(path, s),
        }
    }
}

/// The observed path as its own estimate.
pub fn mle_estimate(path: &PathMatrix) -> PathMatrix {
    path.clone()
}

/// `δ^i(t_j) = (1 − a t_j^{2H} r(u_j)/u_j) B^i_{t_j}`; zero at `t_0`.
pub fn shrinkage_estimate(path: &PathMatrix, spec: &ShrinkageSpec) -> PathMatrix {
    let grid = *path.grid();
    let mut out = path.clone();
    let values = out.values_mut();
    for j in 0..grid.len() {
        let mut col = values.column_mut(j);
        if j == 0 {
            col.fill(0.0);
            continue;
        }
        let u: f64 = col.iter().map(|x| x * x).sum();
        let f = spec.factor(grid.time(j).powf(2.0 * spec.hurst), u);
        col.mapv_inplace(|x| f * x);
    }
    out
}

fn squared_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `g(x, t) = −a t^{2H} r(‖x‖²)/‖x‖² · x`.
pub fn shrinkage_correction(x: &[f64], t: f64, spec: &ShrinkageSpec) -> Vec<f64> {
    let u = squared_norm(x);
    let f = spec.factor(t.powf(2.0 * spec.hurst), u) - 1.0;
    x.iter().map(|v| f * v).collect()
}

/// Closed-form `Σ_i ∂_i g^i(x, t)`.
pub fn shrinkage_divergence(x: &[f64], t: f64, spec: &ShrinkageSpec) -> Result<f64> {
    let u = squared_norm(x);
    if u <= 0.0 {
        return Err(FbmError::ZeroNorm);
    }
    Ok(spec.divergence_term(t.powf(2.0 * spec.hurst), u, x.len()))
}

/// `‖g(x,t)‖² + 2 t^{2H} Σ_i ∂_i g^i(x,t)` in closed form.
pub fn stein_integrand(x: &[f64], t: f64, spec: &ShrinkageSpec, dim: usize) -> Result<f64> {
    if x.len() != dim {
        return Err(FbmError::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    let u = squared_norm(x);
    if u <= 0.0 {
        return Err(FbmError::ZeroNorm);
    }
    Ok(spec.stein_term(t.powf(2.0 * spec.hurst), u, dim))
}

/// A failed dominance condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionBelowThree { dim: usize },
    HurstNotRough { hurst: f64 },
    ScaleOutOfRange { a: f64, limit: f64 },
    RangeOutsideUnit { u: f64, r: f64 },
    Decreasing { u: f64, r_prime: f64 },
    DerivativeMismatch { u: f64, r_prime: f64, finite_difference: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionBelowThree { dim } => write!(f, "d >= 3 fails (d = {dim})"),
            Violation::HurstNotRough { hurst } => write!(f, "H < 1/2 fails (H = {hurst})"),
            Violation::ScaleOutOfRange { a, limit } => {
                write!(f, "0 < a <= 2(d-2) fails (a = {a}, 2(d-2) = {limit})")
            }
            Violation::RangeOutsideUnit { u, r } => write!(f, "0 <= r <= 1 fails: r({u:e}) = {r}"),
            Violation::Decreasing { u, r_prime } => {
                write!(f, "r increasing fails: r'({u:e}) = {r_prime}")
            }
            Violation::DerivativeMismatch {
                u,
                r_prime,
                finite_difference,
            } => write!(
                f,
                "r' disagrees with r at u = {u:e}: {r_prime} vs difference quotient {finite_difference}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DominanceCheck {
    Certified,
    Violated(Vec<Violation>),
}

impl DominanceCheck {
    pub fn is_certified(&self) -> bool {
        matches!(self, DominanceCheck::Certified)
    }
}

/// Checks the sufficient conditions for the shrinkage estimator to
/// dominate the path estimator.
pub fn validate_dominance_conditions(spec: &ShrinkageSpec, dim: usize) -> DominanceCheck {
    let mut v = Vec::new();
    if dim < 3 {
        v.push(Violation::DimensionBelowThree { dim });
    }
    if spec.hurst.is_nan() || spec.hurst >= 0.5 {
        v.push(Violation::HurstNotRough { hurst: spec.hurst });
    }
    let limit = 2.0 * (dim as f64 - 2.0);
    if !(spec.a > 0.0 && spec.a <= limit) {
        v.push(Violation::ScaleOutOfRange { a: spec.a, limit });
    }
    v.extend(spec.r.violations());
    if v.is_empty() {
        DominanceCheck::Certified
    } else {
        DominanceCheck::Violated(v)
    }
}
