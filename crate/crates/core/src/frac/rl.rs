//! Left Riemann–Liouville fractional integral and derivative on `[0, T]`.
//!
//! Sampled inputs go through the product-trapezoid rule: `f` is taken
//! piecewise linear between nodes and the weight `(x − y)^{α−1}` is
//! integrated exactly against each linear piece. Callable inputs are
//! integrated with fixed-level tanh-sinh quadrature, which absorbs the
//! algebraic singularity of the weight and any integrable singularity of
//! `f` at the origin.

use crate::error::{FbmError, Result};
use crate::frac::function::{AcFunction, SampledFunction};
use crate::quadrature::TanhSinh;
use crate::sim::TimeGrid;
use crate::special::gamma;

/// Node set shared by all callable-input operators.
pub(crate) const OPERATOR_LEVEL: u32 = 6;

/// Relative width of the window next to `y = x` where the Marchaud
/// difference quotient is replaced by a slope.
const DIAGONAL_WINDOW: f64 = 1e-5;

/// Either representation accepted by the fractional operators.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Sampled(&'a SampledFunction),
    Ac(&'a AcFunction),
}

impl<'a> From<&'a SampledFunction> for Operand<'a> {
    fn from(f: &'a SampledFunction) -> Self {
        Operand::Sampled(f)
    }
}

impl<'a> From<&'a AcFunction> for Operand<'a> {
    fn from(f: &'a AcFunction) -> Self {
        Operand::Ac(f)
    }
}

fn check_integral_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "integral order must lie in (0, 1]",
        })
    }
}

fn check_derivative_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "derivative order must lie in (0, 1)",
        })
    }
}

/// `I^α_{0+} f` at the grid points. A sampled operand is evaluated on its
/// own grid; `grid` is used only for callable operands.
pub fn rl_integral<'a>(
    f: impl Into<Operand<'a>>,
    alpha: f64,
    grid: &TimeGrid,
) -> Result<SampledFunction> {
    check_integral_order(alpha)?;
    match f.into() {
        Operand::Sampled(s) => rl_integral_sampled(s, alpha),
        Operand::Ac(ac) => {
            let value = ac.value_fn();
            Ok(rl_integral_fn(&|y| value(y), alpha, grid))
        }
    }
}

/// Product-trapezoid rule on sampled data.
pub fn rl_integral_sampled(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_integral_order(alpha)?;
    if !f.values[0].is_finite() {
        return Err(FbmError::InvalidParameter {
            name: "values",
            value: f.values[0],
            constraint: "product integration needs a finite value at t_0",
        });
    }
    let n = f.grid.steps();
    let dt = f.grid.dt();
    let scale = dt.powf(alpha) / gamma(alpha + 2.0);
    let a1 = alpha + 1.0;
    // m^{α+1} for m = 0..=n, reused across all rows
    let pw: Vec<f64> = (0..=n).map(|m| (m as f64).powf(a1)).collect();
    let mut out = vec![0.0; n + 1];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let mut acc = (pw[k - 1] - (kf - 1.0 - alpha) * kf.powf(alpha)) * f.values[0];
        for j in 1..k {
            let m = k - j;
            acc += (pw[m + 1] - 2.0 * pw[m] + pw[m - 1]) * f.values[j];
        }
        acc += f.values[k];
        *slot = scale * acc;
    }
    Ok(SampledFunction {
        grid: f.grid,
        values: out,
    })
}

/// `y = x − w^{1/e}` for `w ∈ [0, x^e]`, with `rest = x^e − w` supplied
/// exactly so that `y` stays accurate near 0. Returns `(y, x − y)`.
#[inline]
fn pull_back(x: f64, x_e: f64, e: f64, w: f64, rest: f64) -> (f64, f64) {
    let gap = w.powf(1.0 / e);
    if rest < 0.5 * x_e {
        let y = -x * ((-rest / x_e).ln_1p() / e).exp_m1();
        (y, gap)
    } else {
        (x - gap, gap)
    }
}

/// `I^α f(x)` for a callable `f`. The substitution `x − y = w^{1/α}`
/// removes the weight singularity, leaving `∫_0^{x^α} f(y(w)) dw / α`.
pub fn rl_integral_at(f: &dyn Fn(f64) -> f64, alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let x_e = x.powf(alpha);
    let q = TanhSinh::fixed(OPERATOR_LEVEL).integrate(0.0, x_e, |w, _, rest| {
        let (y, _) = pull_back(x, x_e, alpha, w, rest);
        f(y)
    });
    q.value / gamma(alpha + 1.0)
}

pub fn rl_integral_fn(f: &dyn Fn(f64) -> f64, alpha: f64, grid: &TimeGrid) -> SampledFunction {
    let values = (0..grid.len())
        .map(|i| rl_integral_at(f, alpha, grid.time(i)))
        .collect();
    SampledFunction {
        grid: *grid,
        values,
    }
}

/// `D^α_{0+} f` in Marchaud form at grid points `t > 0`; index 0 is `NaN`.
pub fn rl_derivative(f: &AcFunction, alpha: f64, grid: &TimeGrid) -> Result<SampledFunction> {
    check_derivative_order(alpha)?;
    let value = f.value_fn();
    let slope = f.derivative_fn();
    Ok(rl_derivative_fn(&|y| value(y), Some(&|y| slope(y)), alpha, grid))
}

pub fn rl_derivative_fn(
    f: &dyn Fn(f64) -> f64,
    slope: Option<&dyn Fn(f64) -> f64>,
    alpha: f64,
    grid: &TimeGrid,
) -> SampledFunction {
    let mut values = vec![f64::NAN; grid.len()];
    for (i, v) in values.iter_mut().enumerate().skip(1) {
        *v = rl_derivative_at(f, slope, alpha, grid.time(i));
    }
    SampledFunction {
        grid: *grid,
        values,
    }
}

/// `D^α f(x) = (f(x)/x^α + α ∫_0^x (f(x) − f(y)) / (x − y)^{α+1} dy) / Γ(1 − α)`.
///
/// With `x − y = w^{1/(1−α)}` the integral becomes
/// `∫_0^{x^{1−α}} (f(x) − f(y)) / ((1−α)(x − y)) dw`. Within
/// `DIAGONAL_WINDOW · x` of the diagonal the difference quotient is
/// replaced by `f′`, using `slope` when supplied and a secant over the
/// window otherwise.
pub fn rl_derivative_at(
    f: &dyn Fn(f64) -> f64,
    slope: Option<&dyn Fn(f64) -> f64>,
    alpha: f64,
    x: f64,
) -> f64 {
    let fx = f(x);
    let beta = 1.0 - alpha;
    let window = DIAGONAL_WINDOW * x;
    let secant = (fx - f(x - window)) / window;
    let x_e = x.powf(beta);
    let q = TanhSinh::fixed(OPERATOR_LEVEL).integrate(0.0, x_e, |w, _, rest| {
        let (y, gap) = pull_back(x, x_e, beta, w, rest);
        let quotient = if gap < window {
            match slope {
                Some(d) => d(x - 0.5 * gap),
                None => secant,
            }
        } else {
            (fx - f(y)) / gap
        };
        quotient / beta
    });
    (fx / x.powf(alpha) + alpha * q.value) / gamma(1.0 - alpha)
}
