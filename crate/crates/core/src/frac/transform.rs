//! The integral transform `(K_H f)(t) = ∫_0^t K_H(t,s) f(s) ds` and its
//! inverse for absolutely continuous inputs.
//!
//! The inverse is provided in two normalizations. [`apply_k_inverse`] and
//! [`apply_k_inverse_smooth`] evaluate the fractional-calculus formulas
//! `t^{H−1/2} I^{1/2−H}(s^{1/2−H} f′)` and `t^{H−1/2} D^{H−1/2}(s^{1/2−H} f′)`
//! as written. Composed with the transform built from the normalized kernel
//! these return `c_H Γ(H+1/2) · f`, not `f`; [`inverse_scale`] is that
//! factor, and [`apply_k_inverse_normalized`] divides it out so that
//! `K_H(K_H⁻¹ f) = f`.

use crate::error::{FbmError, Result};
use crate::frac::function::{AcFunction, SampledFunction};
use crate::frac::kernel::{c_h_unchecked, KernelWeights};
use crate::frac::rl::{rl_derivative_at, rl_integral_at};
use crate::quadrature::TanhSinh;
use crate::sim::TimeGrid;
use crate::special::gamma;

/// `K_H f` on the grid of `f`.
pub fn apply_k(f: &SampledFunction, hurst: f64) -> Result<SampledFunction> {
    let weights = KernelWeights::new(hurst, &f.grid)?;
    apply_k_with(f, &weights)
}

/// `K_H f` using precomputed cell moments.
///
/// `f` is treated as piecewise linear on each cell. A non-finite `f(0)`
/// (an integrable singularity at the origin) is handled by fitting a power
/// law `f_1 (s/t_1)^p` to `(t_1, t_2)` and integrating it exactly against
/// the kernel on the first cell.
pub fn apply_k_with(f: &SampledFunction, weights: &KernelWeights) -> Result<SampledFunction> {
    if f.grid != *weights.grid() {
        return Err(FbmError::DimensionMismatch {
            expected: weights.grid().len(),
            found: f.values.len(),
        });
    }
    let grid = f.grid;
    let n = grid.steps();
    let v = &f.values;
    let mut out = vec![0.0; n + 1];
    let first_cell: Box<dyn Fn(usize) -> f64> = if v[0].is_finite() {
        Box::new(|i| weights.moment(i, 1) * 0.5 * (v[0] + v[1]))
    } else {
        let p = fitted_power(v, n);
        let t1 = grid.time(1);
        let profile = weights.profile();
        let rule = TanhSinh::with_tolerance(1e-12);
        Box::new(move |i| {
            let ti = grid.time(i);
            let lead = ti - t1;
            rule.integrate(0.0, t1, |s, _, db| {
                profile.eval_with_gap(ti, s, lead + db) * v[1] * (s / t1).powf(p)
            })
            .value
        })
    };
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let row = weights.row(i);
        let mut acc = first_cell(i);
        for j in 2..=i {
            acc += row[j - 1] * 0.5 * (v[j - 1] + v[j]);
        }
        *slot = acc;
    }
    Ok(SampledFunction {
        grid,
        values: out,
    })
}

/// Exponent of the power law through `(t_1, v_1)` and `(t_2, v_2)`; zero
/// when the data do not determine an integrable one.
fn fitted_power(v: &[f64], n: usize) -> f64 {
    if n < 2 || v[1] == 0.0 || v[2] == 0.0 || v[1].signum() != v[2].signum() {
        return 0.0;
    }
    let p = (v[2] / v[1]).ln() / std::f64::consts::LN_2;
    if p.is_finite() && p > -1.0 {
        p
    } else {
        0.0
    }
}

/// `c_H Γ(H + 1/2)`: the factor by which the fractional-calculus inverse
/// overshoots the true inverse of the normalized transform.
pub fn inverse_scale(hurst: f64) -> f64 {
    c_h_unchecked(hurst) * gamma(hurst + 0.5)
}

fn rough_inverse_at(f: &AcFunction, hurst: f64, t: f64) -> f64 {
    if hurst == 0.5 {
        return f.derivative(t);
    }
    let a = 0.5 - hurst;
    let g = |s: f64| s.powf(a) * f.derivative(s);
    t.powf(-a) * rl_integral_at(&g, a, t)
}

fn smooth_inverse_at(f: &AcFunction, hurst: f64, t: f64) -> f64 {
    let a = hurst - 0.5;
    let g = |s: f64| s.powf(-a) * f.derivative(s);
    t.powf(a) * rl_derivative_at(&g, None, a, t)
}

fn on_grid(grid: &TimeGrid, eval: impl Fn(f64) -> f64) -> SampledFunction {
    let mut values = vec![f64::NAN; grid.len()];
    for (i, v) in values.iter_mut().enumerate().skip(1) {
        *v = eval(grid.time(i));
    }
    SampledFunction {
        grid: *grid,
        values,
    }
}

/// `t^{H−1/2} I^{1/2−H}_{0+}(s^{1/2−H} f′(s))(t)` for `H <= 1/2`, at grid
/// points `t > 0` (index 0 is `NaN`). At `H = 1/2` this is `f′`.
pub fn apply_k_inverse(f: &AcFunction, hurst: f64, grid: &TimeGrid) -> Result<SampledFunction> {
    if !(hurst > 0.0 && hurst <= 0.5) {
        return Err(FbmError::InvalidParameter {
            name: "hurst",
            value: hurst,
            constraint: "this form of the inverse needs 0 < H <= 1/2",
        });
    }
    Ok(on_grid(grid, |t| rough_inverse_at(f, hurst, t)))
}

/// `t^{H−1/2} D^{H−1/2}_{0+}(s^{1/2−H} f′(s))(t)` for `H >= 1/2`.
pub fn apply_k_inverse_smooth(
    f: &AcFunction,
    hurst: f64,
    grid: &TimeGrid,
) -> Result<SampledFunction> {
    if !(0.5..1.0).contains(&hurst) {
        return Err(FbmError::InvalidParameter {
            name: "hurst",
            value: hurst,
            constraint: "this form of the inverse needs 1/2 <= H < 1",
        });
    }
    if hurst == 0.5 {
        return Ok(on_grid(grid, |t| f.derivative(t)));
    }
    Ok(on_grid(grid, |t| smooth_inverse_at(f, hurst, t)))
}

/// True inverse of [`apply_k`]: either branch divided by [`inverse_scale`].
pub fn apply_k_inverse_normalized(
    f: &AcFunction,
    hurst: f64,
    grid: &TimeGrid,
) -> Result<SampledFunction> {
    let mut out = if hurst <= 0.5 {
        apply_k_inverse(f, hurst, grid)?
    } else {
        apply_k_inverse_smooth(f, hurst, grid)?
    };
    let scale = inverse_scale(hurst);
    out.values.iter_mut().for_each(|v| *v /= scale);
    Ok(out)
}
