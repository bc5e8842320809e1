use std::fmt;
use std::sync::Arc;

use crate::error::{FbmError, Result};
use crate::sim::TimeGrid;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Values of a function on the points of a [`TimeGrid`].
///
/// Operators that are singular at the origin (fractional derivatives,
/// `K_H⁻¹`) store `NaN` at index 0; every other entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FbmError::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().skip(1).find(|v| !v.is_finite()) {
            return Err(FbmError::InvalidParameter {
                name: "values",
                value: *v,
                constraint: "sampled values must be finite past t_0",
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.time(i))).collect();
        Self { grid, values }
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    /// Largest relative deviation from `reference` over grid times `t >= from`.
    pub fn max_relative_error(&self, reference: impl Fn(f64) -> f64, from: f64) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.time(i) >= from)
            .map(|i| {
                let want = reference(self.grid.time(i));
                (self.values[i] - want).abs() / want.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// An absolutely continuous function together with its a.e. derivative.
#[derive(Clone)]
pub struct AcFunction {
    value: RealFn,
    derivative: RealFn,
}

impl fmt::Debug for AcFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AcFunction").finish_non_exhaustive()
    }
}

impl AcFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0)
    }

    /// `c · t^p`, with derivative `c p t^(p-1)`.
    pub fn power(c: f64, p: f64) -> Self {
        Self::new(
            move |t| if t == 0.0 && p > 0.0 { 0.0 } else { c * t.powf(p) },
            move |t| c * p * t.powf(p - 1.0),
        )
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }

    pub fn value_fn(&self) -> &RealFn {
        &self.value
    }

    pub fn derivative_fn(&self) -> &RealFn {
        &self.derivative
    }

    pub fn sample(&self, grid: &TimeGrid) -> SampledFunction {
        SampledFunction::from_fn(*grid, |t| self.value(t))
    }

    /// Compares the derivative against central differences at `points`;
    /// returns the worst relative discrepancy.
    pub fn derivative_discrepancy(&self, points: &[f64]) -> f64 {
        points
            .iter()
            .map(|&t| {
                let h = 1e-6 * t.abs().max(1e-3);
                let fd = (self.value(t + h) - self.value(t - h)) / (2.0 * h);
                let d = self.derivative(t);
                (fd - d).abs() / d.abs().max(1e-8)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_function_derivative_consistent() {
        let f = AcFunction::power(1.5, 0.5);
        assert_eq!(f.value(0.0), 0.0);
        let pts: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
        assert!(f.derivative_discrepancy(&pts) < 1e-6);
    }

    #[test]
    fn sampled_function_validates() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        assert!(SampledFunction::new(g, vec![0.0; 4]).is_err());
        assert!(SampledFunction::new(g, vec![f64::NAN, 1.0, 1.0, 1.0, 1.0]).is_ok());
        assert!(SampledFunction::new(g, vec![0.0, f64::NAN, 1.0, 1.0, 1.0]).is_err());
    }
}
