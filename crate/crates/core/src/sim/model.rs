use ndarray::{Array2, ArrayView1};
use std::fmt::Write as _;

use crate::error::{check_hurst, check_positive, FbmError, Result};

/// Uniform time grid `t_i = (i / n) T`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        check_positive("horizon", horizon)?;
        if steps == 0 {
            return Err(FbmError::InvalidParameter {
                name: "steps",
                value: 0.0,
                constraint: "grid needs at least one step",
            });
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Exact at both ends: `time(0) == 0` and `time(n) == T`.
    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        (i as f64 / self.steps as f64) * self.horizon
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.time(i)).collect()
    }

    /// The same horizon with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            horizon: self.horizon,
            steps: self.steps * factor.max(1),
        }
    }
}

/// The statistical model: `d` independent fBm components with Hurst index
/// `H` observed on a uniform grid over `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmModel {
    pub dim: usize,
    pub hurst: f64,
    pub grid: TimeGrid,
}

impl FbmModel {
    pub fn new(dim: usize, hurst: f64, horizon: f64, steps: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FbmError::InvalidParameter {
                name: "dim",
                value: 0.0,
                constraint: "dimension must be at least 1",
            });
        }
        check_hurst(hurst)?;
        Ok(Self {
            dim,
            hurst,
            grid: TimeGrid::new(horizon, steps)?,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn require_rough(&self) -> Result<()> {
        crate::error::check_rough_hurst(self.hurst)
    }

    pub fn require_stein_dimension(&self) -> Result<()> {
        if self.dim >= 3 {
            Ok(())
        } else {
            Err(FbmError::InvalidParameter {
                name: "dim",
                value: self.dim as f64,
                constraint: "shrinkage dominance needs d >= 3",
            })
        }
    }
}

/// A `d × (n+1)` matrix of path values on a [`TimeGrid`]; row `i` is
/// component `i`, column `j` is time `t_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatrix {
    values: Array2<f64>,
    grid: TimeGrid,
}

impl PathMatrix {
    pub fn zeros(dim: usize, grid: TimeGrid) -> Self {
        Self {
            values: Array2::zeros((dim, grid.len())),
            grid,
        }
    }

    pub fn from_array(values: Array2<f64>, grid: TimeGrid) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(FbmError::DimensionMismatch {
                expected: grid.len(),
                found: values.ncols(),
            });
        }
        Ok(Self { values, grid })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn component(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// The `d`-vector at grid index `j`.
    pub fn at(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn squared_norm_at(&self, j: usize) -> f64 {
        self.values.column(j).iter().map(|x| x * x).sum()
    }

    pub(crate) fn check_shape(&self, dim: usize, grid: &TimeGrid) -> Result<()> {
        if self.dim() != dim {
            return Err(FbmError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        if self.grid != *grid {
            return Err(FbmError::DimensionMismatch {
                expected: grid.len(),
                found: self.grid.len(),
            });
        }
        Ok(())
    }

    /// CSV dump with header `t,comp_1,…,comp_d`, one row per grid point,
    /// 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.dim() {
            let _ = write!(out, ",comp_{i}");
        }
        out.push('\n');
        for j in 0..self.grid.len() {
            out.push_str(&format_sig17(self.grid.time(j)));
            for i in 0..self.dim() {
                out.push(',');
                out.push_str(&format_sig17(self.values[[i, j]]));
            }
            out.push('\n');
        }
        out
    }
}

/// Formats like C's `%.17g`: 17 significant digits, shortest of fixed or
/// exponent notation, trailing zeros removed.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        strip_zeros(&fixed)
    } else {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        for (t, n) in [(1.0, 3), (0.1, 7), (2.5, 256), (1.0 / 3.0, 1000)] {
            let g = TimeGrid::new(t, n).unwrap();
            assert_eq!(g.time(0), 0.0);
            assert_eq!(g.time(n), t);
        }
    }

    #[test]
    fn model_validation() {
        assert!(FbmModel::new(0, 0.25, 1.0, 8).is_err());
        assert!(FbmModel::new(1, 1.0, 1.0, 8).is_err());
        assert!(FbmModel::new(1, 0.25, -1.0, 8).is_err());
        assert!(FbmModel::new(1, 0.25, 1.0, 0).is_err());
        let m = FbmModel::new(2, 0.6, 1.0, 8).unwrap();
        assert!(m.require_rough().is_err());
        assert!(m.require_stein_dimension().is_err());
    }

    #[test]
    fn sig17_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-7, 1e20, 123456.789, std::f64::consts::PI, 2.0] {
            let s = format_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_sig17(2.0), "2");
        assert_eq!(format_sig17(0.5), "0.5");
        assert_eq!(format_sig17(1e-7), "9.9999999999999995e-08");
    }

    #[test]
    fn csv_layout() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        let p = PathMatrix::zeros(2, g);
        let csv = p.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,comp_1,comp_2");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "0.5,0,0");
    }
}
