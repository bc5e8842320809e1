//! Exact sampling from the Cholesky factor of the path covariance.

use nalgebra::DMatrix;

use crate::error::{FbmError, Result};
use crate::sim::covariance::covariance_unchecked;
use crate::sim::TimeGrid;

#[derive(Debug, Clone)]
pub struct CholeskySampler {
    /// Lower factor of `Cov(B_{t_1}, …, B_{t_n})`, row-major.
    lower: Vec<f64>,
    steps: usize,
}

impl CholeskySampler {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        let n = grid.steps();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            covariance_unchecked(grid.time(i + 1), grid.time(j + 1), hurst)
        });
        let chol = cov.cholesky().ok_or(FbmError::NotPositiveDefinite)?;
        let l = chol.l();
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                lower[i * n + j] = l[(i, j)];
            }
        }
        Ok(Self { lower, steps: n })
    }

    /// `out[0] = 0`, `out[1..] = L z`.
    pub fn apply(&self, normals: &[f64], out: &mut [f64]) {
        let n = self.steps;
        out[0] = 0.0;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i + 1];
            out[i + 1] = row.iter().zip(&normals[..=i]).map(|(a, b)| a * b).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_factor_is_step_lower_triangle() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let s = CholeskySampler::new(0.5, &grid).unwrap();
        for i in 0..4 {
            for j in 0..=i {
                assert!((s.lower[i * 4 + j] - 0.5).abs() < 1e-14);
            }
        }
    }
}
