//! Log-density of the drifted law with respect to the driftless one,
//! evaluated along a driving Brownian path:
//! `L = Σ_i ∫ (K_H⁻¹θ^i) dW^i − ½ Σ_i ∫ (K_H⁻¹θ^i)² ds`.
//!
//! The integrand is the true inverse of the kernel transform used by the
//! simulator, so that shifting `W` by `∫ K_H⁻¹θ ds` shifts the simulated
//! path by `θ`.

use ndarray::Array2;

use crate::drift::{squared_integral, DriftSpec};
use crate::error::{FbmError, Result};
use crate::frac::transform::apply_k_inverse_normalized;
use crate::sim::{FbmModel, PathMatrix, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirsanovEvaluation {
    pub log_density: f64,
    pub ito_term: f64,
    /// `½ Σ_i ∫ (K_H⁻¹θ^i)² ds`
    pub energy_term: f64,
}

impl GirsanovEvaluation {
    pub fn density(&self) -> f64 {
        self.log_density.exp()
    }
}

/// `K_H⁻¹θ` on a grid, prepared once per drift and reused across paths.
#[derive(Debug, Clone)]
pub struct GirsanovIntegrand {
    grid: TimeGrid,
    /// Left-endpoint integrand per cell: row `i`, column `j` is the value
    /// used on `[t_j, t_{j+1}]`; cell 0 takes the value at `t_1`.
    left: Array2<f64>,
    energy_term: f64,
}

impl GirsanovIntegrand {
    pub fn new(drift: &DriftSpec, model: &FbmModel) -> Result<Self> {
        if model.hurst > 0.5 {
            return Err(FbmError::InvalidParameter {
                name: "hurst",
                value: model.hurst,
                constraint: "the density is implemented for H <= 1/2",
            });
        }
        if drift.dim() != model.dim {
            return Err(FbmError::DimensionMismatch {
                expected: model.dim,
                found: drift.dim(),
            });
        }
        let grid = model.grid;
        let n = grid.steps();
        let mut left = Array2::zeros((model.dim, n));
        let mut energy = 0.0;
        for (i, c) in drift.components().iter().enumerate() {
            let h = apply_k_inverse_normalized(c, model.hurst, &grid)?;
            left[[i, 0]] = h.values[1];
            for j in 1..n {
                left[[i, j]] = h.values[j];
            }
            energy += squared_integral(&h.values, &grid);
        }
        Ok(Self {
            grid,
            left,
            energy_term: 0.5 * energy,
        })
    }

    pub fn energy_term(&self) -> f64 {
        self.energy_term
    }

    /// `Σ_i Σ_j h^i(t_j ∨ t_1) (W^i_{t_{j+1}} − W^i_{t_j})`.
    pub fn ito_term(&self, driving: &PathMatrix) -> Result<f64> {
        driving.check_shape(self.left.nrows(), &self.grid)?;
        let w = driving.values();
        let mut acc = 0.0;
        for (i, row) in self.left.outer_iter().enumerate() {
            let wi = w.row(i);
            for (j, h) in row.iter().enumerate() {
                acc += h * (wi[j + 1] - wi[j]);
            }
        }
        Ok(acc)
    }

    pub fn evaluate(&self, driving: &PathMatrix) -> Result<GirsanovEvaluation> {
        let ito_term = self.ito_term(driving)?;
        Ok(GirsanovEvaluation {
            log_density: ito_term - self.energy_term,
            ito_term,
            energy_term: self.energy_term,
        })
    }
}

/// One-shot evaluation; use [`GirsanovIntegrand`] to amortize across paths.
pub fn girsanov_log_density(
    driving: &PathMatrix,
    drift: &DriftSpec,
    model: &FbmModel,
) -> Result<GirsanovEvaluation> {
    GirsanovIntegrand::new(drift, model)?.evaluate(driving)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{FbmSampler, Method, RngStream};
    use approx::assert_relative_eq;

    #[test]
    fn zero_drift_gives_zero_density() {
        let m = FbmModel::new(2, 0.25, 1.0, 32).unwrap();
        let s = FbmSampler::new(m, Method::Volterra).unwrap();
        let w = s.sample(&RngStream::new(5, 0)).driving.unwrap();
        let e = girsanov_log_density(&w, &DriftSpec::zero(2), &m).unwrap();
        assert_eq!(e.log_density, 0.0);
        assert_eq!(e.energy_term, 0.0);
    }

    #[test]
    fn brownian_linear_drift_is_classical() {
        let m = FbmModel::new(1, 0.5, 2.0, 64).unwrap();
        let s = FbmSampler::new(m, Method::Volterra).unwrap();
        let w = s.sample(&RngStream::new(9, 2)).driving.unwrap();
        let e = girsanov_log_density(&w, &DriftSpec::linear(1.0, 1), &m).unwrap();
        let wt = w.values()[[0, 64]];
        assert_relative_eq!(e.log_density, wt - 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.energy_term, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ito_term_is_linear_in_drift() {
        let m = FbmModel::new(1, 0.25, 1.0, 64).unwrap();
        let s = FbmSampler::new(m, Method::Volterra).unwrap();
        let w = s.sample(&RngStream::new(2, 0)).driving.unwrap();
        let a = GirsanovIntegrand::new(&DriftSpec::linear(1.0, 1), &m).unwrap();
        let b = GirsanovIntegrand::new(&DriftSpec::linear(3.0, 1), &m).unwrap();
        let (ia, ib) = (a.ito_term(&w).unwrap(), b.ito_term(&w).unwrap());
        assert_relative_eq!(ib, 3.0 * ia, max_relative = 1e-12);
    }

    #[test]
    fn rejects_smooth_regime_and_bad_shapes() {
        let m = FbmModel::new(1, 0.7, 1.0, 8).unwrap();
        assert!(GirsanovIntegrand::new(&DriftSpec::zero(1), &m).is_err());
        let m = FbmModel::new(2, 0.3, 1.0, 8).unwrap();
        assert!(GirsanovIntegrand::new(&DriftSpec::zero(1), &m).is_err());
        let g = GirsanovIntegrand::new(&DriftSpec::zero(2), &m).unwrap();
        assert!(g.ito_term(&PathMatrix::zeros(3, m.grid)).is_err());
    }
}
