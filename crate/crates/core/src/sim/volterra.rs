//! Discretized Volterra representation `B_{t_i} = Σ_j (w_ij / Δ) ΔW_j`,
//! which produces the fBm path together with its driving Brownian motion.

use crate::frac::KernelWeights;
use crate::sim::TimeGrid;

#[derive(Debug, Clone)]
pub struct VolterraSampler {
    weights: KernelWeights,
    /// `w_ij / Δ`, lower triangle, row-major with row `i − 1` of length `n`.
    averaged: Vec<f64>,
}

impl VolterraSampler {
    pub fn new(weights: KernelWeights) -> Self {
        let grid = *weights.grid();
        let n = grid.steps();
        let dt = grid.dt();
        let mut averaged = vec![0.0; n * n];
        for i in 1..=n {
            for (j, w) in weights.row(i).iter().enumerate() {
                averaged[(i - 1) * n + j] = w / dt;
            }
        }
        Self { weights, averaged }
    }

    pub fn weights(&self) -> &KernelWeights {
        &self.weights
    }

    pub fn grid(&self) -> &TimeGrid {
        self.weights.grid()
    }

    /// From standard normals `z_j`, writes `W` and `B` (both length `n + 1`).
    /// `normals` is overwritten with the increments `ΔW_j`.
    pub fn apply(&self, normals: &mut [f64], brownian: &mut [f64], fbm: &mut [f64]) {
        let grid = *self.grid();
        let n = grid.steps();
        let sd = grid.dt().sqrt();
        let increments = &mut normals[..n];
        increments.iter_mut().for_each(|z| *z *= sd);
        brownian[0] = 0.0;
        let mut acc = 0.0;
        for j in 0..n {
            acc += increments[j];
            brownian[j + 1] = acc;
        }
        fbm[0] = 0.0;
        for (i, out) in fbm[1..=n].iter_mut().enumerate() {
            let row = &self.averaged[i * n..i * n + i + 1];
            *out = row.iter().zip(increments.iter()).fold(0.0, |acc, (w, dw)| acc + w * dw);
        }
    }
}
