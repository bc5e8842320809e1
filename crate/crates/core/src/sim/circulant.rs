//! Exact fGn sampling by embedding the increment covariance in a circulant
//! matrix of size `2n`, diagonalized by the FFT.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{FbmError, Result};
use crate::sim::covariance::fgn_autocovariance_unchecked;
use crate::sim::rng::RngStream;
use crate::sim::TimeGrid;

/// Eigenvalues below `-EIGEN_TOLERANCE · max` reject the embedding.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Clone)]
pub struct CirculantSampler {
    steps: usize,
    /// `√(λ_k / 2n)`
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("steps", &self.steps)
            .finish_non_exhaustive()
    }
}

impl CirculantSampler {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        let n = grid.steps();
        let m = 2 * n;
        let dt = grid.dt();
        let mut row: Vec<Complex64> = (0..m)
            .map(|k| {
                let lag = if k <= n { k } else { m - k };
                Complex64::new(fgn_autocovariance_unchecked(lag, hurst, dt), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOLERANCE * max {
            return Err(FbmError::NegativeEigenvalue { eigenvalue: min, max });
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(Self {
            steps: n,
            scale,
            fft,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Writes cumulative sums of two independent fGn draws into `first` and
    /// `second` (each of length `n + 1`, index 0 set to zero). The real and
    /// imaginary parts of one transform come from the normals of
    /// `components.0` and `components.1`.
    pub fn sample_pair(
        &self,
        stream: &RngStream,
        components: (usize, usize),
        buffer: &mut Vec<Complex64>,
        normals: &mut Vec<f64>,
        first: &mut [f64],
        second: Option<&mut [f64]>,
    ) {
        let m = self.scale.len();
        buffer.resize(m, Complex64::new(0.0, 0.0));
        normals.resize(m, 0.0);
        stream.fill_normals(components.0, normals);
        for (b, (z, s)) in buffer.iter_mut().zip(normals.iter().zip(&self.scale)) {
            b.re = z * s;
        }
        stream.fill_normals(components.1, normals);
        for (b, (z, s)) in buffer.iter_mut().zip(normals.iter().zip(&self.scale)) {
            b.im = z * s;
        }
        self.fft.process(buffer);
        let n = self.steps;
        first[0] = 0.0;
        let mut acc = 0.0;
        for j in 0..n {
            acc += buffer[j].re;
            first[j + 1] = acc;
        }
        if let Some(second) = second {
            second[0] = 0.0;
            let mut acc = 0.0;
            for j in 0..n {
                acc += buffer[j].im;
                second[j + 1] = acc;
            }
        }
    }
}
