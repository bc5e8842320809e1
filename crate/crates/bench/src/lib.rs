//! Shared fixtures for the criterion benchmarks under `benches/`.

use fracdrift_core::{FbmModel, Method};

/// Grid sizes exercised by the sampling benchmarks.
pub const STEPS: [usize; 3] = [64, 256, 1024];

/// Dimension and Hurst index used throughout.
pub const DIM: usize = 3;
pub const HURST: f64 = 0.25;

pub fn model(steps: usize) -> FbmModel {
    FbmModel::new(DIM, HURST, 1.0, steps).expect("valid benchmark model")
}

/// Cholesky and Volterra are quadratic per path; keep them off the largest grid.
pub fn methods_for(steps: usize) -> Vec<Method> {
    if steps > 256 {
        vec![Method::Circulant]
    } else {
        Method::ALL.to_vec()
    }
}
