//! fBm path generation on a uniform grid.

pub mod cholesky;
pub mod circulant;
pub mod covariance;
pub mod model;
pub mod rng;
pub mod volterra;

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;

use crate::drift::DriftSpec;
use crate::error::{FbmError, Result};
use crate::frac::KernelWeights;

pub use cholesky::CholeskySampler;
pub use circulant::CirculantSampler;
pub use covariance::{fbm_covariance, fgn_autocovariance};
pub use model::{format_sig17, FbmModel, PathMatrix, TimeGrid};
pub use rng::{RngStream, StreamPurpose};
pub use volterra::VolterraSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Circulant,
    Cholesky,
    Volterra,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Circulant, Method::Cholesky, Method::Volterra];

    pub fn label(self) -> &'static str {
        match self {
            Method::Circulant => "circulant",
            Method::Cholesky => "cholesky",
            Method::Volterra => "volterra",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod(pub String);

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown simulation method `{}`", self.0)
    }
}

impl std::error::Error for UnknownMethod {}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

/// A simulated fBm path and, for the Volterra method, its driving Brownian path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub path: PathMatrix,
    pub driving: Option<PathMatrix>,
}

#[derive(Debug, Clone)]
enum Engine {
    Circulant(CirculantSampler),
    Cholesky(CholeskySampler),
    Volterra(VolterraSampler),
}

/// Reusable per-thread buffers for [`FbmSampler::sample_into`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    complex: Vec<Complex64>,
    normals: Vec<f64>,
    brownian: Vec<f64>,
}

/// Precomputed sampler for one model and method.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    model: FbmModel,
    requested: Method,
    engine: Engine,
}

impl FbmSampler {
    /// Prepares the sampler. A rejected circulant embedding falls back to
    /// Cholesky.
    pub fn new(model: FbmModel, method: Method) -> Result<Self> {
        let engine = match method {
            Method::Circulant => match CirculantSampler::new(model.hurst, &model.grid) {
                Ok(s) => Engine::Circulant(s),
                Err(e) => {
                    log::warn!("{e}; falling back to cholesky");
                    Engine::Cholesky(CholeskySampler::new(model.hurst, &model.grid)?)
                }
            },
            Method::Cholesky => Engine::Cholesky(CholeskySampler::new(model.hurst, &model.grid)?),
            Method::Volterra => {
                Engine::Volterra(VolterraSampler::new(KernelWeights::new(model.hurst, &model.grid)?))
            }
        };
        Ok(Self {
            model,
            requested: method,
            engine,
        })
    }

    /// Volterra sampler built from existing kernel weights.
    pub fn volterra(model: FbmModel, weights: KernelWeights) -> Result<Self> {
        if *weights.grid() != model.grid || weights.hurst() != model.hurst {
            return Err(FbmError::DimensionMismatch {
                expected: model.grid.len(),
                found: weights.grid().len(),
            });
        }
        Ok(Self {
            model,
            requested: Method::Volterra,
            engine: Engine::Volterra(VolterraSampler::new(weights)),
        })
    }

    pub fn model(&self) -> &FbmModel {
        &self.model
    }

    pub fn requested_method(&self) -> Method {
        self.requested
    }

    /// Method actually used after any fallback.
    pub fn method(&self) -> Method {
        match self.engine {
            Engine::Circulant(_) => Method::Circulant,
            Engine::Cholesky(_) => Method::Cholesky,
            Engine::Volterra(_) => Method::Volterra,
        }
    }

    pub fn exposes_driving_path(&self) -> bool {
        matches!(self.engine, Engine::Volterra(_))
    }

    pub fn sample(&self, stream: &RngStream) -> SimulatedPath {
        let mut path = PathMatrix::zeros(self.model.dim, self.model.grid);
        let mut scratch = Scratch::default();
        if self.exposes_driving_path() {
            let mut driving = PathMatrix::zeros(self.model.dim, self.model.grid);
            self.sample_into(stream, &mut path, Some(&mut driving), &mut scratch);
            SimulatedPath {
                path,
                driving: Some(driving),
            }
        } else {
            self.sample_into(stream, &mut path, None, &mut scratch);
            SimulatedPath {
                path,
                driving: None,
            }
        }
    }

    /// Overwrites `path` (and `driving`, for the Volterra method) with the
    /// replicate addressed by `stream`. Shapes must match the model.
    pub fn sample_into(
        &self,
        stream: &RngStream,
        path: &mut PathMatrix,
        mut driving: Option<&mut PathMatrix>,
        scratch: &mut Scratch,
    ) {
        let d = self.model.dim;
        let n = self.model.grid.steps();
        let len = n + 1;
        let values = path
            .values_mut()
            .as_slice_mut()
            .expect("path matrix in standard layout");
        match &self.engine {
            Engine::Circulant(s) => {
                for (p, rows) in values.chunks_mut(2 * len).enumerate() {
                    let (first, second) = rows.split_at_mut(len.min(rows.len()));
                    let second = if second.is_empty() { None } else { Some(second) };
                    s.sample_pair(
                        stream,
                        (2 * p, 2 * p + 1),
                        &mut scratch.complex,
                        &mut scratch.normals,
                        first,
                        second,
                    );
                }
            }
            Engine::Cholesky(s) => {
                scratch.normals.resize(n, 0.0);
                for (i, row) in values.chunks_mut(len).enumerate() {
                    stream.fill_normals(i, &mut scratch.normals);
                    s.apply(&scratch.normals, row);
                }
            }
            Engine::Volterra(s) => {
                scratch.normals.resize(n, 0.0);
                scratch.brownian.resize(len, 0.0);
                for (i, row) in values.chunks_mut(len).enumerate().take(d) {
                    stream.fill_normals(i, &mut scratch.normals);
                    s.apply(&mut scratch.normals, &mut scratch.brownian, row);
                    if let Some(w) = driving.as_deref_mut() {
                        w.values_mut().row_mut(i).as_slice_mut().expect("standard layout")
                            .copy_from_slice(&scratch.brownian);
                    }
                }
            }
        }
    }
}

/// One replicate of the model's fBm with the given method.
pub fn simulate_fbm(model: &FbmModel, method: Method, stream: &RngStream) -> Result<SimulatedPath> {
    Ok(FbmSampler::new(*model, method)?.sample(stream))
}

/// `path + θ`, componentwise on the path's grid.
pub fn add_drift(path: &PathMatrix, drift: &DriftSpec) -> Result<PathMatrix> {
    shift(path, drift, 1.0)
}

/// `path − θ`; inverts [`add_drift`].
pub fn subtract_drift(path: &PathMatrix, drift: &DriftSpec) -> Result<PathMatrix> {
    shift(path, drift, -1.0)
}

fn shift(path: &PathMatrix, drift: &DriftSpec, sign: f64) -> Result<PathMatrix> {
    if drift.dim() != path.dim() {
        return Err(FbmError::DimensionMismatch {
            expected: path.dim(),
            found: drift.dim(),
        });
    }
    let theta = drift.values_on(path.grid());
    let mut out = path.clone();
    out.values_mut().zip_mut_with(&theta, |x, t| *x += sign * t);
    Ok(out)
}
