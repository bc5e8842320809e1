//! Monte Carlo estimation of the quadratic risk `E_θ ∫_0^T ‖δ_t − θ_t‖² dt`
//! and the checks built on it.
//!
//! Replicate `k` always draws its path from `RngStream::new(seed, k)`, the
//! observed path is `X + θ`, and time integrals use the trapezoid rule with
//! the `t_0` integrand set to zero. Per-replicate values land in a slot
//! indexed by `k` and are reduced sequentially, so every result is
//! independent of the number of worker threads.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::drift::{DriftSpec, GirsanovIntegrand};
use crate::error::{check_positive, FbmError, Result};
use crate::estimators::{validate_dominance_conditions, Estimator, ShrinkageSpec};
use crate::sim::{FbmModel, FbmSampler, Method, PathMatrix, RngStream, Scratch, StreamPurpose};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Seed offset for the independent sample in [`girsanov_check`].
const SHIFTED_SAMPLE_TAG: u64 = 0x5851_f42d_4c95_7f2d;

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub std_error: f64,
}

/// Mean and `sample_std / √n`, summed in index order.
pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len();
    if n == 0 {
        return MeanSe {
            mean: f64::NAN,
            std_error: f64::NAN,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanSe {
            mean,
            std_error: 0.0,
        };
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    MeanSe {
        mean,
        std_error: (ss / (n - 1) as f64 / n as f64).sqrt(),
    }
}

/// Evaluates `f(k, state)` for `k in 0..n_reps` in parallel, returning the
/// results in replicate order. `init` builds one state per worker.
pub fn replicate_map<T, S, I, F>(n_reps: u64, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(u64, &mut S) -> T + Sync + Send,
{
    (0..n_reps)
        .into_par_iter()
        .map_init(init, |state, k| f(k, state))
        .collect()
}

/// Replicates per chunk in [`chunked_fold`].
const CHUNK: u64 = 256;

/// Folds replicates into accumulators chunk by chunk (chunks in parallel),
/// then merges chunk accumulators in chunk order.
fn chunked_fold<A, S, I, N, F, M>(n_reps: u64, init_state: I, new_acc: N, f: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> S + Sync + Send,
    N: Fn() -> A + Sync + Send,
    F: Fn(u64, &mut S, &mut A) + Sync + Send,
    M: Fn(&mut A, A),
{
    let chunks = n_reps.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map_init(init_state, |state, c| {
            let mut acc = new_acc();
            for k in c * CHUNK..((c + 1) * CHUNK).min(n_reps) {
                f(k, state, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = new_acc();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

fn check_reps(n_reps: u64) -> Result<()> {
    if n_reps >= 2 {
        Ok(())
    } else {
        Err(FbmError::InvalidParameter {
            name: "n_reps",
            value: n_reps as f64,
            constraint: "at least two replicates are needed for a standard error",
        })
    }
}

/// `T^{2H+1}/(2H+1) · d`, the risk of the path estimator.
pub fn cramer_rao_bound(model: &FbmModel) -> f64 {
    cramer_rao_value(model.dim, model.hurst, model.horizon())
}

pub fn cramer_rao_value(dim: usize, hurst: f64, horizon: f64) -> f64 {
    let e = 2.0 * hurst + 1.0;
    horizon.powf(e) / e * dim as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_reps: u64,
    pub seed: u64,
    pub estimator_label: String,
    pub drift_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    /// `ℛ(θ, δ) − ℛ(θ, path)`.
    pub delta_mean: f64,
    /// Standard error of the paired per-replicate differences.
    pub delta_std_error: f64,
    pub ci95_upper: f64,
    pub certified_conditions: bool,
    /// MC mean of `∫ (‖g‖² + 2 t^{2H} Σ_i ∂_i g^i) dt` on the same paths.
    pub stein_form_mean: f64,
    pub stein_form_std_error: f64,
    pub shrinkage: RiskEstimate,
    pub mle: RiskEstimate,
}

impl DominanceReport {
    /// `|stein_form_mean − delta_mean|` in units of the combined standard error.
    pub fn stein_agreement_z(&self) -> f64 {
        let se = self.delta_std_error.hypot(self.stein_form_std_error);
        (self.stein_form_mean - self.delta_mean).abs() / se
    }
}

/// Shared per-experiment data: sampler, drift on the grid, `t_j^{2H}` and
/// trapezoid weights.
struct Experiment {
    sampler: FbmSampler,
    theta: Vec<f64>,
    t_2h: Vec<f64>,
    weights: Vec<f64>,
    dim: usize,
    len: usize,
}

struct Work {
    x: PathMatrix,
    scratch: Scratch,
    point: Vec<f64>,
}

impl Experiment {
    fn new(drift: &DriftSpec, model: &FbmModel, method: Method) -> Result<Self> {
        Self::with_sampler(drift, FbmSampler::new(*model, method)?)
    }

    fn with_sampler(drift: &DriftSpec, sampler: FbmSampler) -> Result<Self> {
        let model = *sampler.model();
        if drift.dim() != model.dim {
            return Err(FbmError::DimensionMismatch {
                expected: model.dim,
                found: drift.dim(),
            });
        }
        let grid = model.grid;
        let n = grid.steps();
        let theta = drift.values_on(&grid).into_raw_vec_and_offset().0;
        let t_2h = grid.times().iter().map(|t| t.powf(2.0 * model.hurst)).collect();
        let dt = grid.dt();
        let weights = (0..=n)
            .map(|j| match j {
                0 => 0.0,
                j if j == n => 0.5 * dt,
                _ => dt,
            })
            .collect();
        Ok(Self {
            sampler,
            theta,
            t_2h,
            weights,
            dim: model.dim,
            len: n + 1,
        })
    }

    fn work(&self) -> Work {
        let m = self.sampler.model();
        Work {
            x: PathMatrix::zeros(m.dim, m.grid),
            scratch: Scratch::default(),
            point: vec![0.0; m.dim],
        }
    }

    fn draw(&self, seed: u64, k: u64, w: &mut Work) {
        self.sampler
            .sample_into(&RngStream::new(seed, k), &mut w.x, None, &mut w.scratch);
    }

    fn x(w: &Work) -> &[f64] {
        w.x.values().as_slice().expect("standard layout")
    }

    /// `∫ ‖X_t‖² dt`: the path estimator's loss, which does not involve `θ`.
    fn mle_loss(&self, w: &Work) -> f64 {
        let x = Self::x(w);
        let mut acc = 0.0;
        for j in 1..self.len {
            let mut e = 0.0;
            for i in 0..self.dim {
                let v = x[i * self.len + j];
                e += v * v;
            }
            acc += self.weights[j] * e;
        }
        acc
    }

    /// Loss of the shrinkage estimator and the Stein-form integral on the
    /// observed path `X + θ`.
    fn shrinkage_loss(&self, spec: &ShrinkageSpec, w: &mut Work) -> (f64, f64) {
        let x = w.x.values().as_slice().expect("standard layout");
        let b = &mut w.point;
        let mut loss = 0.0;
        let mut stein = 0.0;
        for j in 1..self.len {
            let mut u = 0.0;
            for i in 0..self.dim {
                let v = x[i * self.len + j] + self.theta[i * self.len + j];
                b[i] = v;
                u += v * v;
            }
            let f = spec.factor(self.t_2h[j], u);
            let mut e = 0.0;
            for (i, bi) in b.iter().enumerate() {
                let r = f * bi - self.theta[i * self.len + j];
                e += r * r;
            }
            loss += self.weights[j] * e;
            if u > 0.0 {
                stein += self.weights[j] * spec.stein_term(self.t_2h[j], u, self.dim);
            }
        }
        (loss, stein)
    }

    fn loss(&self, estimator: &Estimator, w: &mut Work) -> f64 {
        match estimator {
            Estimator::Mle => self.mle_loss(w),
            Estimator::Shrinkage(s) => self.shrinkage_loss(s, w).0,
        }
    }
}

/// `E_θ ∫_0^T ‖δ_t − θ_t‖² dt` by Monte Carlo.
pub fn quadratic_risk_mc(
    estimator: &Estimator,
    drift: &DriftSpec,
    model: &FbmModel,
    method: Method,
    n_reps: u64,
    seed: u64,
) -> Result<RiskEstimate> {
    check_reps(n_reps)?;
    let exp = Experiment::new(drift, model, method)?;
    let losses = replicate_map(
        n_reps,
        || exp.work(),
        |k, w| {
            exp.draw(seed, k, w);
            exp.loss(estimator, w)
        },
    );
    let s = mean_se(&losses);
    Ok(RiskEstimate {
        mean: s.mean,
        std_error: s.std_error,
        n_reps,
        seed,
        estimator_label: estimator.label(),
        drift_label: drift.label().to_string(),
    })
}

/// Paired risk difference of one shrinkage estimator against the path.
pub fn risk_difference_paired(
    spec: &ShrinkageSpec,
    drift: &DriftSpec,
    model: &FbmModel,
    method: Method,
    n_reps: u64,
    seed: u64,
) -> Result<DominanceReport> {
    let mut out =
        risk_difference_paired_multi(std::slice::from_ref(spec), drift, model, method, n_reps, seed)?;
    Ok(out.pop().expect("one report per spec"))
}

/// Paired risk differences for several shrinkage estimators evaluated on
/// the same simulated paths. Each report is identical to what
/// [`risk_difference_paired`] returns for that spec alone.
pub fn risk_difference_paired_multi(
    specs: &[ShrinkageSpec],
    drift: &DriftSpec,
    model: &FbmModel,
    method: Method,
    n_reps: u64,
    seed: u64,
) -> Result<Vec<DominanceReport>> {
    check_reps(n_reps)?;
    let exp = Experiment::new(drift, model, method)?;
    let m = specs.len();
    // per replicate: mle loss, then (loss, stein) per spec
    let rows = replicate_map(
        n_reps,
        || exp.work(),
        |k, w| {
            exp.draw(seed, k, w);
            let mut row = Vec::with_capacity(1 + 2 * m);
            row.push(exp.mle_loss(w));
            for s in specs {
                let (loss, stein) = exp.shrinkage_loss(s, w);
                row.push(loss);
                row.push(stein);
            }
            row
        },
    );
    let column = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
    let mle_losses = column(0);
    let mle = mean_se(&mle_losses);
    let mle_estimate = RiskEstimate {
        mean: mle.mean,
        std_error: mle.std_error,
        n_reps,
        seed,
        estimator_label: "mle".to_string(),
        drift_label: drift.label().to_string(),
    };
    Ok(specs
        .iter()
        .enumerate()
        .map(|(s, spec)| {
            let losses = column(1 + 2 * s);
            let shrink = mean_se(&losses);
            let diffs: Vec<f64> = losses.iter().zip(&mle_losses).map(|(a, b)| a - b).collect();
            let paired = mean_se(&diffs);
            let stein = mean_se(&column(2 + 2 * s));
            let delta_mean = shrink.mean - mle.mean;
            DominanceReport {
                delta_mean,
                delta_std_error: paired.std_error,
                ci95_upper: delta_mean + Z95 * paired.std_error,
                certified_conditions: validate_dominance_conditions(spec, model.dim).is_certified(),
                stein_form_mean: stein.mean,
                stein_form_std_error: stein.std_error,
                shrinkage: RiskEstimate {
                    mean: shrink.mean,
                    std_error: shrink.std_error,
                    n_reps,
                    seed,
                    estimator_label: Estimator::Shrinkage(spec.clone()).label(),
                    drift_label: drift.label().to_string(),
                },
                mle: mle_estimate.clone(),
            }
        })
        .collect())
}

/// Both sides of `E[g(B_t,t)·(B_t − θ_t)] = t^{2H} E[Σ_i ∂_i g^i(B_t,t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinIdentityCheck {
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub rhs: f64,
    pub rhs_std_error: f64,
    pub combined_std_error: f64,
}

impl SteinIdentityCheck {
    pub fn z_score(&self) -> f64 {
        if self.combined_std_error == 0.0 {
            if self.lhs == self.rhs {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.lhs - self.rhs).abs() / self.combined_std_error
        }
    }
}

/// Samples `B_t ~ N(θ_t, t^{2H} I_d)` directly and estimates both sides of
/// the Gaussian integration-by-parts identity.
pub fn stein_identity_check(
    spec: &ShrinkageSpec,
    t: f64,
    theta_t: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<SteinIdentityCheck> {
    check_positive("t", t)?;
    check_reps(n_samples)?;
    let d = theta_t.len();
    let t_2h = t.powf(2.0 * spec.hurst);
    let sd = t.powf(spec.hurst);
    let pairs = replicate_map(
        n_samples,
        || vec![0.0; d],
        |k, b| {
            let mut rng = RngStream::new(seed, k).component_rng_for(StreamPurpose::Direct, 0);
            let mut u = 0.0;
            for (bi, th) in b.iter_mut().zip(theta_t) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *bi = th + sd * z;
                u += *bi * *bi;
            }
            let g_scale = spec.factor(t_2h, u) - 1.0;
            let lhs: f64 = b
                .iter()
                .zip(theta_t)
                .map(|(bi, th)| g_scale * bi * (bi - th))
                .sum();
            let rhs = if u > 0.0 {
                t_2h * spec.divergence_term(t_2h, u, d)
            } else {
                0.0
            };
            (lhs, rhs)
        },
    );
    let lhs = mean_se(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let rhs = mean_se(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    Ok(SteinIdentityCheck {
        lhs: lhs.mean,
        lhs_std_error: lhs.std_error,
        rhs: rhs.mean,
        rhs_std_error: rhs.std_error,
        combined_std_error: lhs.std_error.hypot(rhs.std_error),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseNormCheck {
    pub mc_value: f64,
    pub std_error: f64,
    /// `T^{1−2H} / ((1−2H)(d−2))`.
    pub exact: f64,
}

impl InverseNormCheck {
    pub fn relative_error(&self) -> f64 {
        (self.mc_value - self.exact).abs() / self.exact
    }
}

/// Monte Carlo value of `E ∫_0^T ‖B_t‖^{−2} dt`. The first cell is
/// integrated under the scaling `‖B_t‖² ≈ ‖B_{t_1}‖² (t/t_1)^{2H}`, the
/// rest by the trapezoid rule.
pub fn inverse_norm_moment_check(
    model: &FbmModel,
    method: Method,
    n_reps: u64,
    seed: u64,
) -> Result<InverseNormCheck> {
    model.require_stein_dimension()?;
    model.require_rough()?;
    check_reps(n_reps)?;
    let h = model.hurst;
    let d = model.dim;
    let exact = model.horizon().powf(1.0 - 2.0 * h) / ((1.0 - 2.0 * h) * (d as f64 - 2.0));
    let exp = Experiment::new(&DriftSpec::zero(d), model, method)?;
    let t1 = model.grid.time(1);
    let dt = model.grid.dt();
    let len = exp.len;
    let values = replicate_map(
        n_reps,
        || exp.work(),
        |k, w| {
            exp.draw(seed, k, w);
            let x = Experiment::x(w);
            let inv = |j: usize| {
                let u: f64 = (0..d).map(|i| x[i * len + j] * x[i * len + j]).sum();
                1.0 / u
            };
            let mut acc = inv(1) * t1 / (1.0 - 2.0 * h);
            let mut prev = inv(1);
            for j in 2..len {
                let cur = inv(j);
                acc += 0.5 * dt * (prev + cur);
                prev = cur;
            }
            acc
        },
    );
    let s = mean_se(&values);
    Ok(InverseNormCheck {
        mc_value: s.mean,
        std_error: s.std_error,
        exact,
    })
}

/// Per-time bias of an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnbiasednessReport {
    /// `mean(δ_t) − θ_t`, `d × (n+1)`.
    pub mean_error: Array2<f64>,
    pub std_error: Array2<f64>,
    /// `max_j ‖mean(δ_{t_j}) − θ_{t_j}‖`.
    pub max_discrepancy: f64,
    /// Largest `|mean error| / std error` over entries with positive error bar.
    pub max_z: f64,
}

impl UnbiasednessReport {
    pub fn within(&self, z: f64) -> bool {
        self.max_z <= z
    }
}

/// Monte Carlo mean of `δ_t − θ_t` at every grid time.
pub fn unbiasedness_check(
    estimator: &Estimator,
    drift: &DriftSpec,
    model: &FbmModel,
    method: Method,
    n_reps: u64,
    seed: u64,
) -> Result<UnbiasednessReport> {
    check_reps(n_reps)?;
    let exp = Experiment::new(drift, model, method)?;
    let (d, len) = (exp.dim, exp.len);
    let size = d * len;
    let (sum, sumsq) = chunked_fold(
        n_reps,
        || (exp.work(), vec![0.0; size]),
        || (vec![0.0; size], vec![0.0; size]),
        |k, (w, err), (s, s2)| {
            exp.draw(seed, k, w);
            let x = Experiment::x(w);
            match estimator {
                Estimator::Mle => err.copy_from_slice(x),
                Estimator::Shrinkage(spec) => {
                    for j in 0..len {
                        let mut u = 0.0;
                        for i in 0..d {
                            let v = x[i * len + j] + exp.theta[i * len + j];
                            u += v * v;
                        }
                        let f = if j == 0 { 0.0 } else { spec.factor(exp.t_2h[j], u) };
                        for i in 0..d {
                            let idx = i * len + j;
                            err[idx] = f * (x[idx] + exp.theta[idx]) - exp.theta[idx];
                        }
                    }
                }
            }
            for ((a, b), e) in s.iter_mut().zip(s2.iter_mut()).zip(err.iter()) {
                *a += e;
                *b += e * e;
            }
        },
        |(s, s2), (p, p2)| {
            s.iter_mut().zip(p).for_each(|(a, b)| *a += b);
            s2.iter_mut().zip(p2).for_each(|(a, b)| *a += b);
        },
    );
    let n = n_reps as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let se: Vec<f64> = sumsq
        .iter()
        .zip(&mean)
        .map(|(s2, m)| ((s2 - n * m * m).max(0.0) / (n - 1.0) / n).sqrt())
        .collect();
    let mean_error = Array2::from_shape_vec((d, len), mean).expect("shape");
    let std_error = Array2::from_shape_vec((d, len), se).expect("shape");
    let max_discrepancy = (0..len)
        .map(|j| mean_error.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let max_z = mean_error
        .iter()
        .zip(std_error.iter())
        .filter(|(_, s)| **s > 0.0)
        .map(|(m, s)| m.abs() / s)
        .fold(0.0, f64::max);
    Ok(UnbiasednessReport {
        mean_error,
        std_error,
        max_discrepancy,
        max_z,
    })
}

/// Mean-one and change-of-measure checks of the Girsanov density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirsanovCheck {
    /// `E_P[exp(L)]`.
    pub density: MeanSe,
    /// `E_P[exp(L) F(B)]`.
    pub weighted: MeanSe,
    /// `E[F(X + θ)]` on an independent sample.
    pub shifted: MeanSe,
}

impl GirsanovCheck {
    pub fn mean_one_z(&self) -> f64 {
        (self.density.mean - 1.0).abs() / self.density.std_error
    }

    pub fn consistency_z(&self) -> f64 {
        (self.weighted.mean - self.shifted.mean).abs()
            / self.weighted.std_error.hypot(self.shifted.std_error)
    }
}

/// `min(max_{i,j} |B^i_{t_j}|, clip)`.
pub fn clipped_sup_norm(path: &PathMatrix, clip: f64) -> f64 {
    path.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())).min(clip)
}

/// Volterra paths under `P` weighted by `exp(L)` against shifted paths
/// `X + θ`, for the functional [`clipped_sup_norm`].
pub fn girsanov_check(
    drift: &DriftSpec,
    model: &FbmModel,
    n_reps: u64,
    seed: u64,
    clip: f64,
) -> Result<GirsanovCheck> {
    check_reps(n_reps)?;
    let integrand = GirsanovIntegrand::new(drift, model)?;
    let sampler = FbmSampler::new(*model, Method::Volterra)?;
    let weighted = replicate_map(
        n_reps,
        || {
            (
                PathMatrix::zeros(model.dim, model.grid),
                PathMatrix::zeros(model.dim, model.grid),
                Scratch::default(),
            )
        },
        |k, (b, w, scratch)| {
            sampler.sample_into(&RngStream::new(seed, k), b, Some(w), scratch);
            let density = integrand
                .evaluate(w)
                .expect("driving path has the model shape")
                .density();
            (density, density * clipped_sup_norm(b, clip))
        },
    );
    let exp = Experiment::with_sampler(drift, sampler.clone())?;
    let shifted_seed = seed ^ SHIFTED_SAMPLE_TAG;
    let shifted = replicate_map(
        n_reps,
        || exp.work(),
        |k, w| {
            exp.draw(shifted_seed, k, w);
            let theta = &exp.theta;
            w.x.values_mut()
                .as_slice_mut()
                .expect("standard layout")
                .iter_mut()
                .zip(theta)
                .for_each(|(x, t)| *x += t);
            clipped_sup_norm(&w.x, clip)
        },
    );
    Ok(GirsanovCheck {
        density: mean_se(&weighted.iter().map(|p| p.0).collect::<Vec<_>>()),
        weighted: mean_se(&weighted.iter().map(|p| p.1).collect::<Vec<_>>()),
        shifted: mean_se(&shifted),
    })
}

/// Empirical second moments `mean(B_{t_i} B_{t_j})` over simulated paths,
/// pooled over components, for `1 <= i, j <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCovariance {
    pub mean: Array2<f64>,
    pub std_error: Array2<f64>,
    pub samples: u64,
}

impl EmpiricalCovariance {
    /// `|mean − analytic| / std_error` per entry of the upper triangle.
    pub fn z_scores(&self, hurst: f64, grid: &crate::sim::TimeGrid) -> Vec<f64> {
        let n = self.mean.nrows();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let want = crate::sim::covariance::covariance_unchecked(
                    grid.time(i + 1),
                    grid.time(j + 1),
                    hurst,
                );
                out.push((self.mean[[i, j]] - want).abs() / self.std_error[[i, j]]);
            }
        }
        out
    }
}

/// Monte Carlo covariance of the simulated path on `t_1..t_n`.
pub fn empirical_covariance(
    model: &FbmModel,
    method: Method,
    n_paths: u64,
    seed: u64,
) -> Result<EmpiricalCovariance> {
    check_reps(n_paths)?;
    let exp = Experiment::new(&DriftSpec::zero(model.dim), model, method)?;
    let (d, len) = (exp.dim, exp.len);
    let n = len - 1;
    let (sum, sumsq) = chunked_fold(
        n_paths,
        || exp.work(),
        || (vec![0.0; n * n], vec![0.0; n * n]),
        |k, w, (s, s2)| {
            exp.draw(seed, k, w);
            let x = Experiment::x(w);
            for c in 0..d {
                let row = &x[c * len + 1..(c + 1) * len];
                for i in 0..n {
                    for j in i..n {
                        let p = row[i] * row[j];
                        s[i * n + j] += p;
                        s2[i * n + j] += p * p;
                    }
                }
            }
        },
        |(s, s2), (p, p2)| {
            s.iter_mut().zip(p).for_each(|(a, b)| *a += b);
            s2.iter_mut().zip(p2).for_each(|(a, b)| *a += b);
        },
    );
    let m = (n_paths * d as u64) as f64;
    let mut mean = Array2::zeros((n, n));
    let mut se = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mu = sum[i * n + j] / m;
            let var = ((sumsq[i * n + j] - m * mu * mu) / (m - 1.0)).max(0.0);
            for (a, b) in [(i, j), (j, i)] {
                mean[[a, b]] = mu;
                se[[a, b]] = (var / m).sqrt();
            }
        }
    }
    Ok(EmpiricalCovariance {
        mean,
        std_error: se,
        samples: n_paths * d as u64,
    })
}
