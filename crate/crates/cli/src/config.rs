//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored, nesting is spelled with dotted
//! keys, and every key is optional. Unknown or repeated keys are errors.
//! [`ExperimentConfig::to_text`] writes every key, so save and load round-trip
//! exactly (floats use the shortest representation that parses back to the
//! same value).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracdrift_core::{
    builtin_drift, DriftKind, DriftSpec, Estimator, FbmModel, Method, RFunctionSpec,
    ShrinkageSpec,
};

use crate::error::ConfigError;
use crate::manifest::MANIFEST_HEADER;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
    pub method: Method,
    /// Registry labels: `mle`, `js`, `js-rational`, `custom`.
    pub estimators: Vec<String>,
    pub a: f64,
    /// Exponent `p` of the `custom` weight `r(u) = u^p/(1+u^p)`.
    pub custom_power: f64,
    pub drift: DriftChoice,
    pub n_reps: u64,
    pub seed: u64,
    pub output: PathBuf,
    pub sweep_a: Vec<f64>,
    pub paths: u64,
    pub stein_t: f64,
    pub kernel_points: usize,
    pub girsanov_clip: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftChoice {
    Zero,
    Linear(f64),
    PowerTwoH(f64),
    Power(f64, f64),
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            hurst: 0.25,
            horizon: 1.0,
            steps: 256,
            method: Method::Circulant,
            estimators: vec!["mle".into(), "js".into()],
            a: 1.0,
            custom_power: 0.5,
            drift: DriftChoice::Zero,
            n_reps: 50_000,
            seed: 1,
            output: PathBuf::from("fracdrift-out"),
            sweep_a: vec![0.5, 1.0, 1.5],
            paths: 1,
            stein_t: 1.0,
            kernel_points: 16,
            girsanov_clip: 10.0,
        }
    }
}

const KEYS: [&str; 19] = [
    "model.d",
    "model.hurst",
    "model.horizon",
    "model.n",
    "method",
    "estimator.labels",
    "estimator.a",
    "estimator.custom_power",
    "drift.kind",
    "drift.c",
    "drift.exponent",
    "n_reps",
    "seed",
    "output",
    "sweep.a",
    "simulate.paths",
    "stein.t",
    "kernel.points",
    "girsanov.clip",
];

fn parse_num<T: std::str::FromStr>(key: &str, line: usize, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_list(key: &str, line: usize, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|v| parse_num(key, line, v.trim()))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Parses config text; a run manifest is accepted too and its embedded
    /// config section is used.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let body = match text.lines().next() {
            Some(first) if first.trim() == MANIFEST_HEADER => extract_manifest_config(text)?,
            _ => text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect(),
        };
        let mut cfg = Self::default();
        let mut seen = std::collections::HashMap::new();
        // drift parts are combined after all lines are read
        let (mut kind, mut c, mut exponent) = (None, None, None);
        for (line, raw) in body {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ConfigError::Malformed {
                    line,
                    text: raw.trim().to_string(),
                })?;
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if let Some(first) = seen.insert(key.to_string(), line) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    first,
                    key: key.to_string(),
                });
            }
            match key {
                "model.d" => cfg.dim = parse_num(key, line, value)?,
                "model.hurst" => cfg.hurst = parse_num(key, line, value)?,
                "model.horizon" => cfg.horizon = parse_num(key, line, value)?,
                "model.n" => cfg.steps = parse_num(key, line, value)?,
                "method" => cfg.method = parse_num(key, line, value)?,
                "estimator.labels" => {
                    cfg.estimators = value.split(',').map(|s| s.trim().to_string()).collect()
                }
                "estimator.a" => cfg.a = parse_num(key, line, value)?,
                "estimator.custom_power" => cfg.custom_power = parse_num(key, line, value)?,
                "drift.kind" => kind = Some((line, value.to_string())),
                "drift.c" => c = Some(parse_num::<f64>(key, line, value)?),
                "drift.exponent" => exponent = Some(parse_num::<f64>(key, line, value)?),
                "n_reps" => cfg.n_reps = parse_num(key, line, value)?,
                "seed" => cfg.seed = parse_num(key, line, value)?,
                "output" => cfg.output = PathBuf::from(value),
                "sweep.a" => cfg.sweep_a = parse_list(key, line, value)?,
                "simulate.paths" => cfg.paths = parse_num(key, line, value)?,
                "stein.t" => cfg.stein_t = parse_num(key, line, value)?,
                "kernel.points" => cfg.kernel_points = parse_num(key, line, value)?,
                "girsanov.clip" => cfg.girsanov_clip = parse_num(key, line, value)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        let (c, exponent) = (c.unwrap_or(1.0), exponent.unwrap_or(1.0));
        cfg.drift = match kind {
            None => DriftChoice::Zero,
            Some((line, k)) => match k.as_str() {
                "zero" => DriftChoice::Zero,
                "linear" => DriftChoice::Linear(c),
                "power2h" => DriftChoice::PowerTwoH(c),
                "power" => DriftChoice::Power(c, exponent),
                _ => {
                    return Err(ConfigError::BadValue {
                        line,
                        key: "drift.kind".into(),
                        value: k,
                    })
                }
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }

    /// Every key, one per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let (kind, c, exponent) = match self.drift {
            DriftChoice::Zero => ("zero", 1.0, 1.0),
            DriftChoice::Linear(c) => ("linear", c, 1.0),
            DriftChoice::PowerTwoH(c) => ("power2h", c, 1.0),
            DriftChoice::Power(c, p) => ("power", c, p),
        };
        let values = [
            self.dim.to_string(),
            self.hurst.to_string(),
            self.horizon.to_string(),
            self.steps.to_string(),
            self.method.to_string(),
            self.estimators.join(", "),
            self.a.to_string(),
            self.custom_power.to_string(),
            kind.to_string(),
            c.to_string(),
            exponent.to_string(),
            self.n_reps.to_string(),
            self.seed.to_string(),
            self.output.display().to_string(),
            join(&self.sweep_a),
            self.paths.to_string(),
            self.stein_t.to_string(),
            self.kernel_points.to_string(),
            self.girsanov_clip.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: String| ConfigError::Invalid {
            key: key.to_string(),
            reason,
        };
        self.model().map_err(|e| invalid("model", e.to_string()))?;
        for label in &self.estimators {
            self.estimator(label).map_err(|e| invalid("estimator.labels", e.to_string()))?;
        }
        if self.estimators.is_empty() {
            return Err(invalid("estimator.labels", "at least one label is needed".into()));
        }
        if self.n_reps < 2 {
            return Err(invalid("n_reps", "at least 2 replicates are needed".into()));
        }
        if self.sweep_a.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid("sweep.a", "every a must be positive".into()));
        }
        if !(self.stein_t > 0.0 && self.stein_t <= self.horizon) {
            return Err(invalid("stein.t", "need 0 < t <= model.horizon".into()));
        }
        if self.kernel_points == 0 {
            return Err(invalid("kernel.points", "need at least one point".into()));
        }
        if self.girsanov_clip.is_nan() || self.girsanov_clip <= 0.0 {
            return Err(invalid("girsanov.clip", "must be positive".into()));
        }
        if !(self.custom_power > 0.0 && self.custom_power.is_finite()) {
            return Err(invalid("estimator.custom_power", "must be positive".into()));
        }
        self.drift_spec().map_err(|e| invalid("drift", e.to_string()))?;
        Ok(())
    }

    pub fn model(&self) -> fracdrift_core::Result<FbmModel> {
        FbmModel::new(self.dim, self.hurst, self.horizon, self.steps)
    }

    pub fn drift_spec(&self) -> fracdrift_core::Result<DriftSpec> {
        let kind = match self.drift {
            DriftChoice::Zero => DriftKind::Zero,
            DriftChoice::Linear(c) => DriftKind::Linear { c },
            DriftChoice::PowerTwoH(c) => DriftKind::PowerTwoH { c },
            DriftChoice::Power(c, exponent) => DriftKind::Power { c, exponent },
        };
        builtin_drift(kind, &self.model()?)
    }

    /// Weight function for a shrinkage label; `None` for `mle`.
    pub fn weight(&self, label: &str) -> fracdrift_core::Result<Option<RFunctionSpec>> {
        Ok(match label {
            "mle" => None,
            "js" => Some(RFunctionSpec::one()),
            "js-rational" => Some(RFunctionSpec::rational()),
            "custom" => Some(RFunctionSpec::hill(self.custom_power)),
            other => return Err(fracdrift_core::FbmError::UnknownEstimator(other.to_string())),
        })
    }

    pub fn shrinkage(&self, label: &str, a: f64) -> fracdrift_core::Result<Option<ShrinkageSpec>> {
        self.weight(label)?
            .map(|r| ShrinkageSpec::new(a, r, self.hurst))
            .transpose()
    }

    pub fn estimator(&self, label: &str) -> fracdrift_core::Result<Estimator> {
        Ok(match self.shrinkage(label, self.a)? {
            None => Estimator::Mle,
            Some(spec) => Estimator::Shrinkage(spec),
        })
    }
}

/// Lines of the `[config]` section of a manifest, with file line numbers.
fn extract_manifest_config(text: &str) -> Result<Vec<(usize, &str)>, ConfigError> {
    let mut inside = false;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') && t.ends_with(']') {
            inside = t == "[config]";
            continue;
        }
        if inside {
            out.push((i + 1, line));
        }
    }
    if out.is_empty() {
        return Err(ConfigError::Malformed {
            line: 1,
            text: "manifest has no [config] section".into(),
        });
    }
    Ok(out)
}
