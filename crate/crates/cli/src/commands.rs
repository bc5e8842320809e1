//! One function per subcommand. Each returns the files to write and a few
//! summary lines; nothing here touches the filesystem.

use fracdrift_core::risk::{girsanov_check, risk_difference_paired_multi, stein_identity_check};
use fracdrift_core::sim::{format_sig17, RngStream};
use fracdrift_core::{add_drift, kernel_k, quadratic_risk_mc, FbmSampler, ShrinkageSpec};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::svg::{whisker_plot, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Risk,
    DominanceSweep,
    SteinCheck,
    KernelTable,
    GirsanovCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Risk => "risk",
            Command::DominanceSweep => "dominance-sweep",
            Command::SteinCheck => "stein-check",
            Command::KernelTable => "kernel-table",
            Command::GirsanovCheck => "girsanov-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
    /// Data rows for CSV files.
    pub rows: Option<usize>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<String>,
}

pub const RISK_HEADER: &str = "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error";
pub const DOMINANCE_HEADER: &str = "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error,\
delta_mean,delta_std_error,ci95_upper,stein_form_mean,certified";

/// Accumulates a CSV body and counts its data rows.
struct Csv {
    text: String,
    rows: usize,
}

impl Csv {
    fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
            rows: 0,
        }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
        self.rows += 1;
    }

    fn into_artifact(self, name: impl Into<String>) -> Artifact {
        Artifact {
            name: name.into(),
            contents: self.text,
            rows: Some(self.rows),
        }
    }
}

fn num(x: f64) -> String {
    format_sig17(x)
}

fn model_fields(cfg: &ExperimentConfig, drift: &str, n_reps: u64) -> Vec<String> {
    vec![
        drift.to_string(),
        cfg.dim.to_string(),
        num(cfg.hurst),
        num(cfg.horizon),
        cfg.steps.to_string(),
        n_reps.to_string(),
        cfg.seed.to_string(),
    ]
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Simulate => simulate(cfg),
        Command::Risk => risk(cfg),
        Command::DominanceSweep => dominance_sweep(cfg),
        Command::SteinCheck => stein_check(cfg),
        Command::KernelTable => kernel_table(cfg),
        Command::GirsanovCheck => girsanov(cfg),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let model = cfg.model()?;
    let drift = cfg.drift_spec()?;
    let sampler = FbmSampler::new(model, cfg.method)?;
    if sampler.method() != cfg.method {
        log::warn!("{} unavailable, simulating with {}", cfg.method, sampler.method());
    }
    let mut out = Outcome::default();
    for k in 0..cfg.paths {
        let sim = sampler.sample(&RngStream::new(cfg.seed, k));
        let observed = add_drift(&sim.path, &drift)?;
        out.artifacts.push(Artifact {
            name: format!("path_{k}.csv"),
            contents: observed.to_csv(),
            rows: Some(model.grid.len()),
        });
        if let Some(w) = sim.driving {
            out.artifacts.push(Artifact {
                name: format!("driving_{k}.csv"),
                contents: w.to_csv(),
                rows: Some(model.grid.len()),
            });
        }
    }
    out.summary.push(format!(
        "{} path(s), d={}, H={}, n={}, method {}, drift {}",
        cfg.paths,
        cfg.dim,
        cfg.hurst,
        cfg.steps,
        sampler.method(),
        drift.label()
    ));
    Ok(out)
}

fn risk(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let model = cfg.model()?;
    let drift = cfg.drift_spec()?;
    let mut csv = Csv::new(RISK_HEADER);
    let mut summary = Vec::new();
    for label in &cfg.estimators {
        let estimator = cfg.estimator(label)?;
        log::info!("risk: {label}, {} replicates", cfg.n_reps);
        let r = quadratic_risk_mc(&estimator, &drift, &model, cfg.method, cfg.n_reps, cfg.seed)?;
        let mut fields = vec![label.clone()];
        fields.extend(model_fields(cfg, drift.label(), cfg.n_reps));
        fields.extend([num(r.mean), num(r.std_error)]);
        csv.row(&fields);
        summary.push(format!("{label}: risk {:.6} ± {:.6}", r.mean, r.std_error));
    }
    Ok(Outcome {
        artifacts: vec![csv.into_artifact("risk.csv")],
        summary,
    })
}

fn shrinkage_labels(cfg: &ExperimentConfig) -> Result<Vec<&str>, CliError> {
    let labels: Vec<&str> = cfg
        .estimators
        .iter()
        .map(String::as_str)
        .filter(|l| *l != "mle")
        .collect();
    if labels.is_empty() {
        return Err(CliError::Usage(format!(
            "`estimator.labels` needs a shrinkage estimator (js, js-rational or custom), got `{}`",
            cfg.estimators.join(", ")
        )));
    }
    Ok(labels)
}

fn dominance_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let model = cfg.model()?;
    let drift = cfg.drift_spec()?;
    let mut csv = Csv::new(DOMINANCE_HEADER);
    let mut out = Outcome::default();
    for label in shrinkage_labels(cfg)? {
        let specs = cfg
            .sweep_a
            .iter()
            .map(|a| Ok(cfg.shrinkage(label, *a)?.expect("shrinkage label")))
            .collect::<Result<Vec<ShrinkageSpec>, CliError>>()?;
        log::info!("dominance-sweep: {label}, {} values of a, {} replicates", specs.len(), cfg.n_reps);
        let reports =
            risk_difference_paired_multi(&specs, &drift, &model, cfg.method, cfg.n_reps, cfg.seed)?;
        let mut points = Vec::new();
        for (a, rep) in cfg.sweep_a.iter().zip(&reports) {
            let mut fields = vec![format!("{label}[a={}]", num(*a))];
            fields.extend(model_fields(cfg, drift.label(), cfg.n_reps));
            fields.extend([
                num(rep.shrinkage.mean),
                num(rep.shrinkage.std_error),
                num(rep.delta_mean),
                num(rep.delta_std_error),
                num(rep.ci95_upper),
                num(rep.stein_form_mean),
                rep.certified_conditions.to_string(),
            ]);
            csv.row(&fields);
            points.push(Point {
                x: *a,
                y: rep.delta_mean,
                half_width: rep.ci95_upper - rep.delta_mean,
            });
            out.summary.push(format!(
                "{label} a={a}: delta {:.6} ± {:.6}, ci95 upper {:.6}, certified {}",
                rep.delta_mean, rep.delta_std_error, rep.ci95_upper, rep.certified_conditions
            ));
        }
        let title = format!(
            "Risk difference vs a ({label}, d={}, H={}, drift {})",
            cfg.dim,
            cfg.hurst,
            drift.label()
        );
        out.artifacts.push(Artifact {
            name: format!("dominance_{label}.svg"),
            contents: whisker_plot(&title, "a", "shrinkage risk − path risk (95% CI)", &points),
            rows: None,
        });
    }
    out.artifacts.insert(0, csv.into_artifact("dominance.csv"));
    Ok(out)
}

fn stein_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let drift = cfg.drift_spec()?;
    let theta = drift.at(cfg.stein_t);
    let mut csv = Csv::new(
        "estimator,drift,d,H,t,n_samples,seed,lhs,lhs_std_error,rhs,rhs_std_error,z",
    );
    let mut summary = Vec::new();
    for label in shrinkage_labels(cfg)? {
        let spec = cfg.shrinkage(label, cfg.a)?.expect("shrinkage label");
        let c = stein_identity_check(&spec, cfg.stein_t, &theta, cfg.n_reps, cfg.seed)?;
        csv.row(&[
            label.to_string(),
            drift.label().to_string(),
            cfg.dim.to_string(),
            num(cfg.hurst),
            num(cfg.stein_t),
            cfg.n_reps.to_string(),
            cfg.seed.to_string(),
            num(c.lhs),
            num(c.lhs_std_error),
            num(c.rhs),
            num(c.rhs_std_error),
            num(c.z_score()),
        ]);
        summary.push(format!(
            "{label}: lhs {:.6} ± {:.6}, rhs {:.6} ± {:.6}, z {:.2}",
            c.lhs, c.lhs_std_error, c.rhs, c.rhs_std_error, c.z_score()
        ));
    }
    Ok(Outcome {
        artifacts: vec![csv.into_artifact("stein.csv")],
        summary,
    })
}

/// `K_H(t_i, s)` for `t_i = i T/m` and cell midpoints `s < t_i`.
fn kernel_table(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.kernel_points;
    let dt = cfg.horizon / m as f64;
    let mut csv = Csv::new("t,s,K");
    for i in 1..=m {
        let t = i as f64 * dt;
        for j in 0..i {
            let s = (j as f64 + 0.5) * dt;
            csv.row(&[num(t), num(s), num(kernel_k(t, s, cfg.hurst)?)]);
        }
    }
    let summary = vec![format!("{} kernel values, H={}", csv.rows, cfg.hurst)];
    Ok(Outcome {
        artifacts: vec![csv.into_artifact("kernel.csv")],
        summary,
    })
}

fn girsanov(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let model = cfg.model()?;
    let drift = cfg.drift_spec()?;
    log::info!("girsanov-check: {} replicates", cfg.n_reps);
    let c = girsanov_check(&drift, &model, cfg.n_reps, cfg.seed, cfg.girsanov_clip)?;
    let mut csv = Csv::new(
        "drift,d,H,T,n,n_reps,seed,density_mean,density_std_error,weighted_mean,\
weighted_std_error,shifted_mean,shifted_std_error,mean_one_z,consistency_z",
    );
    let mut fields = model_fields(cfg, drift.label(), cfg.n_reps);
    fields.extend([
        num(c.density.mean),
        num(c.density.std_error),
        num(c.weighted.mean),
        num(c.weighted.std_error),
        num(c.shifted.mean),
        num(c.shifted.std_error),
        num(c.mean_one_z()),
        num(c.consistency_z()),
    ]);
    csv.row(&fields);
    let summary = vec![format!(
        "E[exp L] = {:.6} ± {:.6} (z {:.2}); E[exp(L) F] = {:.6} vs E[F(X+θ)] = {:.6} (z {:.2})",
        c.density.mean,
        c.density.std_error,
        c.mean_one_z(),
        c.weighted.mean,
        c.shifted.mean,
        c.consistency_z()
    )];
    Ok(Outcome {
        artifacts: vec![csv.into_artifact("girsanov.csv")],
        summary,
    })
}
