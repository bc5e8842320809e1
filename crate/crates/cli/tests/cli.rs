use std::path::Path;
use std::process::{Command, Output};

use fracdrift_cli::{DriftChoice, ExperimentConfig};
use fracdrift_core::Method;

fn fracdrift(args: &[&str], dir: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fracdrift"));
    cmd.args(args).current_dir(dir).env_remove("FBM_THREADS");
    if let Some(t) = threads {
        cmd.env("FBM_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn risk_of_path_estimator_matches_bound() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "risk.cfg",
        "# path estimator at zero drift\nestimator.labels = mle\nmodel.d = 3\nmodel.hurst = 0.25\nmodel.horizon = 1\n",
    );
    let out = fracdrift(&["risk", "--config", "risk.cfg", "--out", "run", "--quiet"], dir.path(), None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = read(&dir.path().join("run"), "risk.csv");
    assert_eq!(csv.lines().next().unwrap(), "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error");
    let mean: f64 = column(&csv, "mean")[0].parse().unwrap();
    assert!((mean / 2.0 - 1.0).abs() < 0.01, "mean {mean}");
    assert_eq!(column(&csv, "n_reps"), vec!["50000"]);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sim.cfg", "model.hurst = 0.5\nmodel.n = 4\nmodel.d = 2\n");
    for out in ["a", "b"] {
        let o = fracdrift(&["simulate", "--config", "sim.cfg", "--seed", "42", "--out", out], dir.path(), None);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = read(&dir.path().join("a"), "path_0.csv");
    assert_eq!(a, read(&dir.path().join("b"), "path_0.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "t,comp_1,comp_2");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "0,0,0");
    assert!(read(&dir.path().join("a"), "manifest.txt").contains("path_0.csv rows=5"));

    let o = fracdrift(&["simulate", "--config", "sim.cfg", "--seed", "43", "--out", "c"], dir.path(), None);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(a, read(&dir.path().join("c"), "path_0.csv"));
}

#[test]
fn dominance_sweep_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "sweep.cfg",
        "estimator.labels = js\nsweep.a = 0.5, 1.0, 1.5\nmodel.d = 3\nmodel.hurst = 0.25\ndrift.kind = zero\n",
    );
    let o = fracdrift(&["dominance-sweep", "--config", "sweep.cfg", "--out", "run"], dir.path(), None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("run");
    let csv = read(&run, "dominance.csv");
    assert_eq!(
        csv.lines().next().unwrap(),
        "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error,delta_mean,delta_std_error,ci95_upper,stein_form_mean,certified"
    );
    let deltas: Vec<f64> = column(&csv, "delta_mean").iter().map(|v| v.parse().unwrap()).collect();
    for (got, a) in deltas.iter().zip([0.5, 1.0, 1.5]) {
        let want = a * (a - 2.0) * 2.0 / 3.0;
        assert!((got / want - 1.0).abs() < 0.05, "a={a}: {got} vs {want}");
    }
    assert_eq!(column(&csv, "certified"), vec!["true"; 3]);
    for upper in column(&csv, "ci95_upper") {
        assert!(upper.parse::<f64>().unwrap() < 0.0);
    }
    let svg = read(&run, "dominance_js.svg");
    assert!(svg.starts_with("<svg") && svg.contains("whisker"));
    let manifest = read(&run, "manifest.txt");
    assert!(manifest.contains("dominance.csv rows=3\n"));
    assert!(manifest.contains("dominance_js.svg\n"));
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "model.d = 3\nhursst = 0.3\n");
    let o = fracdrift(&["risk", "--config", "bad.cfg", "--out", "run"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("hursst") && err.contains("line 2"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
    assert!(!dir.path().join("run").exists());

    for (name, text) in [("h.cfg", "model.hurst = 1.2\n"), ("m.cfg", "method = fft\n")] {
        write(dir.path(), name, text);
        let o = fracdrift(&["risk", "--config", name], dir.path(), None);
        assert_eq!(o.status.code(), Some(1), "{name}");
    }
    let o = fracdrift(&["risk", "--config", "missing.cfg"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let o = fracdrift(&["risk", "--reps", "1"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let o = fracdrift(&["kernel-table", "--out", "k"], dir.path(), Some("zero"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "smooth.cfg", "model.hurst = 0.7\ndrift.kind = linear\n");
    let o = fracdrift(&["girsanov-check", "--config", "smooth.cfg", "--reps", "100"], dir.path(), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hurst"));
}

#[test]
fn manifest_reruns_byte_identically_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "run.cfg",
        "estimator.labels = mle, js, js-rational, custom\nmodel.n = 64\nn_reps = 4000\ndrift.kind = power2h\ndrift.c = 0.5\nmethod = cholesky\n",
    );
    let o = fracdrift(&["risk", "--config", "run.cfg", "--out", "first", "--seed", "17"], dir.path(), Some("1"));
    assert_eq!(o.status.code(), Some(0));
    let first = dir.path().join("first");
    let o = fracdrift(
        &["risk", "--config", "first/manifest.txt", "--out", "second", "--quiet"],
        dir.path(),
        Some("5"),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let second = dir.path().join("second");
    assert_eq!(read(&first, "risk.csv"), read(&second, "risk.csv"));
    assert_eq!(column(&read(&first, "risk.csv"), "seed"), vec!["17"; 4]);
    let manifest = read(&first, "manifest.txt");
    assert!(manifest.contains("tool = fracdrift "));
    assert!(manifest.contains("started = ") && manifest.contains("finished = "));
    assert!(manifest.contains("risk.csv rows=4"));
}

#[test]
fn every_subcommand_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "small.cfg", "model.n = 16\nn_reps = 500\ndrift.kind = linear\nmethod = volterra\n");
    for (cmd, file) in [
        ("simulate", "path_0.csv"),
        ("risk", "risk.csv"),
        ("dominance-sweep", "dominance.csv"),
        ("stein-check", "stein.csv"),
        ("kernel-table", "kernel.csv"),
        ("girsanov-check", "girsanov.csv"),
    ] {
        let o = fracdrift(&[cmd, "--config", "small.cfg", "--out", cmd, "--quiet"], dir.path(), None);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let run = dir.path().join(cmd);
        let csv = read(&run, file);
        let width = csv.lines().next().unwrap().split(',').count();
        assert!(csv.lines().all(|l| l.split(',').count() == width), "{cmd}");
        let manifest = read(&run, "manifest.txt");
        assert!(manifest.contains(&format!("command = {cmd}\n")), "{cmd}");
        assert!(manifest.contains(&format!("{file} rows=")), "{cmd}");
    }
    assert!(dir.path().join("simulate/driving_0.csv").exists());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("saved.cfg");
    let cfg = ExperimentConfig {
        dim: 5,
        hurst: 0.1,
        horizon: 2.5,
        steps: 100,
        method: Method::Volterra,
        estimators: vec!["js-rational".into()],
        a: 2.75,
        drift: DriftChoice::Power(0.3, 0.9),
        seed: 123_456_789_012,
        sweep_a: vec![0.1, 0.2, 6.0],
        ..Default::default()
    };
    cfg.save(&path).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);

    std::fs::write(&path, "").unwrap();
    let minimal = ExperimentConfig::load(&path).unwrap();
    assert_eq!(minimal.method, Method::Circulant);
    assert_eq!(minimal.steps, 256);
    assert_eq!(minimal.n_reps, 50_000);
}
