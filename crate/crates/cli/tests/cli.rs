use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bnnprune::io::parse_results;

fn bnnprune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnnprune"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn bnnprune")
}

fn ok(args: &[&str]) -> String {
    let out = bnnprune(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Value of a `key = value` line printed by a subcommand.
fn field(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key)?.trim_start().strip_prefix('=').map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in\n{stdout}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_prune_resample_evaluate_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let train = ok(&["train", "--dataset", "iris", "--samples", "600", "--seed", "3", "--out", s(out)]);
    let chain = PathBuf::from(field(&train, "chain"));
    assert!(chain.exists());
    let acc: f64 = field(&train, "acceptance_rate").parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(out.join("iris_normalized.csv").exists());

    let prune = ok(&["prune", "--chain", s(&chain), "--method", "stn", "--level", "0.5", "--out", s(out)]);
    let mask = PathBuf::from(field(&prune, "mask"));
    assert_eq!(field(&prune, "pruned"), "49 of 99");

    let resample = ok(&["resample", "--chain", s(&chain), "--mask", s(&mask), "--out", s(out)]);
    let resampled = PathBuf::from(field(&resample, "chain"));
    let text = std::fs::read_to_string(&resampled).unwrap();
    assert_eq!(text.lines().count(), 1 + 1000, "header plus the default resample length");

    let eval_dir = out.join("eval");
    let eval = ok(&["evaluate", "--chain", s(&resampled), "--out", s(&eval_dir)]);
    assert!(eval.contains("accuracy"), "{eval}");
    for k in 0..3 {
        assert!(eval_dir.join(format!("roc_class_{k}.csv")).exists());
    }
    let masked = ok(&["evaluate", "--chain", s(&chain), "--mask", s(&mask)]);
    assert!(masked.contains("accuracy"));

    let second = out.join("second");
    let train2 = ok(&["train", "--dataset", "iris", "--samples", "600", "--seed", "4", "--out", s(&second)]);
    let chain2 = field(&train2, "chain");
    let diag_dir = out.join("diag");
    let diag = ok(&["diagnose", "--chain", s(&chain), &chain2, "--params", "0,5", "--out", s(&diag_dir)]);
    assert!(diag.contains("R-hat over 2 chains"), "{diag}");
    let rhat = std::fs::read_to_string(diag_dir.join("rhat.csv")).unwrap();
    assert_eq!(rhat.lines().count(), 1 + 99);
}

#[test]
fn experiment_is_reproducible_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.txt");
    std::fs::write(
        &cfg,
        "# small grid\ndataset = sunspots\nsamples = 500\nruns = 2\nworkers = 2\nlevels = 0.5\nresample_length = 100\nsave_chains = false\n",
    )
    .unwrap();
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let stdout = ok(&["experiment", "--config", s(&cfg), "--out", s(&out)]);
        let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
        assert_eq!(stdout.trim_end(), csv.trim_end());
        assert!(out.join("rhat.csv").exists() && out.join("timing.csv").exists());
        assert!(!out.join("chain_run0.csv").exists());
        csvs.push(csv);
    }
    assert_eq!(csvs[0], csvs[1]);
    let rows = parse_results(&csvs[0], Path::new("results.csv")).unwrap();
    let r = rows
        .iter()
        .find(|r| r.method == "stn" && r.stage == "post_resample" && r.metric == "rmse")
        .unwrap();
    assert_eq!(r.n_runs, 2);
    assert!(r.mean > 0.0 && r.std >= 0.0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    std::fs::write(&cfg, "dataset = sunspots\nruns = 7\nsamples = 99999\n").unwrap();
    let out = dir.path().join("o");
    ok(&[
        "experiment", "--config", s(&cfg), "--dataset", "iris", "--runs", "1", "--samples", "300", "--method", "rnd",
        "--level", "0.25", "--out", s(&out),
    ]);
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let rows = parse_results(&csv, Path::new("results.csv")).unwrap();
    assert!(rows.iter().all(|r| r.dataset == "iris" && r.method == "rnd" && r.level == 0.25 && r.n_runs == 1));
    let saved = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(saved.contains("samples = 300"), "{saved}");
}

fn failure(args: &[&str]) -> (i32, String) {
    let out = bnnprune(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn failures_name_their_stage() {
    let (code, err) = failure(&["train", "--dataset", "no-such-set", "--samples", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("config stage failed") && err.contains("iris"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "dataset = iris\nsamples = many\n").unwrap();
    let (code, err) = failure(&["train", "--config", s(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("config stage failed") && err.contains("line 2"), "{err}");

    let missing = dir.path().join("none.csv");
    let (code, err) = failure(&["evaluate", "--chain", s(&missing)]);
    assert_eq!(code, 1);
    assert!(err.contains("stage failed") && err.contains("none"), "{err}");

    let data = dir.path().join("broken.csv");
    std::fs::write(&data, "a,b,label\n1,2,x\n3,oops,y\n").unwrap();
    let (code, err) = failure(&["train", "--dataset", s(&data), "--samples", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("hidden"), "{err}");
    let cfg = dir.path().join("csv.txt");
    std::fs::write(&cfg, format!("dataset = {}\nhidden = 3\n", data.display())).unwrap();
    let (code, err) = failure(&["train", "--config", s(&cfg), "--samples", "10"]);
    assert_eq!(code, 1);
    assert!(err.contains("data stage failed") && err.contains("oops"), "{err}");
}
