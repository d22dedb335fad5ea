//! End-to-end acceptance checks. Prints one PASS / FAIL / BLOCKED line per
//! criterion.
//!
//! Property checks (8-13 and the reef structure check) make the process exit
//! nonzero when they fail. Quantitative checks (1-7) depend on MCMC outcomes
//! at desk scale; their FAIL lines are reported but only fail the process
//! when `BNN_ACCEPTANCE_STRICT=1`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bnnprune::config::DatasetOptions;
use bnnprune::datasets;
use bnnprune::experiment::{cross_run_rhat, load_problem, Experiment};
use bnnprune::{run_experiment, ExperimentConfig};
use bnnprune_core::data::{Dataset, Targets};
use bnnprune_core::diagnostics::{gelman_rubin, psrf};
use bnnprune_core::metrics::{accuracy, auc, roc_curve, rmse};
use bnnprune_core::nnet::log_posterior_gradient;
use bnnprune_core::posterior::{log_posterior, PosteriorEval, PriorConfig};
use bnnprune_core::pruning::{build_mask, chain_statistics, PruneMethod};
use bnnprune_core::sampler::{resample_chain, run_chain, sample_chain, SamplerConfig, Target};
use bnnprune_core::{Matrix, ModelSpec, ParamVector, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const DESK_SAMPLES: usize = 20_000;
const DESK_RUNS: usize = 10;

#[derive(Clone, Copy, PartialEq)]
enum Outcome {
    Pass,
    Fail,
    Blocked,
}

struct Report {
    lines: Vec<(String, Outcome, bool, String)>,
}

impl Report {
    fn record(&mut self, id: &str, quantitative: bool, outcome: Outcome, detail: String) {
        let tag = match outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Blocked => "BLOCKED",
        };
        println!("[{tag:7}] {id:>4}  {detail}");
        self.lines.push((id.into(), outcome, quantitative, detail));
    }

    fn check(&mut self, id: &str, quantitative: bool, ok: bool, detail: String) {
        self.record(id, quantitative, if ok { Outcome::Pass } else { Outcome::Fail }, detail);
    }
}

fn pass_fail(r: Result<String, String>) -> (bool, String) {
    match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

fn options(dataset: &str) -> DatasetOptions {
    DatasetOptions {
        dataset: Some(dataset.into()),
        ..Default::default()
    }
}

fn desk_config(dataset: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        data: options(dataset),
        runs: DESK_RUNS,
        ..Default::default()
    };
    cfg.sampler.max_samples = DESK_SAMPLES;
    cfg
}

fn mean_of(exp: &Experiment, method: PruneMethod, level: f64, stage: &str) -> f64 {
    let metric = bnnprune::experiment::metric_name(exp.problem.spec.task);
    exp.lookup(method, level, stage, metric)
        .unwrap_or_else(|| panic!("missing {method} {level} {stage} {metric} row"))
        .mean
}

fn slowest_run(exp: &Experiment) -> f64 {
    exp.results.iter().map(|r| r.seconds).fold(0.0, f64::max)
}

fn user_file(name: &str) -> Option<PathBuf> {
    let p = datasets::data_dir().join(name);
    p.exists().then_some(p)
}

// ---- quantitative ------------------------------------------------------

fn iris_and_sunspots(report: &mut Report) {
    let started = Instant::now();
    let iris = run_experiment(&desk_config("iris")).expect("iris experiment");
    eprintln!("iris: {} runs in {:.1}s", iris.results.len(), started.elapsed().as_secs_f64());
    let slow = slowest_run(&iris);

    let a = mean_of(&iris, PruneMethod::Stn, 0.25, "post_resample");
    report.check(
        "1",
        true,
        a >= 95.0 && slow <= 300.0,
        format!("iris stn 0.25 post-resample accuracy {a:.2}% (need >= 95), slowest run {slow:.1}s (<= 300)"),
    );
    let a = mean_of(&iris, PruneMethod::Stn, 0.5, "post_resample");
    report.check("2", true, a >= 93.0, format!("iris stn 0.5 post-resample accuracy {a:.2}% (need >= 93)"));

    let stn = mean_of(&iris, PruneMethod::Stn, 0.75, "post_resample");
    let spn = mean_of(&iris, PruneMethod::Spn, 0.75, "post_resample");
    let rnd = mean_of(&iris, PruneMethod::Rnd, 0.75, "post_resample");
    report.check(
        "5a",
        true,
        stn > rnd && spn > rnd,
        format!("iris 0.75 post-resample accuracy stn {stn:.2} / spn {spn:.2} vs rnd {rnd:.2} (both above rnd)"),
    );

    let four = &iris.results[..4.min(iris.results.len())];
    let rhat = cross_run_rhat(four).expect("R-hat");
    report.check(
        "7",
        true,
        rhat.max_rhat <= 1.2,
        format!(
            "iris pre-prune R-hat across {} chains x {} retained samples: max {:.3} (need <= 1.2), {} degenerate",
            rhat.n_chains,
            rhat.n_samples,
            rhat.max_rhat,
            rhat.degenerate.len()
        ),
    );

    let started = Instant::now();
    let sun = run_experiment(&desk_config("sunspots")).expect("sunspots experiment");
    eprintln!("sunspots: {} runs in {:.1}s", sun.results.len(), started.elapsed().as_secs_f64());
    let slow = slowest_run(&sun);
    let r = mean_of(&sun, PruneMethod::Stn, 0.25, "post_resample");
    report.check(
        "3",
        true,
        r <= 0.09 && slow <= 600.0,
        format!("sunspots stn 0.25 post-resample rmse {r:.4} (need <= 0.09), slowest run {slow:.1}s (<= 600)"),
    );
    let pruned = mean_of(&sun, PruneMethod::Stn, 0.5, "post_prune");
    let resampled = mean_of(&sun, PruneMethod::Stn, 0.5, "post_resample");
    let gain = 1.0 - resampled / pruned;
    report.check(
        "6",
        true,
        gain >= 0.30,
        format!("sunspots stn 0.5 rmse post-prune {pruned:.4} -> post-resample {resampled:.4}: {:.1}% lower (need >= 30%)", 100.0 * gain),
    );
}

fn abalone(report: &mut Report) {
    if user_file("abalone.csv").is_none() {
        report.record("4", true, Outcome::Blocked, "abalone.csv not present in the data directory".into());
        return;
    }
    let exp = run_experiment(&ExperimentConfig {
        methods: vec![PruneMethod::Stn, PruneMethod::Spn],
        levels: vec![0.75],
        ..desk_config("abalone")
    })
    .expect("abalone experiment");
    let stn = mean_of(&exp, PruneMethod::Stn, 0.75, "post_resample");
    let spn = mean_of(&exp, PruneMethod::Spn, 0.75, "post_resample");
    let slow = slowest_run(&exp);
    report.check(
        "4",
        true,
        stn.max(spn) >= 74.0 && slow <= 1800.0,
        format!("abalone 0.75 post-resample accuracy stn {stn:.2} / spn {spn:.2} (best >= 74), slowest run {slow:.1}s"),
    );
}

fn lazer(report: &mut Report) {
    if user_file("lazer.csv").is_none() {
        report.record("5b", true, Outcome::Blocked, "lazer.csv not present in the data directory".into());
        return;
    }
    let exp = run_experiment(&ExperimentConfig {
        levels: vec![0.75],
        ..desk_config("lazer")
    })
    .expect("lazer experiment");
    let stn = mean_of(&exp, PruneMethod::Stn, 0.75, "post_resample");
    let spn = mean_of(&exp, PruneMethod::Spn, 0.75, "post_resample");
    let rnd = mean_of(&exp, PruneMethod::Rnd, 0.75, "post_resample");
    report.check(
        "5b",
        true,
        stn < rnd && spn < rnd,
        format!("lazer 0.75 post-resample rmse stn {stn:.4} / spn {spn:.4} vs rnd {rnd:.4} (both below rnd)"),
    );
}

// ---- properties --------------------------------------------------------

fn random_problem(seed: u64, task: Task) -> (ModelSpec, ParamVector, Dataset) {
    let mut r = rng(seed);
    let input = r.random_range(1..=5);
    let hidden = r.random_range(1..=8);
    let output = match task {
        Task::Regression => r.random_range(1..=2),
        Task::Classification => r.random_range(2..=4),
    };
    let spec = ModelSpec::new(input, hidden, output, task).unwrap();
    let n = r.random_range(1..=12);
    let values = (0..spec.num_params()).map(|_| 0.8 * normal(&mut r)).collect();
    let log_tau_sq = (task == Task::Regression).then(|| r.random_range(-2.0..1.0));
    let params = ParamVector::new(&spec, values, log_tau_sq).unwrap();
    let features = Matrix::from_vec(n, input, (0..n * input).map(|_| r.random_range(-1.0..1.5)).collect()).unwrap();
    let targets = match task {
        Task::Regression => {
            Targets::Real(Matrix::from_vec(n, output, (0..n * output).map(|_| normal(&mut r)).collect()).unwrap())
        }
        Task::Classification => Targets::Labels {
            labels: (0..n).map(|_| r.random_range(0..output)).collect(),
            classes: output,
        },
    };
    let names = (0..input).map(|i| format!("x{i}")).collect();
    (spec, params, Dataset::new("random", names, features, targets).unwrap())
}

fn gradients() -> Result<String, String> {
    const H: f64 = 1e-5;
    let mut worst: f64 = 0.0;
    let mut networks = 0;
    for (task, seeds, prior) in [
        (Task::Regression, 0..100u64, PriorConfig { sigma_sq: 2.0, nu1: 0.3, nu2: 0.1 }),
        (Task::Classification, 1000..1100, PriorConfig::default()),
    ] {
        for seed in seeds {
            let (spec, params, data) = random_problem(seed, task);
            let grad = log_posterior_gradient(&spec, &params, &data, &prior).map_err(|e| e.to_string())?;
            for (i, g) in grad.iter().enumerate() {
                let mut up = params.clone();
                let mut down = params.clone();
                up.values[i] += H;
                down.values[i] -= H;
                let f = |p: &ParamVector| log_posterior(&spec, p, &data, &prior).unwrap();
                let fd = (f(&up) - f(&down)) / (2.0 * H);
                let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-2);
                worst = worst.max(rel);
                if rel > 1e-4 {
                    return Err(format!("{task:?} seed {seed} coord {i}: analytic {g} vs finite difference {fd}"));
                }
            }
            networks += 1;
        }
    }
    Ok(format!("{networks} networks (both tasks), worst relative error {worst:.2e} (<= 1e-4)"))
}

struct Gaussian {
    mean: Vec<f64>,
    precision: Vec<Vec<f64>>,
    var: Vec<f64>,
}

impl Target for Gaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }
    fn has_noise(&self) -> bool {
        false
    }
    fn evaluate(&self, p: &ParamVector, with_gradient: bool) -> bnnprune_core::Result<PosteriorEval> {
        let d: Vec<f64> = p.values.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        let pd: Vec<f64> = self.precision.iter().map(|row| row.iter().zip(&d).map(|(a, b)| a * b).sum()).collect();
        Ok(PosteriorEval {
            log_likelihood: -0.5 * d.iter().zip(&pd).map(|(a, b)| a * b).sum::<f64>(),
            log_prior: 0.0,
            gradient: with_gradient.then(|| pd.iter().map(|v| -v).collect()),
        })
    }
}

/// Batch-means estimate and standard error.
fn batch_mean(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    (m, (var / batches as f64).sqrt())
}

fn target_recovery() -> Result<String, String> {
    let det = 2.0 - 0.25;
    let targets = [
        Gaussian {
            mean: vec![0.0],
            precision: vec![vec![1.0]],
            var: vec![1.0],
        },
        Gaussian {
            mean: vec![1.0, -2.0],
            precision: vec![vec![2.0 / det, -0.5 / det], vec![-0.5 / det, 1.0 / det]],
            var: vec![1.0, 2.0],
        },
    ];
    let mut detail = String::new();
    for (t, g) in targets.iter().enumerate() {
        let cfg = SamplerConfig {
            max_samples: 60_000,
            burn_in_fraction: 0.0,
            step_size: 0.6,
            proposal_std: 0.8,
            tau_proposal_std: 0.2,
            langevin_probability: 0.5,
            seed: 77 + t as u64,
        };
        let init = ParamVector {
            values: g.mean.clone(),
            log_tau_sq: None,
        };
        let chain = run_chain(g, &cfg, &init, None).map_err(|e| e.to_string())?;
        for j in 0..g.dim() {
            let xs = chain.column(j);
            let (m, se) = batch_mean(&xs, 50);
            let sq: Vec<f64> = xs.iter().map(|x| (x - g.mean[j]).powi(2)).collect();
            let (v, vse) = batch_mean(&sq, 50);
            let zm = (m - g.mean[j]).abs() / se;
            let zv = (v - g.var[j]).abs() / vse;
            if zm > 3.0 || zv > 3.0 {
                return Err(format!("{}-D coord {j}: mean {m:.4} ({zm:.2} se), var {v:.4} ({zv:.2} se)", g.dim()));
            }
            let _ = write!(detail, "{}-D x{j} mean {zm:.2}se var {zv:.2}se; ", g.dim());
        }
    }
    Ok(format!("{}all within 3 Monte-Carlo se", detail))
}

fn masks() -> Result<String, String> {
    let levels = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
    let mut checked = 0;
    for (name, seed) in [("iris", 3u64), ("sunspots", 4)] {
        let mut cfg = ExperimentConfig {
            data: options(name),
            resample_length: 300,
            ..Default::default()
        };
        cfg.sampler.max_samples = 1500;
        cfg.sampler.seed = seed;
        let problem = load_problem(&cfg).map_err(|e| e.to_string())?;
        let spec = &problem.spec;
        let train = &problem.prepared.train;
        let init = bnnprune::experiment::initial_params(spec, 0.5, seed);
        let chain = sample_chain(spec, train, &cfg.sampler, &cfg.prior, &init, None).map_err(|e| e.to_string())?;
        let stats = chain_statistics(&chain, 0.5).map_err(|e| e.to_string())?;
        let mean = chain.posterior_mean(0.5).map_err(|e| e.to_string())?;
        let t = spec.num_params();
        for method in PruneMethod::ALL {
            for level in levels {
                let mask = build_mask(&stats, method, level, Some(seed)).map_err(|e| e.to_string())?;
                let want = (level * t as f64).floor() as usize;
                if mask.pruned_count() != want {
                    return Err(format!("{name} {method} {level}: pruned {} of {t}, want {want}", mask.pruned_count()));
                }
                let start = mask.apply(&mean).map_err(|e| e.to_string())?;
                let rcfg = cfg.resample_config(seed ^ checked);
                let rs = resample_chain(spec, train, &rcfg, &cfg.prior, &start, &mask).map_err(|e| e.to_string())?;
                for i in 0..rs.len() {
                    let theta = rs.theta(i);
                    if let Some(j) = (0..t).find(|&j| !mask.keep()[j] && theta[j] != 0.0) {
                        return Err(format!("{name} {method} {level}: row {i} pruned coord {j} = {}", theta[j]));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (dataset, method, level) masks: exact floor(level*T) and zeros across every resampled row"))
}

fn concordance(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                den += 1.0;
                num += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    num / den
}

fn metric_identities() -> Result<String, String> {
    let mut r = rng(11);
    let mut instances = 0;
    while instances < 500 {
        let n = r.random_range(2..=50);
        // coarse scores force ties
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..8) as f64 / 4.0).collect();
        let labels: Vec<bool> = (0..n).map(|_| r.random_bool(0.4)).collect();
        if labels.iter().all(|l| *l) || labels.iter().all(|l| !*l) {
            continue;
        }
        let a = auc(&roc_curve(&scores, &labels).map_err(|e| e.to_string())?);
        let c = concordance(&scores, &labels);
        if (a - c).abs() > 1e-12 {
            return Err(format!("n={n}: AUC {a} vs concordance {c}"));
        }
        let y: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
        if rmse(&y, &y).unwrap() != 0.0 {
            return Err("rmse(y, y) != 0".into());
        }
        let shift = r.random_range(-3.0..3.0);
        let shifted: Vec<f64> = y.iter().map(|v| v + shift).collect();
        if (rmse(&shifted, &y).unwrap() - shift.abs()).abs() > 1e-12 {
            return Err(format!("rmse of a constant offset {shift} is not |offset|"));
        }
        let truth: Vec<usize> = (0..n).map(|_| r.random_range(0..3)).collect();
        let pred: Vec<usize> = (0..n).map(|_| r.random_range(0..3)).collect();
        let hits = truth.iter().zip(&pred).filter(|(a, b)| a == b).count();
        if (accuracy(&pred, &truth).unwrap() - 100.0 * hits as f64 / n as f64).abs() > 1e-12
            || accuracy(&truth, &truth).unwrap() != 100.0
        {
            return Err("accuracy does not equal the percentage of matches".into());
        }
        instances += 1;
    }
    Ok(format!("{instances} random instances (n <= 50, tied scores): AUC = concordance, rmse offset, accuracy counts"))
}

fn rhat_identities() -> Result<String, String> {
    let mut r = rng(12);
    for n in [2usize, 3, 10, 257] {
        let c: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
        let got = gelman_rubin(&[&c, &c, &c]).map_err(|e| e.to_string())?;
        let want = ((n as f64 - 1.0) / n as f64).sqrt();
        if got.degenerate || (got.value - want).abs() > 1e-12 {
            return Err(format!("n={n}: R-hat {} vs sqrt((n-1)/n) {want}", got.value));
        }
    }
    let flat = gelman_rubin(&[&[1.0, 1.0, 1.0], &[4.0, 4.0, 4.0]]).map_err(|e| e.to_string())?;
    if !flat.degenerate || flat.value != f64::INFINITY {
        return Err(format!("W=0 gave {} without the degenerate flag", flat.value));
    }
    let rows = 6;
    let chain = |shift: f64| {
        bnnprune_core::sampler::Chain::from_parts(
            2,
            false,
            (0..rows).flat_map(|i| [i as f64 + shift, 0.5]).collect(),
            vec![0.0; rows],
            vec![true; rows],
            None,
            SamplerConfig::default(),
        )
        .unwrap()
    };
    let (a, b) = (chain(0.0), chain(1.0));
    let report = psrf(&[&a, &b], 0.0).map_err(|e| e.to_string())?;
    if report.degenerate != [1] {
        return Err(format!("constant column not flagged: {:?}", report.degenerate));
    }
    Ok("identical chains give sqrt((n-1)/n) for n in {2,3,10,257}; W=0 is +inf and flagged".into())
}

fn small_config(dataset: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        data: options(dataset),
        runs: 3,
        workers: 2,
        seed: 2024,
        resample_length: 200,
        out: Some(out.to_path_buf()),
        ..Default::default()
    };
    cfg.sampler.max_samples = 1500;
    cfg
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        run_experiment(&small_config("iris", &out)).map_err(|e| e.to_string())?;
        bytes.push(std::fs::read(out.join("results.csv")).map_err(|e| e.to_string())?);
    }
    if bytes[0] != bytes[1] {
        return Err("results.csv differs between two identical executions".into());
    }
    Ok(format!("two executions (3 runs, 2 workers) wrote identical results.csv ({} bytes)", bytes[0].len()))
}

fn six_class_csv(path: &Path) {
    let mut r = rng(310);
    let mut s = String::from("depth,porosity,grain,facies\n");
    for i in 0..300 {
        let class = i % 6;
        let c = class as f64;
        let _ = writeln!(
            s,
            "{:.4},{:.4},{:.4},facies_{class}",
            c + 0.4 * normal(&mut r),
            (c * 1.3).sin() + 0.3 * normal(&mut r),
            0.2 * c * c + 0.5 * normal(&mut r)
        );
    }
    std::fs::write(path, s).unwrap();
}

fn reef_structure(csv: &Path, dir: &Path) -> Result<String, String> {
    let out = dir.join("out");
    let mut cfg = small_config(&csv.to_string_lossy(), &out);
    cfg.data.hidden = Some(8);
    cfg.runs = 1;
    run_experiment(&cfg).map_err(|e| e.to_string())?;
    for k in 0..6 {
        let f = out.join(format!("roc_class_{k}.csv"));
        let text = std::fs::read_to_string(&f).map_err(|e| format!("{}: {e}", f.display()))?;
        if !text.starts_with("class,fpr,tpr\n") || text.lines().count() < 3 {
            return Err(format!("{} is not a ROC curve", f.display()));
        }
    }
    if out.join("roc_class_6.csv").exists() {
        return Err("more than six ROC files".into());
    }
    Ok(format!("pipeline ran end to end and wrote roc_class_0..5.csv for {}", csv.display()))
}

fn main() {
    let strict = std::env::var("BNN_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut report = Report { lines: Vec::new() };

    iris_and_sunspots(&mut report);
    abalone(&mut report);
    lazer(&mut report);

    for (id, check) in [
        ("8", gradients as fn() -> Result<String, String>),
        ("9", target_recovery),
        ("10", masks),
        ("11", metric_identities),
        ("12", rhat_identities),
        ("13", determinism),
    ] {
        let (ok, detail) = pass_fail(check());
        report.check(id, false, ok, detail);
    }

    match std::env::var_os("BNN_REEF_CSV") {
        Some(path) => {
            let dir = tempfile::tempdir().unwrap();
            let (ok, detail) = pass_fail(reef_structure(Path::new(&path), dir.path()));
            report.check("reef", false, ok, detail);
        }
        None => report.record("reef", false, Outcome::Blocked, "no BNN_REEF_CSV given; reef cores are not distributed".into()),
    }
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("six_class.csv");
    six_class_csv(&csv);
    let (ok, detail) = pass_fail(reef_structure(&csv, dir.path()));
    report.check("reef*", false, ok, format!("synthetic 3-feature 6-class stand-in: {detail}"));

    let failed: Vec<&str> = report
        .lines
        .iter()
        .filter(|(_, o, quantitative, _)| *o == Outcome::Fail && (strict || !quantitative))
        .map(|(id, ..)| id.as_str())
        .collect();
    let red_quant = report.lines.iter().filter(|(_, o, q, _)| *o == Outcome::Fail && *q).count();
    println!(
        "{} checks, {} quantitative FAIL{}",
        report.lines.len(),
        red_quant,
        if strict { " (strict)" } else { " (reported, not gating)" }
    );
    if !failed.is_empty() {
        eprintln!("acceptance failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
