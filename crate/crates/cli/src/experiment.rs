//! Train, prune, resample and evaluate over many seeded runs, then
//! aggregate and export.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bnnprune_core::data::{prepare, Prepared, Targets};
use bnnprune_core::diagnostics::{self, ChainMoments, PsrfReport};
use bnnprune_core::math::derive_seed;
use bnnprune_core::metrics::{self, RocCurve};
use bnnprune_core::predictive::posterior_predictive;
use bnnprune_core::pruning::{build_mask, chain_statistics, PruneMask, PruneMethod};
use bnnprune_core::sampler::{resample_chain, sample_chain, Chain};
use bnnprune_core::{ModelSpec, ParamVector, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::datasets::{load_csv, DatasetSpec};
use crate::error::{AtStage, Error, Result, Stage, StageError};
use crate::io::{self, ChainMeta, ResultRow};

/// Loaded, split and normalized data plus the network shape.
#[derive(Debug, Clone)]
pub struct Problem {
    pub dataset: DatasetSpec,
    pub spec: ModelSpec,
    pub prepared: Prepared,
    pub split_seed: u64,
    pub train_ratio: f64,
}

pub fn load_problem(cfg: &ExperimentConfig) -> Result<Problem, StageError> {
    cfg.validate().at(Stage::Config)?;
    let dataset = cfg.data.resolve().at(Stage::Config)?;
    let raw = load_csv(&dataset).at(Stage::Data)?;
    let split_seed = cfg.split_seed();
    let prepared = prepare(&raw, cfg.train_ratio, split_seed, dataset.ordered).at(Stage::Data)?;
    let spec = ModelSpec::new(raw.num_features(), dataset.hidden, raw.output_size(), raw.task()).at(Stage::Config)?;
    log::info!(
        "{}: {} train / {} test rows, network {}-{}-{} ({} parameters)",
        dataset.name,
        prepared.train.len(),
        prepared.test.len(),
        spec.input_size,
        spec.hidden_size,
        spec.output_size,
        spec.num_params()
    );
    Ok(Problem {
        dataset,
        spec,
        prepared,
        split_seed,
        train_ratio: cfg.train_ratio,
    })
}

pub fn metric_name(task: Task) -> &'static str {
    match task {
        Task::Regression => "rmse",
        Task::Classification => "accuracy",
    }
}

/// Test-set performance of one posterior sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// RMSE on normalized targets, or accuracy in percent.
    pub metric: f64,
    /// One-vs-all AUC per class (empty for regression); `None` when the
    /// test set lacks positives or negatives for that class.
    pub auc: Vec<Option<f64>>,
    pub roc: Vec<Option<RocCurve>>,
}

/// Posterior-predictive evaluation on the test split; `mask` is applied to
/// every retained sample.
pub fn evaluate(
    problem: &Problem,
    chain: &Chain,
    burn_in: f64,
    thinning: usize,
    mask: Option<&PruneMask>,
) -> Result<Evaluation> {
    let test = &problem.prepared.test;
    let pred = posterior_predictive(&problem.spec, chain, &test.features, burn_in, thinning, mask)?;
    Ok(match &test.targets {
        Targets::Real(y) => Evaluation {
            metric: metrics::rmse(pred.mean.as_slice(), y.as_slice())?,
            auc: Vec::new(),
            roc: Vec::new(),
        },
        Targets::Labels { labels, .. } => {
            let predicted = pred.labels.as_deref().unwrap_or_default();
            let roc = metrics::one_vs_all_roc(&pred.mean, labels)?;
            Evaluation {
                metric: metrics::accuracy(predicted, labels)?,
                auc: roc.iter().map(|c| c.as_ref().map(metrics::auc)).collect(),
                roc,
            }
        }
    })
}

/// One (method, level) branch of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneOutcome {
    pub method: PruneMethod,
    pub level: f64,
    pub pruned: usize,
    /// Original chain with the mask applied to each sample.
    pub post_prune: Evaluation,
    /// Masked chain resampled from the pruned posterior mean.
    pub post_resample: Evaluation,
    pub resample_acceptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: usize,
    pub pre_prune: Evaluation,
    pub outcomes: Vec<PruneOutcome>,
    pub acceptance_rate: f64,
    /// Split-R̂ of this run's chain after burn-in.
    pub split_rhat: PsrfReport,
    /// Post-burn-in moments, for R̂ across runs.
    pub moments: ChainMoments,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run_index: usize,
    pub stage: Stage,
    pub message: String,
}

/// Seeds of one run, all derived from `master_seed + run_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub init: u64,
    pub chain: u64,
    pub random_mask: u64,
    resample_base: u64,
}

impl RunSeeds {
    pub fn new(master_seed: u64, run_index: usize) -> Self {
        let run = master_seed.wrapping_add(run_index as u64);
        RunSeeds {
            init: derive_seed(run, 1),
            chain: derive_seed(run, 2),
            random_mask: derive_seed(run, 3),
            resample_base: derive_seed(run, 4),
        }
    }

    /// Independent of which other branches are configured.
    pub fn resample(&self, method: PruneMethod, level: f64) -> u64 {
        let m = PruneMethod::ALL.iter().position(|x| *x == method).unwrap_or(0) as u64;
        derive_seed(self.resample_base, m << 56 ^ level.to_bits())
    }
}

/// θ₀ with every weight drawn from `N(0, init_std²)`; `log τ²` starts at 0.
pub fn initial_params(spec: &ModelSpec, init_std: f64, seed: u64) -> ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ParamVector::zeros(spec);
    for v in &mut p.values {
        *v = init_std * rng.sample::<f64, _>(StandardNormal);
    }
    p
}

fn level_tag(level: f64) -> String {
    level.to_string()
}

pub fn chain_file(out: &Path, run: usize) -> PathBuf {
    out.join(format!("chain_run{run}.csv"))
}

pub fn mask_file(out: &Path, run: usize, method: PruneMethod, level: f64) -> PathBuf {
    out.join(format!("mask_run{run}_{method}_{}.txt", level_tag(level)))
}

pub fn resample_file(out: &Path, run: usize, method: PruneMethod, level: f64) -> PathBuf {
    out.join(format!("resample_run{run}_{method}_{}.csv", level_tag(level)))
}

/// One full pass: sample, evaluate, then prune/evaluate/resample/evaluate
/// for every configured method and level.
pub fn run_pipeline(cfg: &ExperimentConfig, problem: &Problem, run_index: usize) -> Result<RunResult, RunFailure> {
    let fail = |e: StageError| RunFailure {
        run_index,
        stage: e.stage,
        message: e.source.to_string(),
    };
    let started = Instant::now();
    let seeds = RunSeeds::new(cfg.seed, run_index);
    let spec = &problem.spec;
    let train = &problem.prepared.train;
    let persist = cfg.out.as_deref().filter(|_| cfg.save_chains);
    let meta = |sampler, mask: Option<&PruneMask>| ChainMeta {
        dataset: problem.dataset.name.clone(),
        spec: *spec,
        sampler,
        split_seed: problem.split_seed,
        train_ratio: problem.train_ratio,
        mask: mask.cloned(),
    };

    let init = initial_params(spec, cfg.init_std, seeds.init);
    let sampler = bnnprune_core::sampler::SamplerConfig {
        seed: seeds.chain,
        ..cfg.sampler
    };
    let chain = sample_chain(spec, train, &sampler, &cfg.prior, &init, None)
        .at(Stage::Train)
        .map_err(fail)?;
    let burn_in = sampler.burn_in_fraction;
    if let Some(out) = persist {
        io::save_chain(&chain_file(out, run_index), &chain, &meta(sampler, None))
            .at(Stage::Export)
            .map_err(fail)?;
    }
    let acceptance_rate = diagnostics::acceptance_rate(&chain).at(Stage::Diagnose).map_err(fail)?;
    let split_rhat = diagnostics::split_psrf(&chain, burn_in).at(Stage::Diagnose).map_err(fail)?;
    let moments = ChainMoments::from_chain(&chain, burn_in).at(Stage::Diagnose).map_err(fail)?;
    let pre_prune = evaluate(problem, &chain, burn_in, cfg.thinning, None)
        .at(Stage::Evaluate)
        .map_err(fail)?;

    let stats = chain_statistics(&chain, burn_in).at(Stage::Prune).map_err(fail)?;
    let mean = chain.posterior_mean(burn_in).at(Stage::Prune).map_err(fail)?;
    let mut outcomes = Vec::new();
    for &method in &cfg.methods {
        for &level in &cfg.levels {
            let mask = build_mask(&stats, method, level, Some(seeds.random_mask))
                .at(Stage::Prune)
                .map_err(fail)?;
            let post_prune = evaluate(problem, &chain, burn_in, cfg.thinning, Some(&mask))
                .at(Stage::Evaluate)
                .map_err(fail)?;
            let start = mask.apply(&mean).at(Stage::Resample).map_err(fail)?;
            let rcfg = cfg.resample_config(seeds.resample(method, level));
            let resampled = resample_chain(spec, train, &rcfg, &cfg.prior, &start, &mask)
                .at(Stage::Resample)
                .map_err(fail)?;
            let post_resample = evaluate(problem, &resampled, rcfg.burn_in_fraction, cfg.thinning, None)
                .at(Stage::Evaluate)
                .map_err(fail)?;
            let resample_acceptance = diagnostics::acceptance_rate(&resampled)
                .at(Stage::Diagnose)
                .map_err(fail)?;
            if let Some(out) = persist {
                io::write_mask(&mask_file(out, run_index, method, level), &mask)
                    .and_then(|_| {
                        io::save_chain(
                            &resample_file(out, run_index, method, level),
                            &resampled,
                            &meta(rcfg, Some(&mask)),
                        )
                    })
                    .at(Stage::Export)
                    .map_err(fail)?;
            }
            outcomes.push(PruneOutcome {
                method,
                level,
                pruned: mask.pruned_count(),
                post_prune,
                post_resample,
                resample_acceptance,
            });
        }
    }
    let seconds = started.elapsed().as_secs_f64();
    log::info!(
        "run {run_index}: {} {:.4} pre-prune, acceptance {:.3}, {:.1}s",
        metric_name(spec.task),
        pre_prune.metric,
        acceptance_rate,
        seconds
    );
    Ok(RunResult {
        run_index,
        pre_prune,
        outcomes,
        acceptance_rate,
        split_rhat,
        moments,
        seconds,
    })
}

pub const STAGES: [&str; 3] = ["pre_prune", "post_prune", "post_resample"];

/// Mean and sample standard deviation per (method, level, stage, metric).
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<ResultRow>,
    pub successful: usize,
    pub failed: usize,
    /// Only one successful run: every std is reported as 0.
    pub single_run: bool,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates successful runs. Runs are ordered by index first, so the
/// result does not depend on the order they finished in.
pub fn aggregate_runs(dataset: &str, task: Task, results: &[RunResult], failed: usize) -> Result<Summary> {
    if results.is_empty() {
        return Err(Error::config(format!("no successful runs ({failed} failed)")));
    }
    let mut runs: Vec<&RunResult> = results.iter().collect();
    runs.sort_by_key(|r| r.run_index);
    let metric = metric_name(task);

    // (method, level) -> stage -> metric -> values, in first-seen order
    let mut keys: Vec<(PruneMethod, u64)> = Vec::new();
    let mut table: BTreeMap<(usize, usize), Vec<(String, Vec<f64>)>> = BTreeMap::new();
    let push = |table: &mut BTreeMap<(usize, usize), Vec<(String, Vec<f64>)>>, branch: usize, stage: usize, name: String, v: f64| {
        let metrics = table.entry((branch, stage)).or_default();
        match metrics.iter_mut().find(|(n, _)| *n == name) {
            Some((_, vals)) => vals.push(v),
            None => metrics.push((name, vec![v])),
        }
    };
    for run in &runs {
        for o in &run.outcomes {
            let key = (o.method, o.level.to_bits());
            let branch = match keys.iter().position(|k| *k == key) {
                Some(b) => b,
                None => {
                    keys.push(key);
                    keys.len() - 1
                }
            };
            for (stage, eval) in [(0, &run.pre_prune), (1, &o.post_prune), (2, &o.post_resample)] {
                push(&mut table, branch, stage, metric.into(), eval.metric);
                for (k, a) in eval.auc.iter().enumerate() {
                    if let Some(a) = a {
                        push(&mut table, branch, stage, format!("auc_class_{k}"), *a);
                    }
                }
            }
            push(&mut table, branch, 0, "acceptance_rate".into(), run.acceptance_rate);
            if run.split_rhat.max_rhat.is_finite() {
                push(&mut table, branch, 0, "split_rhat".into(), run.split_rhat.max_rhat);
            }
            push(&mut table, branch, 1, "pruned_params".into(), o.pruned as f64);
            push(&mut table, branch, 2, "acceptance_rate".into(), o.resample_acceptance);
        }
    }
    let single_run = runs.len() == 1;
    if single_run {
        log::warn!("{dataset}: only one successful run; standard deviations are reported as 0");
    }
    let mut rows = Vec::new();
    for ((branch, stage), metrics) in table {
        let (method, level) = keys[branch];
        for (name, vals) in metrics {
            let (mean, std) = mean_std(&vals);
            rows.push(ResultRow {
                dataset: dataset.to_string(),
                method: method.to_string(),
                level: f64::from_bits(level),
                stage: STAGES[stage].to_string(),
                metric: name,
                mean,
                std,
                n_runs: vals.len(),
            });
        }
    }
    Ok(Summary {
        rows,
        successful: runs.len(),
        failed,
        single_run,
    })
}

/// Everything produced by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: Problem,
    pub results: Vec<RunResult>,
    pub failures: Vec<RunFailure>,
    pub summary: Summary,
}

impl Experiment {
    /// Aggregated value of one results row.
    pub fn lookup(&self, method: PruneMethod, level: f64, stage: &str, metric: &str) -> Option<&ResultRow> {
        self.summary.rows.iter().find(|r| {
            r.method == method.as_str() && r.level == level && r.stage == stage && r.metric == metric
        })
    }
}

/// Runs every configured run (in parallel up to `workers`), aggregates and,
/// when `out` is set, exports.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment, StageError> {
    let problem = load_problem(cfg)?;
    if let Some(out) = &cfg.out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e)).at(Stage::Export)?;
        io::write_file(&out.join("config.txt"), &cfg.to_text()).at(Stage::Export)?;
        let cache = out.join(format!("{}_normalized.csv", problem.dataset.name));
        io::write_dataset_cache(&cache, &problem.prepared, problem.split_seed).at(Stage::Export)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))
        .at(Stage::Config)?;
    let outcomes: Vec<Result<RunResult, RunFailure>> =
        pool.install(|| (0..cfg.runs).into_par_iter().map(|i| run_pipeline(cfg, &problem, i)).collect());
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(f) => {
                log::error!("run {} failed at {}: {}", f.run_index, f.stage, f.message);
                failures.push(f);
            }
        }
    }
    let summary = aggregate_runs(&problem.dataset.name, problem.spec.task, &results, failures.len())
        .map_err(|e| match failures.first() {
            Some(f) => Error::config(format!("{e}; first failure: run {} at {} stage: {}", f.run_index, f.stage, f.message)),
            None => e,
        })
        .at(Stage::Evaluate)?;
    let exp = Experiment {
        problem,
        results,
        failures,
        summary,
    };
    if let Some(out) = &cfg.out {
        export_results(&exp, out).at(Stage::Export)?;
    }
    Ok(exp)
}

/// R̂ across runs from their post-burn-in moments; a single run falls back
/// to its split-R̂.
pub fn cross_run_rhat(results: &[RunResult]) -> Result<PsrfReport> {
    match results {
        [] => Err(Error::config("no runs for R-hat")),
        [one] => Ok(one.split_rhat.clone()),
        many => {
            let moments: Vec<ChainMoments> = many.iter().map(|r| r.moments.clone()).collect();
            Ok(diagnostics::psrf_from_moments(&moments)?)
        }
    }
}

/// Writes `results.csv`, `rhat.csv`, ROC curves (`roc_class_k.csv` for the
/// unpruned posterior, `roc_{method}_{level}_class_k.csv` after
/// resampling, both from the lowest-index successful run), `timing.csv`
/// and `failures.csv` when runs failed.
pub fn export_results(exp: &Experiment, out: &Path) -> Result<()> {
    io::write_file(&out.join("results.csv"), &io::results_to_csv(&exp.summary.rows))?;
    io::write_file(&out.join("rhat.csv"), &cross_run_rhat(&exp.results)?.to_csv())?;

    let mut runs: Vec<&RunResult> = exp.results.iter().collect();
    runs.sort_by_key(|r| r.run_index);
    if let Some(first) = runs.first() {
        for curve in first.pre_prune.roc.iter().flatten() {
            let k = curve.class_index;
            io::write_file(&out.join(format!("roc_class_{k}.csv")), &io::roc_to_csv(curve, k))?;
        }
        for o in &first.outcomes {
            for curve in o.post_resample.roc.iter().flatten() {
                let k = curve.class_index;
                let name = format!("roc_{}_{}_class_{k}.csv", o.method, level_tag(o.level));
                io::write_file(&out.join(name), &io::roc_to_csv(curve, k))?;
            }
        }
    }

    let mut timing = String::from("run,seconds\n");
    for r in &runs {
        timing.push_str(&format!("{},{:.3}\n", r.run_index, r.seconds));
    }
    io::write_file(&out.join("timing.csv"), &timing)?;

    if !exp.failures.is_empty() {
        let mut s = String::from("run,stage,message\n");
        let mut failures = exp.failures.clone();
        failures.sort_by_key(|f| f.run_index);
        for f in failures {
            s.push_str(&format!("{},{},\"{}\"\n", f.run_index, f.stage, f.message.replace('"', "'")));
        }
        io::write_file(&out.join("failures.csv"), &s)?;
    }
    Ok(())
}
