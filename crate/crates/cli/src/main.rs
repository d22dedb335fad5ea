use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bnnprune::config::ExperimentConfig;
use bnnprune::error::{AtStage, Error, Stage, StageError};
use bnnprune::experiment::{self, chain_file, initial_params, load_problem, metric_name, Problem, RunSeeds};
use bnnprune::io::{self, ChainMeta};
use bnnprune_core::diagnostics;
use bnnprune_core::pruning::{build_mask, chain_statistics, PruneMethod};
use bnnprune_core::sampler::{resample_chain, sample_chain, Chain, SamplerConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bnnprune", version, about = "Train, prune and resample Bayesian neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in dataset name or path to a CSV file
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// Pruning method: stn, spn or rnd
    #[arg(long, global = true)]
    method: Option<PruneMethod>,
    /// Fraction of parameters to prune, in [0, 1)
    #[arg(long, global = true)]
    level: Option<f64>,
    /// Chain length
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the posterior and save the chain
    Train,
    /// Build a pruning mask from a saved chain
    Prune {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Resample a pruned network starting from the masked posterior mean
    Resample {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        mask: PathBuf,
    },
    /// Test-set metrics of a saved chain, optionally with a mask applied
    Evaluate {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// R-hat, acceptance rate and trace export for saved chains
    Diagnose {
        /// One or more chains; several give a between-chain R-hat
        #[arg(long, required = true, num_args = 1..)]
        chain: Vec<PathBuf>,
        /// Parameter columns to export as a trace
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
    },
    /// Full pipeline over many runs with aggregation and export
    Experiment,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bnnprune: {e}");
            let mut src = std::error::Error::source(&e.source);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(if e.stage == Stage::Config { 2 } else { 1 })
        }
    }
}

fn config(common: &Common) -> Result<ExperimentConfig, StageError> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p).at(Stage::Config)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &common.dataset {
        cfg.data.dataset = Some(d.clone());
    }
    if let Some(m) = common.method {
        cfg.methods = vec![m];
    }
    if let Some(l) = common.level {
        cfg.levels = vec![l];
    }
    if let Some(s) = common.samples {
        cfg.sampler.max_samples = s;
    }
    if let Some(r) = common.runs {
        cfg.runs = r;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate().at(Stage::Config)?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Problem a saved chain was sampled on: data settings from the config,
/// split from the chain's sidecar.
fn problem_for(cfg: &ExperimentConfig, meta: &ChainMeta) -> Result<Problem, StageError> {
    let mut cfg = cfg.clone();
    if cfg.data.dataset.is_none() {
        cfg.data.dataset = Some(meta.dataset.clone());
    }
    cfg.split_seed = Some(meta.split_seed);
    cfg.train_ratio = meta.train_ratio;
    let problem = load_problem(&cfg)?;
    if problem.spec != meta.spec {
        return Err(Error::config(format!(
            "chain was sampled for a {}-{}-{} network but the dataset gives {}-{}-{}",
            meta.spec.input_size,
            meta.spec.hidden_size,
            meta.spec.output_size,
            problem.spec.input_size,
            problem.spec.hidden_size,
            problem.spec.output_size
        )))
        .at(Stage::Config);
    }
    Ok(problem)
}

fn report(problem: &Problem, label: &str, chain: &Chain, burn_in: f64, thinning: usize, mask: Option<&bnnprune_core::pruning::PruneMask>) -> Result<experiment::Evaluation, StageError> {
    let eval = experiment::evaluate(problem, chain, burn_in, thinning, mask).at(Stage::Evaluate)?;
    println!("{label} {} = {}", metric_name(problem.spec.task), eval.metric);
    for (k, a) in eval.auc.iter().enumerate() {
        match a {
            Some(a) => println!("{label} auc_class_{k} = {a}"),
            None => println!("{label} auc_class_{k} = n/a (class absent from test set)"),
        }
    }
    Ok(eval)
}

fn run(cli: Cli) -> Result<(), StageError> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::Train => {
            let problem = load_problem(&cfg)?;
            let out = out_dir(&cfg);
            let seeds = RunSeeds::new(cfg.seed, 0);
            let sampler = SamplerConfig {
                seed: seeds.chain,
                ..cfg.sampler
            };
            let init = initial_params(&problem.spec, cfg.init_std, seeds.init);
            let chain = sample_chain(&problem.spec, &problem.prepared.train, &sampler, &cfg.prior, &init, None)
                .at(Stage::Train)?;
            let meta = ChainMeta {
                dataset: problem.dataset.name.clone(),
                spec: problem.spec,
                sampler,
                split_seed: problem.split_seed,
                train_ratio: problem.train_ratio,
                mask: None,
            };
            let path = chain_file(&out, 0);
            io::save_chain(&path, &chain, &meta).at(Stage::Export)?;
            let cache = out.join(format!("{}_normalized.csv", problem.dataset.name));
            io::write_dataset_cache(&cache, &problem.prepared, problem.split_seed).at(Stage::Export)?;
            println!("chain = {}", path.display());
            println!("acceptance_rate = {}", diagnostics::acceptance_rate(&chain).at(Stage::Diagnose)?);
            let rhat = diagnostics::split_psrf(&chain, sampler.burn_in_fraction).at(Stage::Diagnose)?;
            println!("split_rhat_max = {}", rhat.max_rhat);
            report(&problem, "pre_prune", &chain, sampler.burn_in_fraction, cfg.thinning, None)?;
        }
        Command::Prune { chain } => {
            let (chain, meta) = io::load_chain(&chain).at(Stage::Data)?;
            let method = cli.common.method.unwrap_or(cfg.methods[0]);
            let level = cli.common.level.or(cfg.levels.first().copied()).unwrap_or(0.25);
            let burn_in = meta.sampler.burn_in_fraction;
            let stats = chain_statistics(&chain, burn_in).at(Stage::Prune)?;
            let seed = RunSeeds::new(cfg.seed, 0).random_mask;
            let mask = build_mask(&stats, method, level, Some(seed)).at(Stage::Prune)?;
            let path = out_dir(&cfg).join(format!("mask_{method}_{level}.txt"));
            io::write_mask(&path, &mask).at(Stage::Export)?;
            println!("mask = {}", path.display());
            println!("pruned = {} of {}", mask.pruned_count(), mask.len());
        }
        Command::Resample { chain, mask } => {
            let (chain, meta) = io::load_chain(&chain).at(Stage::Data)?;
            let mask = io::read_mask(&mask).at(Stage::Data)?;
            let problem = problem_for(&cfg, &meta)?;
            let start = chain
                .posterior_mean(meta.sampler.burn_in_fraction)
                .and_then(|m| mask.apply(&m))
                .at(Stage::Resample)?;
            let seeds = RunSeeds::new(cfg.seed, 0);
            let rcfg = cfg.resample_config(seeds.resample(mask.method, mask.level));
            let resampled = resample_chain(&problem.spec, &problem.prepared.train, &rcfg, &cfg.prior, &start, &mask)
                .at(Stage::Resample)?;
            let path = out_dir(&cfg).join(format!("resample_{}_{}.csv", mask.method, mask.level));
            let meta = ChainMeta {
                sampler: rcfg,
                mask: Some(mask),
                ..meta
            };
            io::save_chain(&path, &resampled, &meta).at(Stage::Export)?;
            println!("chain = {}", path.display());
            report(&problem, "post_resample", &resampled, 0.0, cfg.thinning, None)?;
        }
        Command::Evaluate { chain, mask } => {
            let (chain, meta) = io::load_chain(&chain).at(Stage::Data)?;
            let mask = mask.as_deref().map(io::read_mask).transpose().at(Stage::Data)?;
            let problem = problem_for(&cfg, &meta)?;
            let label = if mask.is_some() { "post_prune" } else { "evaluate" };
            let eval = report(&problem, label, &chain, meta.sampler.burn_in_fraction, cfg.thinning, mask.as_ref())?;
            if let Some(out) = &cfg.out {
                for curve in eval.roc.iter().flatten() {
                    let k = curve.class_index;
                    io::write_file(&out.join(format!("roc_class_{k}.csv")), &io::roc_to_csv(curve, k))
                        .at(Stage::Export)?;
                }
            }
        }
        Command::Diagnose { chain, params } => diagnose(&cfg, &chain, &params)?,
        Command::Experiment => {
            let exp = experiment::run_experiment(&cfg)?;
            print!("{}", io::results_to_csv(&exp.summary.rows));
            if !exp.failures.is_empty() {
                eprintln!("{} of {} runs failed", exp.failures.len(), cfg.runs);
            }
        }
    }
    Ok(())
}

fn diagnose(cfg: &ExperimentConfig, paths: &[PathBuf], params: &[usize]) -> Result<(), StageError> {
    let mut chains = Vec::new();
    for p in paths {
        chains.push(io::load_chain(p).at(Stage::Data)?);
    }
    let burn_in = chains[0].1.sampler.burn_in_fraction;
    let refs: Vec<&Chain> = chains.iter().map(|(c, _)| c).collect();
    let report = if refs.len() == 1 {
        diagnostics::split_psrf(refs[0], burn_in)
    } else {
        diagnostics::psrf(&refs, burn_in)
    }
    .at(Stage::Diagnose)?;
    let out = out_dir(cfg);
    io::write_file(&out.join("rhat.csv"), &report.to_csv()).at(Stage::Export)?;
    println!("{}", diagnostics::describe(&report));
    for (p, c) in paths.iter().zip(&refs) {
        println!(
            "{}: acceptance_rate = {}",
            p.display(),
            diagnostics::acceptance_rate(c).at(Stage::Diagnose)?
        );
    }
    if !params.is_empty() {
        for (i, c) in refs.iter().enumerate() {
            let name = trace_name(&paths[i]);
            let csv = diagnostics::export_trace(c, params).at(Stage::Diagnose)?;
            io::write_file(&out.join(name), &csv).at(Stage::Export)?;
        }
    }
    Ok(())
}

fn trace_name(chain: &Path) -> String {
    let stem = chain.file_stem().map_or_else(|| "chain".into(), |s| s.to_string_lossy().into_owned());
    format!("trace_{stem}.csv")
}
