//! Plain-text `key = value` experiment configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use bnnprune_core::posterior::PriorConfig;
use bnnprune_core::pruning::PruneMethod;
use bnnprune_core::sampler::SamplerConfig;
use bnnprune_core::Task;

use crate::datasets::{self, ColumnRef, DatasetSpec, Schema};
use crate::error::{Error, Result};
use crate::io;

/// Dataset-related keys as given; resolved into a [`DatasetSpec`] once all
/// keys are known so their order does not matter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetOptions {
    /// Built-in name or path to a CSV file.
    pub dataset: Option<String>,
    /// File for a built-in descriptor, replacing the default location.
    pub csv: Option<PathBuf>,
    pub header: Option<bool>,
    pub features: Option<Vec<ColumnRef>>,
    pub target: Option<ColumnRef>,
    pub drop: Option<Vec<ColumnRef>>,
    pub categorical: Option<Vec<ColumnRef>>,
    pub task: Option<Task>,
    pub bins: Option<Vec<f64>>,
    pub series: Option<ColumnRef>,
    pub window: Option<usize>,
    pub horizon: Option<usize>,
    pub hidden: Option<usize>,
    pub ordered: Option<bool>,
}

impl DatasetOptions {
    pub fn resolve(&self) -> Result<DatasetSpec> {
        let name = self
            .dataset
            .as_deref()
            .ok_or_else(|| Error::config("no dataset given (use `dataset = <name|file.csv>`)"))?;
        let mut spec = match datasets::builtin(name, &datasets::data_dir()) {
            Some(spec) => spec,
            None => self.generic(name)?,
        };
        if let Some(p) = &self.csv {
            spec.path = p.clone();
        }
        if self.header.is_some() {
            spec.header = self.header;
        }
        if let Some(h) = self.hidden {
            spec.hidden = h;
        }
        if let Some(o) = self.ordered {
            spec.ordered = o;
        }
        match &mut spec.schema {
            Schema::Table {
                features,
                drop,
                categorical,
                target,
                task,
                bins,
            } => {
                if let Some(f) = &self.features {
                    *features = Some(f.clone());
                }
                if let Some(d) = &self.drop {
                    *drop = d.clone();
                }
                if let Some(c) = &self.categorical {
                    *categorical = c.clone();
                }
                if let Some(t) = &self.target {
                    *target = t.clone();
                }
                if let Some(t) = self.task {
                    *task = t;
                }
                if let Some(b) = &self.bins {
                    *bins = Some(b.clone());
                }
            }
            Schema::Series {
                column,
                window,
                horizon,
            } => {
                if let Some(c) = &self.series {
                    *column = c.clone();
                }
                if let Some(w) = self.window {
                    *window = w;
                }
                if let Some(h) = self.horizon {
                    *horizon = h;
                }
            }
        }
        if spec.hidden == 0 {
            return Err(Error::config("hidden must be at least 1"));
        }
        Ok(spec)
    }

    fn generic(&self, path: &str) -> Result<DatasetSpec> {
        let path = PathBuf::from(path);
        if path.extension().is_none() && !path.exists() {
            return Err(Error::config(format!(
                "unknown dataset {:?}; built-ins are {}",
                path.display(),
                datasets::BUILTIN_NAMES.join(", ")
            )));
        }
        let hidden = self
            .hidden
            .ok_or_else(|| Error::config("a CSV dataset needs `hidden = <units>`"))?;
        let name = path
            .file_stem()
            .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
        let (schema, ordered) = match &self.series {
            Some(column) => (
                Schema::Series {
                    column: column.clone(),
                    window: self.window.unwrap_or(4),
                    horizon: self.horizon.unwrap_or(1),
                },
                true,
            ),
            None => (
                Schema::Table {
                    features: None,
                    drop: Vec::new(),
                    categorical: Vec::new(),
                    target: ColumnRef::Last,
                    task: Task::Classification,
                    bins: None,
                },
                false,
            ),
        };
        Ok(DatasetSpec {
            name,
            path,
            header: None,
            schema,
            hidden,
            ordered,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DatasetOptions,
    pub train_ratio: f64,
    /// Seed of the train/test split; defaults to `seed`.
    pub split_seed: Option<u64>,
    /// Sampler settings; the seed field is replaced per run.
    pub sampler: SamplerConfig,
    pub prior: PriorConfig,
    pub methods: Vec<PruneMethod>,
    pub levels: Vec<f64>,
    pub resample_length: usize,
    pub runs: usize,
    pub seed: u64,
    pub workers: usize,
    pub thinning: usize,
    pub init_std: f64,
    pub out: Option<PathBuf>,
    pub save_chains: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: DatasetOptions::default(),
            train_ratio: 0.6,
            split_seed: None,
            sampler: SamplerConfig::default(),
            prior: PriorConfig::default(),
            methods: PruneMethod::ALL.to_vec(),
            levels: vec![0.25, 0.5, 0.75],
            resample_length: 1000,
            runs: 30,
            seed: 0,
            workers: 1,
            thinning: 10,
            init_std: 0.5,
            out: None,
            save_chains: true,
        }
    }
}

pub const KEYS: [&str; 35] = [
    "dataset",
    "csv",
    "header",
    "features",
    "target",
    "drop",
    "categorical",
    "task",
    "bins",
    "series",
    "window",
    "horizon",
    "hidden",
    "ordered",
    "train_ratio",
    "split_seed",
    "samples",
    "burn_in",
    "step_size",
    "proposal_std",
    "tau_proposal_std",
    "langevin_probability",
    "sigma_sq",
    "nu1",
    "nu2",
    "methods",
    "levels",
    "resample_length",
    "runs",
    "seed",
    "workers",
    "thinning",
    "init_std",
    "out",
    "save_chains",
];

fn value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse {v:?}")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(key, s))
        .collect()
}

fn columns(v: &str) -> Result<Vec<ColumnRef>> {
    v.split(',').map(str::parse).collect()
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let d = &mut self.data;
        let s = &mut self.sampler;
        match key {
            "dataset" => d.dataset = Some(v.to_string()),
            "csv" => d.csv = Some(PathBuf::from(v)),
            "header" => d.header = Some(boolean(key, v)?),
            "features" => d.features = Some(columns(v)?),
            "target" => d.target = Some(v.parse()?),
            "drop" => d.drop = Some(columns(v)?),
            "categorical" => d.categorical = Some(columns(v)?),
            "task" => {
                d.task = Some(io::parse_task(v).ok_or_else(|| {
                    Error::config(format!("task: expected regression or classification, got {v:?}"))
                })?)
            }
            "bins" => d.bins = Some(list(key, v)?),
            "series" => d.series = Some(v.parse()?),
            "window" => d.window = Some(value(key, v)?),
            "horizon" => d.horizon = Some(value(key, v)?),
            "hidden" => d.hidden = Some(value(key, v)?),
            "ordered" => d.ordered = Some(boolean(key, v)?),
            "train_ratio" => self.train_ratio = value(key, v)?,
            "split_seed" => self.split_seed = Some(value(key, v)?),
            "samples" => s.max_samples = value(key, v)?,
            "burn_in" => s.burn_in_fraction = value(key, v)?,
            "step_size" => s.step_size = value(key, v)?,
            "proposal_std" => s.proposal_std = value(key, v)?,
            "tau_proposal_std" => s.tau_proposal_std = value(key, v)?,
            "langevin_probability" => s.langevin_probability = value(key, v)?,
            "sigma_sq" => self.prior.sigma_sq = value(key, v)?,
            "nu1" => self.prior.nu1 = value(key, v)?,
            "nu2" => self.prior.nu2 = value(key, v)?,
            "methods" => self.methods = list(key, v)?,
            "levels" => self.levels = list(key, v)?,
            "resample_length" => self.resample_length = value(key, v)?,
            "runs" => self.runs = value(key, v)?,
            "seed" => self.seed = value(key, v)?,
            "workers" => self.workers = value(key, v)?,
            "thinning" => self.thinning = value(key, v)?,
            "init_std" => self.init_std = value(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "save_chains" => self.save_chains = boolean(key, v)?,
            _ => return Err(Error::config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (line, k, v) in io::parse_key_values(text, path)? {
            cfg.set(&k, &v).map_err(|e| Error::Format {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_file(path)?, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        self.prior.validate()?;
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.resample_length == 0 {
            return Err(Error::config("resample_length must be at least 1"));
        }
        if self.thinning == 0 {
            return Err(Error::config("thinning must be at least 1"));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(Error::config("train_ratio must be in (0, 1)"));
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return Err(Error::config("init_std must be non-negative"));
        }
        if let Some(l) = self.levels.iter().find(|l| !(0.0..1.0).contains(*l)) {
            return Err(Error::config(format!("pruning level {l} not in [0, 1)")));
        }
        Ok(())
    }

    /// Settings for the post-prune resampling chain of one run.
    pub fn resample_config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            max_samples: self.resample_length,
            ..self.sampler.resample(seed)
        }
    }

    /// Seed of the train/test split.
    pub fn split_seed(&self) -> u64 {
        self.split_seed.unwrap_or(self.seed)
    }

    /// `key = value` text that parses back into this configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let d = &self.data;
        let cols = |c: &[ColumnRef]| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let nums = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if let Some(v) = &d.dataset {
            put("dataset", v.clone());
        }
        if let Some(v) = &d.csv {
            put("csv", v.display().to_string());
        }
        if let Some(v) = d.header {
            put("header", v.to_string());
        }
        if let Some(v) = &d.features {
            put("features", cols(v));
        }
        if let Some(v) = &d.target {
            put("target", v.to_string());
        }
        if let Some(v) = &d.drop {
            put("drop", cols(v));
        }
        if let Some(v) = &d.categorical {
            put("categorical", cols(v));
        }
        if let Some(v) = d.task {
            put("task", io::task_name(v).into());
        }
        if let Some(v) = &d.bins {
            put("bins", nums(v));
        }
        if let Some(v) = &d.series {
            put("series", v.to_string());
        }
        if let Some(v) = d.window {
            put("window", v.to_string());
        }
        if let Some(v) = d.horizon {
            put("horizon", v.to_string());
        }
        if let Some(v) = d.hidden {
            put("hidden", v.to_string());
        }
        if let Some(v) = d.ordered {
            put("ordered", v.to_string());
        }
        put("train_ratio", self.train_ratio.to_string());
        if let Some(v) = self.split_seed {
            put("split_seed", v.to_string());
        }
        let s = &self.sampler;
        put("samples", s.max_samples.to_string());
        put("burn_in", s.burn_in_fraction.to_string());
        put("step_size", s.step_size.to_string());
        put("proposal_std", s.proposal_std.to_string());
        put("tau_proposal_std", s.tau_proposal_std.to_string());
        put("langevin_probability", s.langevin_probability.to_string());
        put("sigma_sq", self.prior.sigma_sq.to_string());
        put("nu1", self.prior.nu1.to_string());
        put("nu2", self.prior.nu2.to_string());
        put(
            "methods",
            self.methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(","),
        );
        put("levels", nums(&self.levels));
        put("resample_length", self.resample_length.to_string());
        put("runs", self.runs.to_string());
        put("seed", self.seed.to_string());
        put("workers", self.workers.to_string());
        put("thinning", self.thinning.to_string());
        put("init_std", self.init_std.to_string());
        if let Some(v) = &self.out {
            put("out", v.display().to_string());
        }
        put("save_chains", self.save_chains.to_string());
        out
    }
}
