//! On-disk formats: chains, masks, metadata sidecars, the normalized
//! dataset cache, ROC curves and the results table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bnnprune_core::data::{Prepared, Targets};
use bnnprune_core::metrics::RocCurve;
use bnnprune_core::pruning::{PruneMask, PruneMethod};
use bnnprune_core::sampler::{Chain, SamplerConfig};
use bnnprune_core::{ModelSpec, Task};

use crate::error::{Error, Result};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// `key = value` lines; blank lines and `#` comments are skipped. A `#`
/// after whitespace also ends a line, so paths may still contain `#`.
/// Returns `(line number, key, value)` in file order.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw
            .match_indices('#')
            .find(|(j, _)| *j == 0 || raw[..*j].ends_with(char::is_whitespace))
            .map_or(raw, |(j, _)| &raw[..j])
            .trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected `key = value`, got {line:?}"),
            });
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

// ---- chains ---------------------------------------------------------------

pub fn chain_header(chain: &Chain) -> String {
    let mut h: Vec<String> = (0..chain.num_params()).map(|i| format!("p{i}")).collect();
    if chain.has_noise() {
        h.push("log_tau_sq".into());
    }
    h.push("loglik".into());
    h.push("accepted".into());
    h.join(",")
}

/// `p0,...,p{T-1}[,log_tau_sq],loglik,accepted`, one row per stored sample.
/// Values use the shortest representation that parses back exactly.
pub fn chain_to_csv(chain: &Chain) -> String {
    let mut s = chain_header(chain);
    s.push('\n');
    for i in 0..chain.len() {
        for v in chain.row(i) {
            let _ = write!(s, "{v},");
        }
        let _ = writeln!(
            s,
            "{},{}",
            chain.log_likelihoods()[i],
            u8::from(chain.accepted()[i])
        );
    }
    s
}

pub fn write_chain(path: &Path, chain: &Chain) -> Result<()> {
    write_file(path, &chain_to_csv(chain))
}

/// Reads a chain CSV. Sampler settings and mask live in the sidecar; pass
/// them in if known.
pub fn read_chain(path: &Path, config: SamplerConfig, mask: Option<PruneMask>) -> Result<Chain> {
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| format_err(path, 1, "empty chain file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let n = cols.len();
    if n < 3 || cols[n - 2] != "loglik" || cols[n - 1] != "accepted" {
        return Err(format_err(path, 1, "header must end with loglik,accepted"));
    }
    let has_noise = cols[n - 3] == "log_tau_sq";
    let num_params = n - 2 - usize::from(has_noise);
    for (i, c) in cols[..num_params].iter().enumerate() {
        if *c != format!("p{i}") {
            return Err(format_err(path, 1, format!("expected column p{i}, found {c:?}")));
        }
    }
    let width = num_params + usize::from(has_noise);
    let mut samples = Vec::new();
    let mut loglik = Vec::new();
    let mut accepted = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n {
            return Err(format_err(path, i + 1, format!("expected {n} fields, found {}", cells.len())));
        }
        for (j, c) in cells[..width].iter().enumerate() {
            samples.push(
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| format_err(path, i + 1, format!("column {}: bad number {c:?}", cols[j])))?,
            );
        }
        loglik.push(
            cells[width]
                .trim()
                .parse::<f64>()
                .map_err(|_| format_err(path, i + 1, "bad loglik"))?,
        );
        accepted.push(match cells[width + 1].trim() {
            "1" => true,
            "0" => false,
            other => return Err(format_err(path, i + 1, format!("accepted must be 0 or 1, found {other:?}"))),
        });
    }
    Ok(Chain::from_parts(num_params, has_noise, samples, loglik, accepted, mask, config)?)
}

/// What the chain sidecar records.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMeta {
    pub dataset: String,
    pub spec: ModelSpec,
    pub sampler: SamplerConfig,
    /// Seed of the train/test split the chain was sampled on.
    pub split_seed: u64,
    pub train_ratio: f64,
    pub mask: Option<PruneMask>,
}

pub fn meta_path(chain_path: &Path) -> PathBuf {
    chain_path.with_extension("meta")
}

pub fn chain_meta_to_string(m: &ChainMeta) -> String {
    let s = &m.sampler;
    let mut out = String::new();
    let _ = writeln!(out, "dataset = {}", m.dataset);
    let _ = writeln!(out, "task = {}", task_name(m.spec.task));
    let _ = writeln!(out, "input_size = {}", m.spec.input_size);
    let _ = writeln!(out, "hidden_size = {}", m.spec.hidden_size);
    let _ = writeln!(out, "output_size = {}", m.spec.output_size);
    let _ = writeln!(out, "split_seed = {}", m.split_seed);
    let _ = writeln!(out, "train_ratio = {}", m.train_ratio);
    let _ = writeln!(out, "samples = {}", s.max_samples);
    let _ = writeln!(out, "burn_in = {}", s.burn_in_fraction);
    let _ = writeln!(out, "step_size = {}", s.step_size);
    let _ = writeln!(out, "proposal_std = {}", s.proposal_std);
    let _ = writeln!(out, "tau_proposal_std = {}", s.tau_proposal_std);
    let _ = writeln!(out, "langevin_probability = {}", s.langevin_probability);
    let _ = writeln!(out, "seed = {}", s.seed);
    match &m.mask {
        None => {
            let _ = writeln!(out, "mask = none");
        }
        Some(mask) => {
            let _ = writeln!(out, "mask_method = {}", mask.method);
            let _ = writeln!(out, "mask_level = {}", mask.level);
            let _ = writeln!(out, "mask_seed = {}", opt_seed(mask.seed));
            let pruned: Vec<String> = mask.pruned_indices().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "mask = {}", pruned.join(" "));
        }
    }
    out
}

pub fn read_chain_meta(path: &Path) -> Result<ChainMeta> {
    let text = read_file(path)?;
    let kv: BTreeMap<String, (usize, String)> = parse_key_values(&text, path)?
        .into_iter()
        .map(|(l, k, v)| (k, (l, v)))
        .collect();
    let get = |k: &str| -> Result<&str> {
        kv.get(k)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format_err(path, 0, format!("missing key {k}")))
    };
    fn parse<T: std::str::FromStr>(path: &Path, kv: &BTreeMap<String, (usize, String)>, k: &str) -> Result<T> {
        let (line, v) = kv
            .get(k)
            .ok_or_else(|| format_err(path, 0, format!("missing key {k}")))?;
        v.parse()
            .map_err(|_| format_err(path, *line, format!("bad value for {k}: {v:?}")))
    }
    let task = parse_task(get("task")?).ok_or_else(|| format_err(path, 0, "bad task"))?;
    let spec = ModelSpec::new(
        parse(path, &kv, "input_size")?,
        parse(path, &kv, "hidden_size")?,
        parse(path, &kv, "output_size")?,
        task,
    )?;
    let sampler = SamplerConfig {
        max_samples: parse(path, &kv, "samples")?,
        burn_in_fraction: parse(path, &kv, "burn_in")?,
        step_size: parse(path, &kv, "step_size")?,
        proposal_std: parse(path, &kv, "proposal_std")?,
        tau_proposal_std: parse(path, &kv, "tau_proposal_std")?,
        langevin_probability: parse(path, &kv, "langevin_probability")?,
        seed: parse(path, &kv, "seed")?,
    };
    let mask = match get("mask")? {
        "none" => None,
        list => {
            let mut keep = vec![true; spec.num_params()];
            for tok in list.split_whitespace() {
                let i: usize = tok
                    .parse()
                    .map_err(|_| format_err(path, 0, format!("bad mask index {tok:?}")))?;
                *keep
                    .get_mut(i)
                    .ok_or_else(|| format_err(path, 0, format!("mask index {i} out of range")))? = false;
            }
            let method: PruneMethod = get("mask_method")?.parse()?;
            Some(PruneMask::from_keep(
                keep,
                method,
                parse(path, &kv, "mask_level")?,
                parse_opt_seed(get("mask_seed")?).ok_or_else(|| format_err(path, 0, "bad mask_seed"))?,
            ))
        }
    };
    Ok(ChainMeta {
        dataset: get("dataset")?.to_string(),
        spec,
        sampler,
        split_seed: parse(path, &kv, "split_seed")?,
        train_ratio: parse(path, &kv, "train_ratio")?,
        mask,
    })
}

/// Chain CSV plus its `.meta` sidecar.
pub fn save_chain(path: &Path, chain: &Chain, meta: &ChainMeta) -> Result<()> {
    write_chain(path, chain)?;
    write_file(&meta_path(path), &chain_meta_to_string(meta))
}

/// Chain CSV and sidecar written by [`save_chain`].
pub fn load_chain(path: &Path) -> Result<(Chain, ChainMeta)> {
    let meta = read_chain_meta(&meta_path(path))?;
    let chain = read_chain(path, meta.sampler, meta.mask.clone())?;
    if chain.num_params() != meta.spec.num_params() {
        return Err(Error::config(format!(
            "{}: chain has {} parameters but the sidecar describes {}",
            path.display(),
            chain.num_params(),
            meta.spec.num_params()
        )));
    }
    Ok((chain, meta))
}

pub fn task_name(task: Task) -> &'static str {
    match task {
        Task::Regression => "regression",
        Task::Classification => "classification",
    }
}

pub fn parse_task(s: &str) -> Option<Task> {
    match s.trim().to_ascii_lowercase().as_str() {
        "regression" => Some(Task::Regression),
        "classification" => Some(Task::Classification),
        _ => None,
    }
}

fn opt_seed(seed: Option<u64>) -> String {
    seed.map_or_else(|| "none".into(), |s| s.to_string())
}

fn parse_opt_seed(s: &str) -> Option<Option<u64>> {
    match s {
        "none" => Some(None),
        v => v.parse().ok().map(Some),
    }
}

// ---- masks ----------------------------------------------------------------

/// Header lines `# method = ...`, `# level = ...`, `# seed = ...`, then
/// `index,keep` pairs.
pub fn mask_to_string(mask: &PruneMask) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# method = {}", mask.method);
    let _ = writeln!(s, "# level = {}", mask.level);
    let _ = writeln!(s, "# seed = {}", opt_seed(mask.seed));
    s.push_str("index,keep\n");
    for (i, k) in mask.keep().iter().enumerate() {
        let _ = writeln!(s, "{i},{}", u8::from(*k));
    }
    s
}

pub fn write_mask(path: &Path, mask: &PruneMask) -> Result<()> {
    write_file(path, &mask_to_string(mask))
}

pub fn read_mask(path: &Path) -> Result<PruneMask> {
    let text = read_file(path)?;
    let mut method = None;
    let mut level = None;
    let mut seed = None;
    let mut keep = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = i + 1;
        if line.is_empty() || line == "index,keep" {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let Some((k, v)) = h.split_once('=') else { continue };
            let v = v.trim();
            match k.trim() {
                "method" => method = Some(v.parse::<PruneMethod>().map_err(|e| format_err(path, n, e.to_string()))?),
                "level" => level = Some(v.parse::<f64>().map_err(|_| format_err(path, n, "bad level"))?),
                "seed" => seed = Some(parse_opt_seed(v).ok_or_else(|| format_err(path, n, "bad seed"))?),
                _ => {}
            }
            continue;
        }
        let (idx, k) = line
            .split_once(',')
            .ok_or_else(|| format_err(path, n, "expected index,keep"))?;
        let idx: usize = idx.trim().parse().map_err(|_| format_err(path, n, "bad index"))?;
        if idx != keep.len() {
            return Err(format_err(path, n, format!("expected index {}, found {idx}", keep.len())));
        }
        keep.push(match k.trim() {
            "1" => true,
            "0" => false,
            other => return Err(format_err(path, n, format!("keep must be 0 or 1, found {other:?}"))),
        });
    }
    let method = method.ok_or_else(|| format_err(path, 0, "missing method header"))?;
    let level = level.ok_or_else(|| format_err(path, 0, "missing level header"))?;
    Ok(PruneMask::from_keep(keep, method, level, seed.flatten()))
}

// ---- normalized dataset cache ---------------------------------------------

/// Normalized rows of both splits with a `split` column, and a sidecar with
/// the scaler so predictions can be mapped back to original units.
pub fn write_dataset_cache(path: &Path, prepared: &Prepared, split_seed: u64) -> Result<()> {
    let train = &prepared.train;
    let mut s = String::new();
    let mut header: Vec<String> = train.feature_names.clone();
    match &train.targets {
        Targets::Real(m) => header.extend((0..m.cols()).map(|j| format!("target{j}"))),
        Targets::Labels { .. } => header.push("label".into()),
    }
    header.push("split".into());
    s.push_str(&header.join(","));
    s.push('\n');
    for (name, d) in [("train", &prepared.train), ("test", &prepared.test)] {
        for i in 0..d.len() {
            for v in d.features.row(i) {
                let _ = write!(s, "{v},");
            }
            match &d.targets {
                Targets::Real(m) => {
                    for v in m.row(i) {
                        let _ = write!(s, "{v},");
                    }
                }
                Targets::Labels { labels, .. } => {
                    let _ = write!(s, "{},", labels[i]);
                }
            }
            let _ = writeln!(s, "{name}");
        }
    }
    write_file(path, &s)?;

    let sc = &prepared.scaler;
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let idx = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut m = String::new();
    let _ = writeln!(m, "dataset = {}", train.name);
    let _ = writeln!(m, "task = {}", task_name(train.task()));
    let _ = writeln!(m, "features = {}", train.feature_names.join(" "));
    let _ = writeln!(m, "output_size = {}", train.output_size());
    if !train.class_names.is_empty() {
        let _ = writeln!(m, "classes = {}", train.class_names.join(" "));
    }
    let _ = writeln!(m, "split_seed = {split_seed}");
    let _ = writeln!(m, "train_rows = {}", prepared.train.len());
    let _ = writeln!(m, "test_rows = {}", prepared.test.len());
    let _ = writeln!(m, "train_index = {}", idx(&prepared.split.train));
    let _ = writeln!(m, "test_index = {}", idx(&prepared.split.test));
    let _ = writeln!(m, "feature_min = {}", join(&sc.feature_min));
    let _ = writeln!(m, "feature_max = {}", join(&sc.feature_max));
    if !sc.target_min.is_empty() {
        let _ = writeln!(m, "target_min = {}", join(&sc.target_min));
        let _ = writeln!(m, "target_max = {}", join(&sc.target_max));
    }
    write_file(&path.with_extension("meta"), &m)
}

// ---- ROC / results ----------------------------------------------------------

pub fn roc_to_csv(curve: &RocCurve, class: usize) -> String {
    let mut s = String::from("class,fpr,tpr\n");
    for (f, t) in &curve.points {
        let _ = writeln!(s, "{class},{f},{t}");
    }
    s
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub method: String,
    pub level: f64,
    pub stage: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n_runs: usize,
}

pub const RESULTS_HEADER: &str = "dataset,method,level,stage,metric,mean,std,n_runs";

pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.dataset, r.method, r.level, r.stage, r.metric, r.mean, r.std, r.n_runs
        );
    }
    s
}

pub fn parse_results(text: &str, path: &Path) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RESULTS_HEADER => {}
        _ => return Err(format_err(path, 1, "unexpected results header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(format_err(path, i + 1, "expected 8 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format_err(path, i + 1, format!("bad number {s:?}")));
        rows.push(ResultRow {
            dataset: f[0].into(),
            method: f[1].into(),
            level: num(f[2])?,
            stage: f[3].into(),
            metric: f[4].into(),
            mean: num(f[5])?,
            std: num(f[6])?,
            n_runs: f[7].parse().map_err(|_| format_err(path, i + 1, "bad n_runs"))?,
        });
    }
    Ok(rows)
}
