//! Posterior-statistics pruning.
//!
//! Parameters are ranked by a score computed from their posterior mean μ
//! and standard deviation σ, and the lowest-scoring fraction is zeroed:
//!
//! * signal-to-noise (`Stn`): `|μ| / σ`,
//! * signal-plus-noise (`Spn`): `|μ| + σ`,
//! * random (`Rnd`): a seeded uniform subset, the baseline.
//!
//! The noise term `log τ²` is never pruned.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::nnet::ParamVector;
use crate::sampler::Chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PruneMethod {
    Stn,
    Spn,
    Rnd,
}

impl PruneMethod {
    pub const ALL: [PruneMethod; 3] = [PruneMethod::Stn, PruneMethod::Spn, PruneMethod::Rnd];

    pub fn as_str(&self) -> &'static str {
        match self {
            PruneMethod::Stn => "stn",
            PruneMethod::Spn => "spn",
            PruneMethod::Rnd => "rnd",
        }
    }
}

impl fmt::Display for PruneMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PruneMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stn" => Ok(PruneMethod::Stn),
            "spn" => Ok(PruneMethod::Spn),
            "rnd" | "random" => Ok(PruneMethod::Rnd),
            other => Err(Error::config(format!("unknown pruning method `{other}`"))),
        }
    }
}

/// Per-parameter posterior mean and sample standard deviation (n − 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl PosteriorStats {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// Mean and standard deviation of every weight over the rows left after
/// burn-in. Repeated rows from rejected steps count as samples.
pub fn chain_statistics(chain: &Chain, burn_in_fraction: f64) -> Result<PosteriorStats> {
    let start = chain.burn_in_start(burn_in_fraction);
    let n = chain.len() - start;
    if n < 2 {
        return Err(Error::Insufficient(format!(
            "{n} retained rows; standard deviations need at least 2"
        )));
    }
    let t = chain.num_params();
    // Welford, one pass over the rows
    let mut means = vec![0.0; t];
    let mut m2 = vec![0.0; t];
    for (k, i) in (start..chain.len()).enumerate() {
        let kf = (k + 1) as f64;
        for ((m, s), &x) in means.iter_mut().zip(m2.iter_mut()).zip(chain.theta(i)) {
            let d = x - *m;
            *m += d / kf;
            *s += d * (x - *m);
        }
    }
    let stds = m2.iter().map(|s| math::sqrt((s / (n as f64 - 1.0)).max(0.0))).collect();
    Ok(PosteriorStats { means, stds })
}

/// Importance scores; lower scores are pruned first.
pub fn pruning_scores(stats: &PosteriorStats, method: PruneMethod) -> Result<Vec<f64>> {
    let scores = stats.means.iter().zip(&stats.stds).map(|(&mu, &sd)| match method {
        PruneMethod::Stn => {
            if sd > 0.0 {
                mu.abs() / sd
            } else if mu == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        PruneMethod::Spn => mu.abs() + sd,
        PruneMethod::Rnd => 0.0,
    });
    match method {
        PruneMethod::Rnd => Err(Error::config("random pruning has no scores")),
        _ => Ok(scores.collect()),
    }
}

/// Keep/zero flags for every weight plus how they were chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneMask {
    keep: Vec<bool>,
    pub method: PruneMethod,
    pub level: f64,
    pub seed: Option<u64>,
}

impl PruneMask {
    pub fn keep_all(num_params: usize, method: PruneMethod) -> Self {
        PruneMask {
            keep: vec![true; num_params],
            method,
            level: 0.0,
            seed: None,
        }
    }

    pub fn from_keep(keep: Vec<bool>, method: PruneMethod, level: f64, seed: Option<u64>) -> Self {
        PruneMask {
            keep,
            method,
            level,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    #[inline]
    pub fn is_kept(&self, i: usize) -> bool {
        self.keep[i]
    }

    pub fn pruned_count(&self) -> usize {
        self.keep.iter().filter(|k| !**k).count()
    }

    pub fn pruned_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.keep.iter().enumerate().filter(|(_, k)| !**k).map(|(i, _)| i)
    }

    /// Zeroes the pruned weights; `log τ²` passes through.
    pub fn apply(&self, params: &ParamVector) -> Result<ParamVector> {
        apply_mask(params, self)
    }

    pub fn apply_slice(&self, theta: &mut [f64]) {
        for (v, &k) in theta.iter_mut().zip(&self.keep) {
            if !k {
                *v = 0.0;
            }
        }
    }
}

/// Number of coordinates pruned at `level`.
pub fn prune_count(num_params: usize, level: f64) -> usize {
    math::floor(level * num_params as f64) as usize
}

fn check_level(level: f64) -> Result<()> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::config(format!("pruning level {level} not in [0, 1)")));
    }
    Ok(())
}

/// Prunes the `floor(level · T)` lowest-scoring weights (lower index first
/// on ties), or a seeded random subset of the same size for `Rnd`.
pub fn build_mask(
    stats: &PosteriorStats,
    method: PruneMethod,
    level: f64,
    seed: Option<u64>,
) -> Result<PruneMask> {
    check_level(level)?;
    let t = stats.len();
    match method {
        PruneMethod::Rnd => {
            let seed = seed.ok_or_else(|| Error::config("random pruning needs a seed"))?;
            random_mask(t, level, seed)
        }
        _ => {
            let scores = pruning_scores(stats, method)?;
            let mut order: Vec<usize> = (0..t).collect();
            order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
            let mut keep = vec![true; t];
            for &i in &order[..prune_count(t, level)] {
                keep[i] = false;
            }
            Ok(PruneMask {
                keep,
                method,
                level,
                seed: None,
            })
        }
    }
}

/// Uniformly random subset of exactly `floor(level · T)` pruned weights.
pub fn random_mask(num_params: usize, level: f64, seed: u64) -> Result<PruneMask> {
    check_level(level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![true; num_params];
    for i in rand::seq::index::sample(&mut rng, num_params, prune_count(num_params, level)) {
        keep[i] = false;
    }
    Ok(PruneMask {
        keep,
        method: PruneMethod::Rnd,
        level,
        seed: Some(seed),
    })
}

/// Copy of `params` with every pruned weight set to exactly zero.
pub fn apply_mask(params: &ParamVector, mask: &PruneMask) -> Result<ParamVector> {
    if params.len() != mask.len() {
        return Err(Error::shape("mask", params.len(), mask.len()));
    }
    let mut out = params.clone();
    mask.apply_slice(&mut out.values);
    Ok(out)
}
