//! Metropolis–Hastings with a mixture of Langevin-gradient and random-walk
//! proposals.
//!
//! Each step picks the Langevin proposal with probability
//! `langevin_probability`, otherwise a symmetric random walk. Langevin
//! steps carry the proposal-density correction so every step is a valid
//! MH transition on its own. For regression networks `log τ²` moves by a
//! Gaussian random walk jointly with the weights under one accept/reject.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::nnet::{ModelSpec, ParamVector};
use crate::posterior::{self, PosteriorEval, PriorConfig};
use crate::pruning::PruneMask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub max_samples: usize,
    pub burn_in_fraction: f64,
    /// Langevin step size ε; the drift is `(ε/2)·∇log p`.
    pub step_size: f64,
    /// Standard deviation of the Gaussian noise added to the weights.
    pub proposal_std: f64,
    /// Standard deviation of the random walk on `log τ²`.
    pub tau_proposal_std: f64,
    pub langevin_probability: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_samples: 50_000,
            burn_in_fraction: 0.5,
            step_size: 0.02,
            proposal_std: 0.025,
            tau_proposal_std: 0.2,
            langevin_probability: 0.5,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    /// The post-prune resampling settings: 1000 samples, no burn-in.
    pub fn resample(&self, seed: u64) -> Self {
        SamplerConfig {
            max_samples: 1000,
            burn_in_fraction: 0.0,
            seed,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_samples == 0 {
            return Err(Error::config("max_samples must be positive"));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(Error::config(format!(
                "burn_in_fraction {} not in [0, 1)",
                self.burn_in_fraction
            )));
        }
        for (name, v) in [
            ("step_size", self.step_size),
            ("proposal_std", self.proposal_std),
            ("tau_proposal_std", self.tau_proposal_std),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        if !(0.0..=1.0).contains(&self.langevin_probability) {
            return Err(Error::config("langevin_probability not in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalKind {
    Langevin,
    RandomWalk,
}

/// A log-density the sampler can target.
pub trait Target {
    /// Number of gradient-driven coordinates.
    fn dim(&self) -> usize;

    /// Whether states carry a `log τ²` coordinate.
    fn has_noise(&self) -> bool;

    fn evaluate(&self, params: &ParamVector, with_gradient: bool) -> Result<PosteriorEval>;
}

/// The network posterior over a training set.
#[derive(Debug, Clone, Copy)]
pub struct BnnTarget<'a> {
    pub spec: &'a ModelSpec,
    pub data: &'a Dataset,
    pub prior: &'a PriorConfig,
}

impl Target for BnnTarget<'_> {
    fn dim(&self) -> usize {
        self.spec.num_params()
    }

    fn has_noise(&self) -> bool {
        self.spec.has_noise()
    }

    fn evaluate(&self, params: &ParamVector, with_gradient: bool) -> Result<PosteriorEval> {
        posterior::evaluate(self.spec, params, self.data, self.prior, with_gradient)
    }
}

/// Samples stored row by row: the weights, then `log τ²` when present.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    num_params: usize,
    has_noise: bool,
    samples: Vec<f64>,
    log_likelihoods: Vec<f64>,
    accepted: Vec<bool>,
    mask: Option<PruneMask>,
    config: SamplerConfig,
}

impl Chain {
    /// Assembles a chain from stored parts, validating their shapes.
    pub fn from_parts(
        num_params: usize,
        has_noise: bool,
        samples: Vec<f64>,
        log_likelihoods: Vec<f64>,
        accepted: Vec<bool>,
        mask: Option<PruneMask>,
        config: SamplerConfig,
    ) -> Result<Self> {
        let width = num_params + usize::from(has_noise);
        let n = log_likelihoods.len();
        if samples.len() != n * width {
            return Err(Error::shape("chain samples", n * width, samples.len()));
        }
        if accepted.len() != n {
            return Err(Error::shape("chain accepted flags", n, accepted.len()));
        }
        if let Some(m) = &mask {
            if m.len() != num_params {
                return Err(Error::shape("chain mask", num_params, m.len()));
            }
        }
        Ok(Chain {
            num_params,
            has_noise,
            samples,
            log_likelihoods,
            accepted,
            mask,
            config,
        })
    }

    pub fn len(&self) -> usize {
        self.log_likelihoods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_likelihoods.is_empty()
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn has_noise(&self) -> bool {
        self.has_noise
    }

    /// Columns per row.
    pub fn width(&self) -> usize {
        self.num_params + usize::from(self.has_noise)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.samples[i * w..(i + 1) * w]
    }

    pub fn theta(&self, i: usize) -> &[f64] {
        &self.row(i)[..self.num_params]
    }

    pub fn params(&self, i: usize) -> ParamVector {
        let row = self.row(i);
        ParamVector {
            values: row[..self.num_params].to_vec(),
            log_tau_sq: self.has_noise.then(|| row[self.num_params]),
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.row(i)[j]).collect()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn log_likelihoods(&self) -> &[f64] {
        &self.log_likelihoods
    }

    pub fn accepted(&self) -> &[bool] {
        &self.accepted
    }

    pub fn mask(&self) -> Option<&PruneMask> {
        self.mask.as_ref()
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// First row kept after discarding `floor(fraction · len)` rows.
    pub fn burn_in_start(&self, fraction: f64) -> usize {
        (math::floor(fraction * self.len() as f64) as usize).min(self.len())
    }

    /// Per-coordinate mean over the retained rows, as a parameter vector.
    pub fn posterior_mean(&self, burn_in_fraction: f64) -> Result<ParamVector> {
        let start = self.burn_in_start(burn_in_fraction);
        let kept = self.len() - start;
        if kept == 0 {
            return Err(Error::Insufficient("no samples left after burn-in".into()));
        }
        let mut acc = vec![0.0; self.width()];
        for i in start..self.len() {
            for (a, v) in acc.iter_mut().zip(self.row(i)) {
                *a += v;
            }
        }
        for a in &mut acc {
            *a /= kept as f64;
        }
        Ok(ParamVector {
            values: acc[..self.num_params].to_vec(),
            log_tau_sq: self.has_noise.then(|| acc[self.num_params]),
        })
    }
}

/// `θ + (ε/2)·∇`, with masked coordinates pinned at zero.
pub fn langevin_mean(theta: &[f64], gradient: &[f64], step_size: f64, mask: Option<&PruneMask>) -> Vec<f64> {
    theta
        .iter()
        .zip(gradient)
        .enumerate()
        .map(|(i, (&t, &g))| {
            if mask.is_some_and(|m| !m.is_kept(i)) {
                0.0
            } else {
                t + 0.5 * step_size * g
            }
        })
        .collect()
}

/// Draws a proposal around `current`.
///
/// Returns the proposal and the mean it was drawn around. Masked
/// coordinates come back as exactly zero and consume no noise draws.
pub fn propose<R: Rng + ?Sized>(
    current: &ParamVector,
    gradient: &[f64],
    cfg: &SamplerConfig,
    kind: ProposalKind,
    mask: Option<&PruneMask>,
    rng: &mut R,
) -> Result<(ParamVector, Vec<f64>)> {
    if gradient.len() != current.len() {
        return Err(Error::shape("proposal gradient", current.len(), gradient.len()));
    }
    if let Some(m) = mask {
        if m.len() != current.len() {
            return Err(Error::shape("proposal mask", current.len(), m.len()));
        }
    }
    let mean = match kind {
        ProposalKind::Langevin => {
            if !gradient.iter().all(|g| g.is_finite()) {
                return Err(Error::Numeric("proposal gradient"));
            }
            langevin_mean(&current.values, gradient, cfg.step_size, mask)
        }
        ProposalKind::RandomWalk => current.values.clone(),
    };
    let mut values = mean.clone();
    for (i, v) in values.iter_mut().enumerate() {
        if mask.is_some_and(|m| !m.is_kept(i)) {
            *v = 0.0;
            continue;
        }
        let z: f64 = rng.sample(StandardNormal);
        *v += cfg.proposal_std * z;
    }
    let log_tau_sq = current.log_tau_sq.map(|t| {
        let z: f64 = rng.sample(StandardNormal);
        t + cfg.tau_proposal_std * z
    });
    Ok((ParamVector { values, log_tau_sq }, mean))
}

/// `log q(θ | θ') − log q(θ' | θ)` for a Langevin pair, where `forward_mean`
/// is m(θ) and `reverse_mean` is m(θ').
pub fn langevin_log_q_correction(
    current: &[f64],
    proposal: &[f64],
    forward_mean: &[f64],
    reverse_mean: &[f64],
    proposal_std: f64,
) -> f64 {
    let fwd: f64 = proposal
        .iter()
        .zip(forward_mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let rev: f64 = current
        .iter()
        .zip(reverse_mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    (fwd - rev) / (2.0 * proposal_std * proposal_std)
}

/// `min(0, log p(θ') − log p(θ) + q_correction)`; an impossible proposal
/// gives `−∞`.
pub fn acceptance_log_probability(log_post_current: f64, log_post_proposed: f64, q_correction_log: f64) -> f64 {
    let v = log_post_proposed - log_post_current + q_correction_log;
    if v.is_nan() || log_post_proposed == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    v.min(0.0)
}

fn masked_gradient(mut g: Vec<f64>, mask: Option<&PruneMask>) -> Vec<f64> {
    if let Some(m) = mask {
        for (i, gi) in g.iter_mut().enumerate() {
            if !m.is_kept(i) {
                *gi = 0.0;
            }
        }
    }
    g
}

/// Runs `cfg.max_samples` MH steps on an arbitrary target.
///
/// Every step stores a row; rejected steps repeat the previous state.
pub fn run_chain<T: Target + ?Sized>(
    target: &T,
    cfg: &SamplerConfig,
    init: &ParamVector,
    mask: Option<&PruneMask>,
) -> Result<Chain> {
    cfg.validate()?;
    let dim = target.dim();
    if init.len() != dim {
        return Err(Error::shape("initial state", dim, init.len()));
    }
    if init.log_tau_sq.is_some() != target.has_noise() {
        return Err(Error::config("initial state noise term does not match the target"));
    }
    if let Some(m) = mask {
        if m.len() != dim {
            return Err(Error::shape("sampler mask", dim, m.len()));
        }
    }
    let mut current = match mask {
        Some(m) => m.apply(init)?,
        None => init.clone(),
    };
    let use_langevin = cfg.langevin_probability > 0.0;
    let mut eval = target.evaluate(&current, use_langevin)?;
    if !eval.log_posterior().is_finite() {
        return Err(Error::Numeric("initial log-posterior"));
    }
    let mut current_grad = eval.gradient.take().map(|g| masked_gradient(g, mask));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = dim + usize::from(target.has_noise());
    let mut samples = Vec::with_capacity(cfg.max_samples * width);
    let mut log_likelihoods = Vec::with_capacity(cfg.max_samples);
    let mut accepted = Vec::with_capacity(cfg.max_samples);
    let zeros = vec![0.0; dim];

    for _ in 0..cfg.max_samples {
        let kind = if rng.random::<f64>() < cfg.langevin_probability {
            ProposalKind::Langevin
        } else {
            ProposalKind::RandomWalk
        };
        if kind == ProposalKind::Langevin && current_grad.is_none() {
            let g = target
                .evaluate(&current, true)?
                .gradient
                .expect("gradient requested");
            current_grad = Some(masked_gradient(g, mask));
        }
        let grad = match kind {
            ProposalKind::Langevin => current_grad.as_deref().expect("gradient cached"),
            ProposalKind::RandomWalk => &zeros,
        };
        let (proposal, forward_mean) = propose(&current, grad, cfg, kind, mask, &mut rng)?;

        let prop_eval = match target.evaluate(&proposal, kind == ProposalKind::Langevin) {
            Ok(e) => Some(e),
            // overflow far out in the tails: the proposal has zero density
            Err(Error::Numeric(_)) => None,
            Err(e) => return Err(e),
        };
        let (log_alpha, prop_grad) = match &prop_eval {
            None => (f64::NEG_INFINITY, None),
            Some(pe) => {
                let prop_grad = pe.gradient.clone().map(|g| masked_gradient(g, mask));
                let q = match (&prop_grad, kind) {
                    (Some(g), ProposalKind::Langevin) => {
                        let reverse_mean = langevin_mean(&proposal.values, g, cfg.step_size, mask);
                        langevin_log_q_correction(
                            &current.values,
                            &proposal.values,
                            &forward_mean,
                            &reverse_mean,
                            cfg.proposal_std,
                        )
                    }
                    _ => 0.0,
                };
                (
                    acceptance_log_probability(eval.log_posterior(), pe.log_posterior(), q),
                    prop_grad,
                )
            }
        };
        let u: f64 = rng.random();
        let accept = u < math::exp(log_alpha);
        if accept {
            current = proposal;
            eval = prop_eval.expect("accepted proposal has an evaluation");
            current_grad = prop_grad;
        }
        samples.extend_from_slice(&current.values);
        samples.extend(current.log_tau_sq);
        log_likelihoods.push(eval.log_likelihood);
        accepted.push(accept);
    }

    Chain::from_parts(
        dim,
        target.has_noise(),
        samples,
        log_likelihoods,
        accepted,
        mask.cloned(),
        *cfg,
    )
}

/// Samples the network posterior over `data` (the training split).
pub fn sample_chain(
    spec: &ModelSpec,
    data: &Dataset,
    cfg: &SamplerConfig,
    prior: &PriorConfig,
    init: &ParamVector,
    mask: Option<&PruneMask>,
) -> Result<Chain> {
    init.check(spec)?;
    let target = BnnTarget { spec, data, prior };
    run_chain(&target, cfg, init, mask)
}

/// Resamples a pruned network: `sample_chain` with the mask enforced.
/// `pruned_init` must already be zero on every masked coordinate.
pub fn resample_chain(
    spec: &ModelSpec,
    data: &Dataset,
    cfg: &SamplerConfig,
    prior: &PriorConfig,
    pruned_init: &ParamVector,
    mask: &PruneMask,
) -> Result<Chain> {
    if mask.len() != pruned_init.len() {
        return Err(Error::shape("resample mask", pruned_init.len(), mask.len()));
    }
    if let Some(i) = mask.pruned_indices().find(|&i| pruned_init.values[i] != 0.0) {
        return Err(Error::config(format!(
            "resample init has non-zero value at pruned coordinate {i}"
        )));
    }
    sample_chain(spec, data, cfg, prior, pruned_init, Some(mask))
}
