//! Log-priors, log-likelihoods and their sum, the unnormalized
//! log-posterior, for regression and classification networks.

use alloc::vec::Vec;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::nnet::{self, ModelSpec, ParamVector, Task};

/// Hyperparameters of the Gaussian prior on the weights and of the
/// inverse-Gamma prior on the regression noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    pub sigma_sq: f64,
    pub nu1: f64,
    pub nu2: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            sigma_sq: 25.0,
            nu1: 0.0,
            nu2: 0.0,
        }
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_sq > 0.0) || !self.sigma_sq.is_finite() {
            return Err(Error::config("sigma_sq must be positive"));
        }
        if !(self.nu1 >= 0.0 && self.nu2 >= 0.0) {
            return Err(Error::config("nu1 and nu2 must be non-negative"));
        }
        Ok(())
    }
}

fn gaussian_log_prior(theta: &[f64], sigma_sq: f64) -> f64 {
    let sum_sq: f64 = theta.iter().map(|t| t * t).sum();
    -(theta.len() as f64 / 2.0) * math::ln(sigma_sq) - sum_sq / (2.0 * sigma_sq)
}

/// `−(T/2)·log σ² − Σθ²/(2σ²) − (1+ν₁)·log τ² − ν₂/τ²`
pub fn log_prior_regression(params: &ParamVector, cfg: &PriorConfig) -> Result<f64> {
    cfg.validate()?;
    let log_tau_sq = params
        .log_tau_sq
        .ok_or_else(|| Error::config("regression prior needs log_tau_sq"))?;
    let tau_sq = math::exp(log_tau_sq);
    if !(tau_sq > 0.0) || !tau_sq.is_finite() {
        return Err(Error::Numeric("tau_sq"));
    }
    Ok(gaussian_log_prior(&params.values, cfg.sigma_sq)
        - (1.0 + cfg.nu1) * log_tau_sq
        - cfg.nu2 / tau_sq)
}

/// `−(T/2)·log σ² − Σθ²/(2σ²)`
pub fn log_prior_classification(params: &ParamVector, cfg: &PriorConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(gaussian_log_prior(&params.values, cfg.sigma_sq))
}

pub fn log_prior(spec: &ModelSpec, params: &ParamVector, cfg: &PriorConfig) -> Result<f64> {
    match spec.task {
        Task::Regression => log_prior_regression(params, cfg),
        Task::Classification => log_prior_classification(params, cfg),
    }
}

/// Gaussian log-likelihood `−(N/2)·log(2πτ²) − Σ(y − f(x))²/(2τ²)`.
/// With several outputs N counts every (row, output) pair.
pub fn log_likelihood_regression(spec: &ModelSpec, params: &ParamVector, data: &Dataset) -> Result<f64> {
    if spec.task != Task::Regression {
        return Err(Error::config("regression likelihood on a classification model"));
    }
    nnet::log_likelihood_with_gradient(spec, params, data, false).map(|(ll, _)| ll)
}

/// Multinomial log-likelihood `Σᵢ log p_{yᵢ}(xᵢ)` under the softmax outputs.
pub fn log_likelihood_classification(
    spec: &ModelSpec,
    params: &ParamVector,
    data: &Dataset,
) -> Result<f64> {
    if spec.task != Task::Classification {
        return Err(Error::config("classification likelihood on a regression model"));
    }
    nnet::log_likelihood_with_gradient(spec, params, data, false).map(|(ll, _)| ll)
}

pub fn log_likelihood(spec: &ModelSpec, params: &ParamVector, data: &Dataset) -> Result<f64> {
    match spec.task {
        Task::Regression => log_likelihood_regression(spec, params, data),
        Task::Classification => log_likelihood_classification(spec, params, data),
    }
}

/// `log_likelihood + log_prior`, summed in that order.
pub fn log_posterior(
    spec: &ModelSpec,
    params: &ParamVector,
    data: &Dataset,
    cfg: &PriorConfig,
) -> Result<f64> {
    let ll = log_likelihood(spec, params, data)?;
    let lp = log_prior(spec, params, cfg)?;
    Ok(ll + lp)
}

/// One evaluation of the posterior at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEval {
    pub log_likelihood: f64,
    pub log_prior: f64,
    /// Gradient of the log-posterior with respect to the weights.
    pub gradient: Option<Vec<f64>>,
}

impl PosteriorEval {
    pub fn log_posterior(&self) -> f64 {
        self.log_likelihood + self.log_prior
    }
}

/// Log-likelihood, log-prior and (optionally) the log-posterior gradient
/// from a single network sweep.
pub fn evaluate(
    spec: &ModelSpec,
    params: &ParamVector,
    data: &Dataset,
    cfg: &PriorConfig,
    with_gradient: bool,
) -> Result<PosteriorEval> {
    let (log_likelihood, grad) = nnet::log_likelihood_with_gradient(spec, params, data, with_gradient)?;
    let log_prior = log_prior(spec, params, cfg)?;
    let gradient = grad.map(|mut g| {
        let inv = 1.0 / cfg.sigma_sq;
        for (gi, &t) in g.iter_mut().zip(&params.values) {
            *gi -= t * inv;
        }
        g
    });
    Ok(PosteriorEval {
        log_likelihood,
        log_prior,
        gradient,
    })
}
