//! Gelman–Rubin potential scale reduction, acceptance rates and trace
//! export.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::math;
use crate::sampler::Chain;

/// One R̂ value. `degenerate` is set when the within-chain variance is zero,
/// in which case `value` is `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rhat {
    pub value: f64,
    pub degenerate: bool,
}

/// Per-chain sample count, means and sample variances of every column.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMoments {
    pub n: usize,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl ChainMoments {
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.len());
        if n < 2 {
            return Err(Error::Insufficient("chains need at least 2 samples".into()));
        }
        let mut means = Vec::with_capacity(columns.len());
        let mut variances = Vec::with_capacity(columns.len());
        for c in columns {
            if c.len() != n {
                return Err(Error::shape("chain column", n, c.len()));
            }
            means.push(math::mean(c));
            variances.push(math::sample_variance(c));
        }
        Ok(ChainMoments { n, means, variances })
    }

    /// Moments of every column over rows `start..end` of a chain.
    pub fn from_chain_rows(chain: &Chain, start: usize, end: usize) -> Result<Self> {
        let n = end.saturating_sub(start);
        if n < 2 {
            return Err(Error::Insufficient("chains need at least 2 samples".into()));
        }
        let w = chain.width();
        let mut means = alloc::vec![0.0; w];
        let mut m2 = alloc::vec![0.0; w];
        for (k, i) in (start..end).enumerate() {
            let kf = (k + 1) as f64;
            for ((m, s), &x) in means.iter_mut().zip(m2.iter_mut()).zip(chain.row(i)) {
                let d = x - *m;
                *m += d / kf;
                *s += d * (x - *m);
            }
        }
        let variances = m2.iter().map(|s| (s / (n as f64 - 1.0)).max(0.0)).collect();
        Ok(ChainMoments { n, means, variances })
    }

    pub fn from_chain(chain: &Chain, burn_in_fraction: f64) -> Result<Self> {
        Self::from_chain_rows(chain, chain.burn_in_start(burn_in_fraction), chain.len())
    }
}

fn rhat_from_parts(n: usize, means: &[f64], variances: &[f64]) -> Rhat {
    let w = math::mean(variances);
    if !(w > 0.0) {
        log::warn!("within-chain variance is zero; R-hat is degenerate");
        return Rhat {
            value: f64::INFINITY,
            degenerate: true,
        };
    }
    let nf = n as f64;
    let b_over_n = math::sample_variance(means);
    let v = (nf - 1.0) / nf * w + b_over_n;
    Rhat {
        value: math::sqrt(v / w),
        degenerate: false,
    }
}

/// R̂ for one scalar across `m ≥ 2` equal-length chains:
/// `W` is the mean within-chain variance, `B/n` the variance of the chain
/// means, `V = (n−1)/n·W + B/n` and `R̂ = √(V/W)`.
pub fn gelman_rubin(chains: &[&[f64]]) -> Result<Rhat> {
    if chains.len() < 2 {
        return Err(Error::Insufficient("R-hat needs at least 2 chains".into()));
    }
    let n = chains[0].len();
    if n < 2 {
        return Err(Error::Insufficient("R-hat needs at least 2 samples per chain".into()));
    }
    if let Some(c) = chains.iter().find(|c| c.len() != n) {
        return Err(Error::shape("R-hat chain length", n, c.len()));
    }
    let means: Vec<f64> = chains.iter().map(|c| math::mean(c)).collect();
    let vars: Vec<f64> = chains.iter().map(|c| math::sample_variance(c)).collect();
    Ok(rhat_from_parts(n, &means, &vars))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsrfReport {
    pub per_parameter_rhat: Vec<f64>,
    /// Largest R̂ among non-degenerate parameters (NaN if all are degenerate).
    pub max_rhat: f64,
    pub n_chains: usize,
    pub n_samples: usize,
    /// Parameters whose within-chain variance is zero (e.g. pruned weights).
    pub degenerate: Vec<usize>,
}

impl PsrfReport {
    /// `parameter,rhat` CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,rhat\n");
        for (i, r) in self.per_parameter_rhat.iter().enumerate() {
            let _ = writeln!(s, "{i},{r}");
        }
        s
    }
}

/// Per-parameter R̂ from chain moments.
pub fn psrf_from_moments(moments: &[ChainMoments]) -> Result<PsrfReport> {
    if moments.len() < 2 {
        return Err(Error::Insufficient("R-hat needs at least 2 chains".into()));
    }
    let n = moments[0].n;
    let width = moments[0].means.len();
    for m in moments {
        if m.n != n {
            return Err(Error::shape("R-hat chain length", n, m.n));
        }
        if m.means.len() != width {
            return Err(Error::shape("R-hat chain width", width, m.means.len()));
        }
    }
    let mut per = Vec::with_capacity(width);
    let mut degenerate = Vec::new();
    let mut max = f64::NAN;
    for j in 0..width {
        let means: Vec<f64> = moments.iter().map(|m| m.means[j]).collect();
        let vars: Vec<f64> = moments.iter().map(|m| m.variances[j]).collect();
        let r = rhat_from_parts(n, &means, &vars);
        if r.degenerate {
            degenerate.push(j);
        } else if !(r.value <= max) {
            max = r.value;
        }
        per.push(r.value);
    }
    Ok(PsrfReport {
        per_parameter_rhat: per,
        max_rhat: max,
        n_chains: moments.len(),
        n_samples: n,
        degenerate,
    })
}

/// R̂ for every column across several chains, after burn-in.
pub fn psrf(chains: &[&Chain], burn_in_fraction: f64) -> Result<PsrfReport> {
    let moments = chains
        .iter()
        .map(|c| ChainMoments::from_chain(c, burn_in_fraction))
        .collect::<Result<Vec<_>>>()?;
    psrf_from_moments(&moments)
}

/// Split-R̂ for a single chain: the retained rows are cut into two halves
/// (dropping the middle row when the count is odd) treated as two chains.
pub fn split_psrf(chain: &Chain, burn_in_fraction: f64) -> Result<PsrfReport> {
    let start = chain.burn_in_start(burn_in_fraction);
    let half = (chain.len() - start) / 2;
    let first = ChainMoments::from_chain_rows(chain, start, start + half)?;
    let second = ChainMoments::from_chain_rows(chain, chain.len() - half, chain.len())?;
    psrf_from_moments(&[first, second])
}

/// Fraction of accepted proposals.
pub fn acceptance_rate(chain: &Chain) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::Insufficient("acceptance rate of an empty chain".into()));
    }
    let n = chain.accepted().iter().filter(|a| **a).count();
    Ok(n as f64 / chain.len() as f64)
}

/// Plot-ready CSV: `sample,p{i},...` with one row per stored sample.
pub fn export_trace(chain: &Chain, parameter_indices: &[usize]) -> Result<String> {
    if let Some(&bad) = parameter_indices.iter().find(|&&i| i >= chain.width()) {
        return Err(Error::Index {
            index: bad,
            len: chain.width(),
        });
    }
    let mut s = String::from("sample");
    for &i in parameter_indices {
        if chain.has_noise() && i == chain.num_params() {
            s.push_str(",log_tau_sq");
        } else {
            let _ = write!(s, ",p{i}");
        }
    }
    s.push('\n');
    if parameter_indices.is_empty() {
        return Ok(s);
    }
    for r in 0..chain.len() {
        let row = chain.row(r);
        let _ = write!(s, "{r}");
        for &i in parameter_indices {
            let _ = write!(s, ",{}", row[i]);
        }
        s.push('\n');
    }
    Ok(s)
}

/// Short human-readable summary line.
pub fn describe(report: &PsrfReport) -> String {
    format!(
        "R-hat over {} chains x {} samples: max {:.4}, {} degenerate",
        report.n_chains,
        report.n_samples,
        report.max_rhat,
        report.degenerate.len()
    )
}
