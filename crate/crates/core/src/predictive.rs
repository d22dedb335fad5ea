//! Posterior predictive summaries from a stored chain.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::argmax_rows;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::nnet::{self, ModelSpec, Task};
use crate::pruning::PruneMask;
use crate::sampler::Chain;

/// Mean prediction and the 5%–95% band per input row and output.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictive {
    pub mean: Matrix,
    pub lower: Matrix,
    pub upper: Matrix,
    /// argmax of the mean class probabilities (classification only).
    pub labels: Option<Vec<usize>>,
    pub n_samples: usize,
}

pub const LOWER_QUANTILE: f64 = 0.05;
pub const UPPER_QUANTILE: f64 = 0.95;

/// Row indices used for prediction: burn-in dropped, then every
/// `thinning`-th row, counting from the last row backwards so the final
/// state is always included.
pub fn retained_rows(chain: &Chain, burn_in_fraction: f64, thinning: usize) -> Vec<usize> {
    let start = chain.burn_in_start(burn_in_fraction);
    let step = thinning.max(1);
    let mut rows: Vec<usize> = (start..chain.len()).rev().step_by(step).collect();
    rows.reverse();
    rows
}

/// Forward pass for every retained (thinned) sample; when `mask` is given
/// it is applied to each sample first.
pub fn posterior_predictive(
    spec: &ModelSpec,
    chain: &Chain,
    inputs: &Matrix,
    burn_in_fraction: f64,
    thinning: usize,
    mask: Option<&PruneMask>,
) -> Result<Predictive> {
    if chain.num_params() != spec.num_params() {
        return Err(Error::shape("chain width", spec.num_params(), chain.num_params()));
    }
    let rows = retained_rows(chain, burn_in_fraction, thinning);
    if rows.is_empty() {
        return Err(Error::Insufficient("no retained samples for prediction".into()));
    }
    let (n, o, s) = (inputs.rows(), spec.output_size, rows.len());
    // outputs[(point * o + out) * s + sample]
    let mut outputs = vec![0.0; n * o * s];
    let mut theta = vec![0.0; spec.num_params()];
    for (k, &r) in rows.iter().enumerate() {
        theta.copy_from_slice(chain.theta(r));
        if let Some(m) = mask {
            m.apply_slice(&mut theta);
        }
        let out = nnet::forward_values(spec, &theta, inputs)?;
        for (idx, &v) in out.as_slice().iter().enumerate() {
            outputs[idx * s + k] = v;
        }
    }
    let mut mean = Matrix::zeros(n, o);
    let mut lower = Matrix::zeros(n, o);
    let mut upper = Matrix::zeros(n, o);
    for i in 0..n {
        for j in 0..o {
            let cell = &mut outputs[(i * o + j) * s..(i * o + j + 1) * s];
            mean.set(i, j, math::mean(cell));
            cell.sort_by(f64::total_cmp);
            lower.set(i, j, math::quantile_sorted(cell, LOWER_QUANTILE));
            upper.set(i, j, math::quantile_sorted(cell, UPPER_QUANTILE));
        }
    }
    let labels = (spec.task == Task::Classification).then(|| argmax_rows(&mean));
    Ok(Predictive {
        mean,
        lower,
        upper,
        labels,
        n_samples: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SamplerConfig;

    fn regression_chain(rows: &[[f64; 4]]) -> Chain {
        let mut samples = Vec::new();
        for r in rows {
            samples.extend_from_slice(r);
            samples.push(0.0);
        }
        Chain::from_parts(
            4,
            true,
            samples,
            vec![0.0; rows.len()],
            vec![true; rows.len()],
            None,
            SamplerConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn identical_rows_give_zero_band() {
        let spec = ModelSpec::new(1, 1, 1, Task::Regression).unwrap();
        let c = regression_chain(&[[0.4, -0.1, 1.3, 0.2]; 5]);
        let x = Matrix::from_rows(&[[0.0], [0.5], [2.0]]).unwrap();
        let p = posterior_predictive(&spec, &c, &x, 0.0, 1, None).unwrap();
        let single = nnet::forward_values(&spec, c.theta(0), &x).unwrap();
        for (a, b) in p.mean.as_slice().iter().zip(single.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(p.lower, p.upper);
        assert!(p.labels.is_none());
    }

    #[test]
    fn two_sample_mean() {
        let spec = ModelSpec::new(1, 1, 1, Task::Regression).unwrap();
        // output biases 0 and 1, zero weights
        let c = regression_chain(&[[0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        let x = Matrix::from_rows(&[[0.3]]).unwrap();
        let p = posterior_predictive(&spec, &c, &x, 0.0, 1, None).unwrap();
        assert_eq!(p.mean.get(0, 0), 0.5);
        assert_eq!(p.n_samples, 2);
    }

    #[test]
    fn thinning_keeps_last_row() {
        let c = regression_chain(&[[0.0; 4]; 10]);
        assert_eq!(retained_rows(&c, 0.5, 2), vec![5, 7, 9]);
        assert_eq!(retained_rows(&c, 0.0, 1).len(), 10);
    }

    #[test]
    fn mask_is_applied_per_sample() {
        let spec = ModelSpec::new(1, 1, 1, Task::Regression).unwrap();
        let c = regression_chain(&[[0.0, 0.0, 0.0, 1.0]]);
        let m = PruneMask::from_keep(vec![true, true, true, false], crate::pruning::PruneMethod::Stn, 0.25, None);
        let x = Matrix::from_rows(&[[0.3]]).unwrap();
        let p = posterior_predictive(&spec, &c, &x, 0.0, 1, Some(&m)).unwrap();
        assert_eq!(p.mean.get(0, 0), 0.0);
    }
}
