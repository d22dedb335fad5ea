//! One-hidden-layer feedforward network with a sigmoid hidden layer.
//!
//! Regression networks emit raw linear outputs; classification networks
//! emit softmax probabilities. All weights and biases live in one flat
//! vector laid out as
//!
//! ```text
//! [ input→hidden weights (row-major, input × hidden)
//! | hidden biases
//! | hidden→output weights (row-major, hidden × output)
//! | output biases ]
//! ```
//!
//! Regression parameter vectors additionally carry `log τ²`, the log of the
//! observation noise variance, outside the flat vector.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, Targets};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::posterior::PriorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Regression,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub input_size: usize,
    pub hidden_size: usize,
    pub output_size: usize,
    pub task: Task,
}

impl ModelSpec {
    pub fn new(input_size: usize, hidden_size: usize, output_size: usize, task: Task) -> Result<Self> {
        let spec = ModelSpec {
            input_size,
            hidden_size,
            output_size,
            task,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0 || self.hidden_size == 0 || self.output_size == 0 {
            return Err(Error::config("layer sizes must be at least 1"));
        }
        if self.task == Task::Classification && self.output_size < 2 {
            return Err(Error::config("classification needs at least 2 output classes"));
        }
        Ok(())
    }

    /// Number of weights and biases (excludes `log τ²`).
    pub fn num_params(&self) -> usize {
        self.input_size * self.hidden_size
            + self.hidden_size
            + self.hidden_size * self.output_size
            + self.output_size
    }

    /// Whether parameter vectors carry the regression noise term.
    pub fn has_noise(&self) -> bool {
        self.task == Task::Regression
    }

    fn offsets(&self) -> Offsets {
        let b1 = self.input_size * self.hidden_size;
        let w2 = b1 + self.hidden_size;
        let b2 = w2 + self.hidden_size * self.output_size;
        Offsets { b1, w2, b2 }
    }

    fn check_inputs(&self, inputs: &Matrix) -> Result<()> {
        if inputs.cols() != self.input_size {
            return Err(Error::shape("network inputs", self.input_size, inputs.cols()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Offsets {
    b1: usize,
    w2: usize,
    b2: usize,
}

/// Flat weights and biases plus, for regression, `log τ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
    pub log_tau_sq: Option<f64>,
}

impl ParamVector {
    /// All-zero parameters; regression vectors start at `τ² = 1`.
    pub fn zeros(spec: &ModelSpec) -> Self {
        ParamVector {
            values: vec![0.0; spec.num_params()],
            log_tau_sq: spec.has_noise().then_some(0.0),
        }
    }

    pub fn new(spec: &ModelSpec, values: Vec<f64>, log_tau_sq: Option<f64>) -> Result<Self> {
        let p = ParamVector { values, log_tau_sq };
        p.check(spec)?;
        Ok(p)
    }

    /// Validates length, presence of the noise term and finiteness.
    pub fn check(&self, spec: &ModelSpec) -> Result<()> {
        if self.values.len() != spec.num_params() {
            return Err(Error::shape("parameter vector", spec.num_params(), self.values.len()));
        }
        if self.log_tau_sq.is_some() != spec.has_noise() {
            return Err(Error::config(if spec.has_noise() {
                "regression parameters need log_tau_sq"
            } else {
                "classification parameters must not carry log_tau_sq"
            }));
        }
        if !self.values.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("parameter vector"));
        }
        if let Some(t) = self.log_tau_sq {
            if !t.is_finite() || math::exp(t) <= 0.0 {
                return Err(Error::Numeric("log_tau_sq"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tau_sq(&self) -> Option<f64> {
        self.log_tau_sq.map(math::exp)
    }

    /// The values followed by `log τ²` when present (one chain row).
    pub fn to_row(&self) -> Vec<f64> {
        let mut row = self.values.clone();
        row.extend(self.log_tau_sq);
        row
    }

    pub fn from_row(spec: &ModelSpec, row: &[f64]) -> Result<Self> {
        let t = spec.num_params();
        let expected = t + usize::from(spec.has_noise());
        if row.len() != expected {
            return Err(Error::shape("chain row", expected, row.len()));
        }
        Ok(ParamVector {
            values: row[..t].to_vec(),
            log_tau_sq: spec.has_noise().then(|| row[t]),
        })
    }
}

/// Structured view of the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Layers {
    /// input_size × hidden_size
    pub input_hidden: Matrix,
    pub hidden_bias: Vec<f64>,
    /// hidden_size × output_size
    pub hidden_output: Matrix,
    pub output_bias: Vec<f64>,
}

/// Flattens structured layers into the fixed parameter ordering.
pub fn pack(spec: &ModelSpec, layers: &Layers) -> Result<Vec<f64>> {
    let (i, h, o) = (spec.input_size, spec.hidden_size, spec.output_size);
    if layers.input_hidden.rows() != i || layers.input_hidden.cols() != h {
        return Err(Error::shape("input→hidden weights", i * h, layers.input_hidden.as_slice().len()));
    }
    if layers.hidden_bias.len() != h {
        return Err(Error::shape("hidden biases", h, layers.hidden_bias.len()));
    }
    if layers.hidden_output.rows() != h || layers.hidden_output.cols() != o {
        return Err(Error::shape("hidden→output weights", h * o, layers.hidden_output.as_slice().len()));
    }
    if layers.output_bias.len() != o {
        return Err(Error::shape("output biases", o, layers.output_bias.len()));
    }
    let mut flat = Vec::with_capacity(spec.num_params());
    flat.extend_from_slice(layers.input_hidden.as_slice());
    flat.extend_from_slice(&layers.hidden_bias);
    flat.extend_from_slice(layers.hidden_output.as_slice());
    flat.extend_from_slice(&layers.output_bias);
    Ok(flat)
}

/// Inverse of [`pack`].
pub fn unpack(spec: &ModelSpec, flat: &[f64]) -> Result<Layers> {
    if flat.len() != spec.num_params() {
        return Err(Error::shape("parameter vector", spec.num_params(), flat.len()));
    }
    let off = spec.offsets();
    let (i, h, o) = (spec.input_size, spec.hidden_size, spec.output_size);
    Ok(Layers {
        input_hidden: Matrix::from_vec(i, h, flat[..off.b1].to_vec())?,
        hidden_bias: flat[off.b1..off.w2].to_vec(),
        hidden_output: Matrix::from_vec(h, o, flat[off.w2..off.b2].to_vec())?,
        output_bias: flat[off.b2..].to_vec(),
    })
}

fn hidden_layer(spec: &ModelSpec, theta: &[f64], x: &[f64], out: &mut [f64]) {
    let off = spec.offsets();
    let h = spec.hidden_size;
    out.copy_from_slice(&theta[off.b1..off.w2]);
    for (i, &xi) in x.iter().enumerate() {
        let w = &theta[i * h..(i + 1) * h];
        for (acc, &wij) in out.iter_mut().zip(w) {
            *acc += xi * wij;
        }
    }
    for v in out.iter_mut() {
        *v = math::sigmoid(*v);
    }
}

fn output_layer(spec: &ModelSpec, theta: &[f64], hidden: &[f64], out: &mut [f64]) {
    let off = spec.offsets();
    let o = spec.output_size;
    out.copy_from_slice(&theta[off.b2..]);
    for (k, &hk) in hidden.iter().enumerate() {
        let w = &theta[off.w2 + k * o..off.w2 + (k + 1) * o];
        for (acc, &wkj) in out.iter_mut().zip(w) {
            *acc += hk * wkj;
        }
    }
}

/// In-place softmax with max-shift.
fn softmax(z: &mut [f64]) {
    let lse = math::log_sum_exp(z);
    for v in z.iter_mut() {
        *v = math::exp(*v - lse);
    }
}

/// Network outputs for every input row. Regression rows are the linear
/// outputs; classification rows are softmax probabilities.
pub fn forward(spec: &ModelSpec, params: &ParamVector, inputs: &Matrix) -> Result<Matrix> {
    if params.values.len() != spec.num_params() {
        return Err(Error::shape("parameter vector", spec.num_params(), params.values.len()));
    }
    forward_values(spec, &params.values, inputs)
}

pub(crate) fn forward_values(spec: &ModelSpec, theta: &[f64], inputs: &Matrix) -> Result<Matrix> {
    spec.check_inputs(inputs)?;
    let mut out = Matrix::zeros(inputs.rows(), spec.output_size);
    let mut hidden = vec![0.0; spec.hidden_size];
    for n in 0..inputs.rows() {
        hidden_layer(spec, theta, inputs.row(n), &mut hidden);
        let row = out.row_mut(n);
        output_layer(spec, theta, &hidden, row);
        if !row.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("network output"));
        }
        if spec.task == Task::Classification {
            softmax(row);
        }
    }
    Ok(out)
}

/// Log-likelihood of `data` and optionally its gradient with respect to the
/// flat weights (τ² held fixed), computed in one forward/backward sweep.
pub(crate) fn log_likelihood_with_gradient(
    spec: &ModelSpec,
    params: &ParamVector,
    data: &Dataset,
    want_gradient: bool,
) -> Result<(f64, Option<Vec<f64>>)> {
    params.check(spec)?;
    spec.check_inputs(&data.features)?;
    if data.is_empty() {
        return Err(Error::Insufficient("likelihood over an empty dataset".into()));
    }
    let theta = &params.values;
    let off = spec.offsets();
    let (hs, os) = (spec.hidden_size, spec.output_size);
    let mut hidden = vec![0.0; hs];
    let mut z = vec![0.0; os];
    let mut delta = vec![0.0; os];
    let mut dh = vec![0.0; hs];
    let mut grad = if want_gradient { vec![0.0; theta.len()] } else { Vec::new() };

    let mut loglik;
    let inv_tau_sq;
    match (&data.targets, spec.task) {
        (Targets::Real(t), Task::Regression) => {
            if t.cols() != os {
                return Err(Error::shape("regression targets", os, t.cols()));
            }
            let tau_sq = params.tau_sq().unwrap_or(1.0);
            if !(tau_sq > 0.0) || !tau_sq.is_finite() {
                return Err(Error::Numeric("tau_sq"));
            }
            inv_tau_sq = 1.0 / tau_sq;
            let count = (data.len() * os) as f64;
            loglik = -0.5 * count * (math::LN_2PI + math::ln(tau_sq));
        }
        (Targets::Labels { classes, .. }, Task::Classification) => {
            if *classes != os {
                return Err(Error::shape("class count", os, *classes));
            }
            inv_tau_sq = 1.0;
            loglik = 0.0;
        }
        _ => return Err(Error::config("dataset task does not match the model task")),
    }

    let mut sq_sum = 0.0;
    for n in 0..data.len() {
        let x = data.features.row(n);
        hidden_layer(spec, theta, x, &mut hidden);
        output_layer(spec, theta, &hidden, &mut z);
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("network output"));
        }
        match &data.targets {
            Targets::Real(t) => {
                for ((d, &zj), &yj) in delta.iter_mut().zip(&z).zip(t.row(n)) {
                    let r = yj - zj;
                    sq_sum += r * r;
                    *d = r * inv_tau_sq;
                }
            }
            Targets::Labels { labels, classes } => {
                let y = labels[n];
                if y >= *classes {
                    return Err(Error::Label {
                        label: y,
                        classes: *classes,
                    });
                }
                let lse = math::log_sum_exp(&z);
                loglik += (z[y] - lse).max(math::ln(math::PROB_FLOOR));
                for (j, (d, &zj)) in delta.iter_mut().zip(&z).enumerate() {
                    let p = math::exp(zj - lse);
                    *d = if j == y { 1.0 - p } else { -p };
                }
            }
        }
        if !want_gradient {
            continue;
        }
        // hidden→output weights and output biases
        for (k, &hk) in hidden.iter().enumerate() {
            let g = &mut grad[off.w2 + k * os..off.w2 + (k + 1) * os];
            for (gj, &dj) in g.iter_mut().zip(&delta) {
                *gj += hk * dj;
            }
        }
        for (gj, &dj) in grad[off.b2..].iter_mut().zip(&delta) {
            *gj += dj;
        }
        // back through the sigmoid
        for (k, dk) in dh.iter_mut().enumerate() {
            let w = &theta[off.w2 + k * os..off.w2 + (k + 1) * os];
            let s: f64 = w.iter().zip(&delta).map(|(a, b)| a * b).sum();
            *dk = s * hidden[k] * (1.0 - hidden[k]);
        }
        for (i, &xi) in x.iter().enumerate() {
            let g = &mut grad[i * hs..(i + 1) * hs];
            for (gk, &dk) in g.iter_mut().zip(&dh) {
                *gk += xi * dk;
            }
        }
        for (gk, &dk) in grad[off.b1..off.w2].iter_mut().zip(&dh) {
            *gk += dk;
        }
    }
    if spec.task == Task::Regression {
        loglik -= 0.5 * inv_tau_sq * sq_sum;
    }
    if !loglik.is_finite() && loglik != f64::NEG_INFINITY {
        return Err(Error::Numeric("log-likelihood"));
    }
    if want_gradient {
        if !grad.iter().all(|g| g.is_finite()) {
            return Err(Error::Numeric("log-likelihood gradient"));
        }
        Ok((loglik, Some(grad)))
    } else {
        Ok((loglik, None))
    }
}

/// Gradient of the log-posterior (likelihood plus Gaussian prior on the
/// weights) with respect to the flat weights. τ² is held fixed.
pub fn log_posterior_gradient(
    spec: &ModelSpec,
    params: &ParamVector,
    data: &Dataset,
    prior: &PriorConfig,
) -> Result<Vec<f64>> {
    prior.validate()?;
    let (_, grad) = log_likelihood_with_gradient(spec, params, data, true)?;
    let mut grad = grad.expect("gradient requested");
    let inv = 1.0 / prior.sigma_sq;
    for (g, &t) in grad.iter_mut().zip(&params.values) {
        *g -= t * inv;
    }
    Ok(grad)
}
