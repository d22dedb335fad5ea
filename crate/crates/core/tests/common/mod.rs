#![allow(dead_code)]

use bnnprune_core::data::{Dataset, Targets};
use bnnprune_core::{Matrix, ModelSpec, ParamVector, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Random network spec, parameters and matching dataset with at most
/// `max_params` weights.
pub fn random_problem(seed: u64, task: Task, max_params: usize) -> (ModelSpec, ParamVector, Dataset) {
    let mut r = rng(seed);
    loop {
        let input = r.random_range(1..=5);
        let hidden = r.random_range(1..=8);
        let output = match task {
            Task::Regression => r.random_range(1..=2),
            Task::Classification => r.random_range(2..=4),
        };
        let spec = ModelSpec::new(input, hidden, output, task).unwrap();
        if spec.num_params() > max_params {
            continue;
        }
        let n = r.random_range(1..=12);
        let values = (0..spec.num_params()).map(|_| 0.8 * normal(&mut r)).collect();
        let log_tau_sq = (task == Task::Regression).then(|| r.random_range(-2.0..1.0));
        let params = ParamVector::new(&spec, values, log_tau_sq).unwrap();
        let features =
            Matrix::from_vec(n, input, (0..n * input).map(|_| r.random_range(-1.0..1.5)).collect()).unwrap();
        let targets = match task {
            Task::Regression => Targets::Real(
                Matrix::from_vec(n, output, (0..n * output).map(|_| normal(&mut r)).collect()).unwrap(),
            ),
            Task::Classification => Targets::Labels {
                labels: (0..n).map(|_| r.random_range(0..output)).collect(),
                classes: output,
            },
        };
        let names = (0..input).map(|i| format!("x{i}")).collect();
        let data = Dataset::new("random", names, features, targets).unwrap();
        return (spec, params, data);
    }
}
