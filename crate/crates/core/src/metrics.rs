//! RMSE, accuracy, ROC curves and trapezoidal AUC.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::shape("metric inputs", a, b));
    }
    if a == 0 {
        return Err(Error::Insufficient("metric over zero points".into()));
    }
    Ok(())
}

pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_lengths(targets.len(), predictions.len())?;
    let mse = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (t - p) * (t - p))
        .sum::<f64>()
        / targets.len() as f64;
    Ok(math::sqrt(mse))
}

/// Percentage of matching labels, in `[0, 100]`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    let correct = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(100.0 * correct as f64 / truth.len() as f64)
}

/// ROC points from `(0, 0)` to `(1, 1)` as `(fpr, tpr)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub class_index: usize,
}

/// Sweeps the threshold down through the distinct scores; points with
/// equal scores enter the curve together as one step.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    check_lengths(labels.len(), scores.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numeric("roc scores"));
    }
    let pos = labels.iter().filter(|l| **l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve {
        points,
        class_index: 0,
    })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// One-vs-all ROC per class, scoring by the class probability column.
/// Classes absent from (or making up all of) `labels` get `None`.
pub fn one_vs_all_roc(probabilities: &Matrix, labels: &[usize]) -> Result<Vec<Option<RocCurve>>> {
    check_lengths(probabilities.rows(), labels.len())?;
    let mut curves = Vec::with_capacity(probabilities.cols());
    for k in 0..probabilities.cols() {
        let scores = probabilities.column(k);
        let binary: Vec<bool> = labels.iter().map(|&l| l == k).collect();
        match roc_curve(&scores, &binary) {
            Ok(mut c) => {
                c.class_index = k;
                curves.push(Some(c));
            }
            Err(Error::DegenerateLabels) => curves.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - libm::sqrt(12.5)).abs() < 1e-15);
        assert!(rmse(&[0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2], &[1, 2]).unwrap(), 100.0);
        assert!((accuracy(&[0, 0, 0], &[0, 1, 2]).unwrap() - 100.0 / 3.0).abs() < 1e-12);
        assert!(matches!(accuracy(&[], &[]), Err(Error::Insufficient(_))));
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn perfect_separation() {
        let c = roc_curve(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert!(c.points.contains(&(0.0, 1.0)));
        assert_eq!(auc(&c), 1.0);
    }

    #[test]
    fn constant_scores_give_diagonal() {
        let c = roc_curve(&[0.5; 4], &[true, false, true, false]).unwrap();
        assert_eq!(c.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auc(&c), 0.5);
    }

    #[test]
    fn four_point_case() {
        let c = roc_curve(&[0.9, 0.4, 0.3, 0.1], &[true, false, true, false]).unwrap();
        assert_eq!(
            c.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert_eq!(auc(&c), 0.75);
    }

    #[test]
    fn single_class_rejected() {
        assert_eq!(roc_curve(&[0.1, 0.2], &[true, true]).unwrap_err(), Error::DegenerateLabels);
    }

    #[test]
    fn one_vs_all_marks_missing_classes() {
        let p = Matrix::from_rows(&[[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.6, 0.3, 0.1]]).unwrap();
        let curves = one_vs_all_roc(&p, &[0, 1, 0]).unwrap();
        assert_eq!(curves.len(), 3);
        assert_eq!(curves[1].as_ref().unwrap().class_index, 1);
        assert!(curves[2].is_none());
        assert_eq!(auc(curves[0].as_ref().unwrap()), 1.0);
    }
}
