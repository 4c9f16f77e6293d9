//! Error metrics and the basic/train/test holdout split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub const TEST_FRACTION: f64 = 0.33;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mmre: f64,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub n: usize,
}

impl MetricsReport {
    /// Values in table column order: MMRE, MAE, MSE, RMSE.
    pub fn values(&self) -> [f64; 4] {
        [self.mmre, self.mae, self.mse, self.rmse]
    }

    pub const COLUMNS: [&'static str; 4] = ["MMRE", "MAE", "MSE", "RMSE"];
}

pub fn compute_metrics(actual: &[f64], predicted: &[f64]) -> Result<MetricsReport, ModelError> {
    if actual.len() != predicted.len() {
        return Err(ModelError::LengthMismatch(actual.len(), predicted.len()));
    }
    if actual.is_empty() {
        return Err(ModelError::TooShort { needed: 1, got: 0 });
    }
    if let Some((index, &value)) = actual.iter().enumerate().find(|(_, a)| a.is_nan() || **a <= 0.0) {
        return Err(ModelError::NonPositiveActual { index, value });
    }
    let n = actual.len() as f64;
    let (mut mre, mut abs, mut sq) = (0.0, 0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let err = a - p;
        mre += (err / a).abs();
        abs += err.abs();
        sq += err * err;
    }
    let mse = sq / n;
    Ok(MetricsReport { mmre: mre / n, mae: abs / n, mse, rmse: mse.sqrt(), n: actual.len() })
}

/// Index partition of a dataset into basic (case base), train (fitness
/// queries) and test sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub basic: Vec<usize>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl Split {
    /// `basic ∪ train`, in split order.
    pub fn non_test(&self) -> Vec<usize> {
        self.basic.iter().chain(&self.train).copied().collect()
    }
}

/// `round(fraction · n)` with halves rounded up.
pub fn test_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64 + 0.5).floor() as usize
}

/// Shuffles `0..n` with `seed`, takes the first `round(0.33 n)` as test and
/// splits the rest evenly into basic and train, basic taking the odd one.
pub fn make_split(n: usize, seed: u64) -> Result<Split, ModelError> {
    make_split_with(n, seed, TEST_FRACTION)
}

pub fn make_split_with(n: usize, seed: u64, test_fraction: f64) -> Result<Split, ModelError> {
    if n < 3 {
        return Err(ModelError::TooFewProjects(n));
    }
    let n_test = test_size(n, test_fraction);
    let rest = n - n_test.min(n);
    let n_basic = rest.div_ceil(2);
    if n_test == 0 || n_basic == 0 || rest - n_basic == 0 {
        return Err(ModelError::TooFewProjects(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = order[..n_test].to_vec();
    let basic = order[n_test..n_test + n_basic].to_vec();
    let train = order[n_test + n_basic..].to_vec();
    Ok(Split { basic, train, test, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn metric_examples() {
        let m = compute_metrics(&[10.0, 20.0], &[10.0, 20.0]).unwrap();
        assert_eq!(m.values(), [0.0; 4]);

        let m = compute_metrics(&[100.0], &[150.0]).unwrap();
        assert_eq!(m.values(), [0.5, 50.0, 2500.0, 50.0]);

        let m = compute_metrics(&[10.0, 20.0], &[20.0, 10.0]).unwrap();
        assert_eq!(m.values(), [0.75, 10.0, 100.0, 10.0]);
        assert_eq!(m.n, 2);
    }

    #[test]
    fn metric_errors() {
        assert_eq!(compute_metrics(&[1.0], &[1.0, 2.0]), Err(ModelError::LengthMismatch(1, 2)));
        assert!(matches!(compute_metrics(&[], &[]), Err(ModelError::TooShort { .. })));
        assert_eq!(
            compute_metrics(&[1.0, 0.0], &[1.0, 2.0]),
            Err(ModelError::NonPositiveActual { index: 1, value: 0.0 })
        );
        assert!(compute_metrics(&[-1.0], &[1.0]).is_err());
    }

    #[test]
    fn split_sizes() {
        let s = make_split(15, 1).unwrap();
        assert_eq!((s.test.len(), s.basic.len(), s.train.len()), (5, 5, 5));
        let a = make_split(499, 1).unwrap();
        let b = make_split(499, 2).unwrap();
        assert_eq!((a.test.len(), b.test.len()), (165, 165));
        assert_ne!(a.test, b.test);
        assert_eq!(make_split(499, 1).unwrap(), a);
        assert_eq!(make_split(24, 3).unwrap().basic.len(), 8);
    }

    #[test]
    fn split_partitions() {
        for n in [3, 4, 15, 24, 62, 64, 81, 499] {
            let s = make_split(n, n as u64).unwrap();
            let all: HashSet<usize> = s.basic.iter().chain(&s.train).chain(&s.test).copied().collect();
            assert_eq!(all.len(), n);
            assert_eq!(s.basic.len() + s.train.len() + s.test.len(), n);
            assert!(!s.basic.is_empty() && !s.train.is_empty() && !s.test.is_empty());
            assert!(s.basic.len() >= s.train.len());
            assert_eq!(s.test.len(), test_size(n, 0.33));
        }
        assert_eq!(make_split(2, 0), Err(ModelError::TooFewProjects(2)));
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(test_size(3, 0.5), 2);
        assert_eq!(test_size(5, 0.5), 3);
        assert_eq!(test_size(15, 0.33), 5);
    }
}
