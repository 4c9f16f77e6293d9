//! Built-in sanity checks run by `faabe self-test`.

use crate::abe::{self, AbeConfig, SimilarityKind, SolutionKind, WeightVector};
use crate::dataset::{FeatureValue, Project};
use crate::firefly;
use crate::metrics;
use crate::select;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn check(name: &'static str, got: f64, want: f64) -> Check {
    Check { name, passed: close(got, want), detail: format!("got {got}, expected {want}") }
}

fn value(r: Result<f64, crate::error::ModelError>) -> f64 {
    r.unwrap_or(f64::NAN)
}

pub fn run() -> Vec<Check> {
    let nominal = |s: &str| FeatureValue::Nominal(s.into());
    let p = Project::numeric(&[0.3, 0.6], 1.0);
    let a = Project::numeric(&[3.0], 1.0);
    let b = Project::numeric(&[1.0], 1.0);
    let iwm_base = vec![Project::numeric(&[0.0], 100.0), Project::numeric(&[0.0], 200.0)];
    let iwm_query = Project::numeric(&[0.0], 1.0);
    let m = metrics::compute_metrics(&[10.0, 20.0], &[20.0, 10.0]);
    let split = metrics::make_split(15, 1);

    vec![
        check("numeric distance", value(abe::feature_distance(&FeatureValue::Numeric(0.7), &FeatureValue::Numeric(0.2))), 0.5),
        check("nominal distance (equal)", value(abe::feature_distance(&nominal("org"), &nominal("org"))), 0.0),
        check("nominal distance (unequal)", value(abe::feature_distance(&nominal("org"), &nominal("semi"))), 1.0),
        check("euclidean self-similarity", value(abe::similarity(&p, &p, &WeightVector::ones(2), SimilarityKind::Euclidean)), 100.0),
        check("manhattan self-similarity", value(abe::similarity(&p, &p, &WeightVector::ones(2), SimilarityKind::Manhattan)), 10000.0),
        check("euclidean similarity 3 vs 1", value(abe::similarity(&a, &b, &WeightVector::ones(1), SimilarityKind::Euclidean)), 1.0 / 2.0001f64.sqrt()),
        check(
            "inverse weighted mean",
            value(abe::estimate(&iwm_query, &iwm_base, &WeightVector::ones(1), &AbeConfig { k_analogies: 2, solution: SolutionKind::InverseWeightedMean, ..AbeConfig::default() })),
            150.0,
        ),
        check("pearson textbook", select::pearson(&[1., 2., 3., 4.], &[2., 4., 5., 4.]).ok().flatten().unwrap_or(f64::NAN), 0.7181848464596079),
        check("firefly distance", value(firefly::firefly_distance(&[0.2, 0.5, 0.9], &[0.7, 0.1, 0.3])), 0.77f64.sqrt()),
        check("MMRE swapped pair", m.as_ref().map(|m| m.mmre).unwrap_or(f64::NAN), 0.75),
        check("RMSE swapped pair", m.as_ref().map(|m| m.rmse).unwrap_or(f64::NAN), 10.0),
        check("Kemerer-size test split", split.as_ref().map(|s| s.test.len() as f64).unwrap_or(f64::NAN), 5.0),
    ]
}
