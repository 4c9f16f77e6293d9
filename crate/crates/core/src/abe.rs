//! Analogy-based estimation: weighted similarity, analogy retrieval and the
//! solution functions that turn retrieved analogies into an effort estimate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureValue, Project};
use crate::error::ModelError;
use crate::stats;

/// Floor added under the similarity denominator.
pub const DELTA: f64 = 1e-4;

/// Per-feature similarity weights, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(0.0..=1.0).contains(*w)) {
            return Err(ModelError::InvalidWeights(format!("w[{i}] = {w} outside [0, 1]")));
        }
        Ok(Self(weights))
    }

    pub fn ones(dim: usize) -> Self {
        Self(vec![1.0; dim])
    }

    /// Clamps each component into `[0, 1]`. NaN becomes 0.
    pub fn clamped(weights: Vec<f64>) -> Self {
        Self(weights.into_iter().map(|w| if w.is_nan() { 0.0 } else { w.clamp(0.0, 1.0) }).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Euclidean,
    Manhattan,
}

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 2] = [SimilarityKind::Euclidean, SimilarityKind::Manhattan];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityKind::Euclidean => "euclidean",
            SimilarityKind::Manhattan => "manhattan",
        }
    }

    /// Similarity from an already weighted distance sum.
    pub fn from_weighted_sum(self, sum: f64) -> f64 {
        match self {
            SimilarityKind::Euclidean => 1.0 / (sum + DELTA).sqrt(),
            SimilarityKind::Manhattan => 1.0 / (sum + DELTA),
        }
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            _ => Err(format!("unknown similarity `{s}` (expected euclidean|manhattan)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionKind {
    #[serde(rename = "closest")]
    ClosestAnalogy,
    #[serde(rename = "mean")]
    Mean,
    #[serde(rename = "median")]
    Median,
    #[serde(rename = "iwm")]
    InverseWeightedMean,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 4] = [
        SolutionKind::ClosestAnalogy,
        SolutionKind::Mean,
        SolutionKind::Median,
        SolutionKind::InverseWeightedMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolutionKind::ClosestAnalogy => "closest",
            SolutionKind::Mean => "mean",
            SolutionKind::Median => "median",
            SolutionKind::InverseWeightedMean => "iwm",
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolutionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "closest" => Ok(Self::ClosestAnalogy),
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            "iwm" => Ok(Self::InverseWeightedMean),
            _ => Err(format!("unknown solution `{s}` (expected closest|mean|median|iwm)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbeConfig {
    pub similarity: SimilarityKind,
    pub solution: SolutionKind,
    pub k_analogies: usize,
}

impl Default for AbeConfig {
    fn default() -> Self {
        Self { similarity: SimilarityKind::Euclidean, solution: SolutionKind::InverseWeightedMean, k_analogies: 3 }
    }
}

/// Per-feature distance: absolute difference for numeric/ordinal values,
/// 0/1 equality for nominal ones.
pub fn feature_distance(a: &FeatureValue, b: &FeatureValue) -> Result<f64, ModelError> {
    distance_at(0, a, b)
}

fn distance_at(index: usize, a: &FeatureValue, b: &FeatureValue) -> Result<f64, ModelError> {
    match (a, b) {
        (FeatureValue::Numeric(x), FeatureValue::Numeric(y)) => Ok((x - y).abs()),
        (FeatureValue::Nominal(x), FeatureValue::Nominal(y)) => Ok(if x == y { 0.0 } else { 1.0 }),
        _ => Err(ModelError::KindMismatch { index }),
    }
}

/// `Σ w_i · Dis(a_i, a'_i)`.
pub fn weighted_distance(p: &Project, q: &Project, w: &WeightVector) -> Result<f64, ModelError> {
    let d = w.len();
    for found in [p.values.len(), q.values.len()] {
        if found != d {
            return Err(ModelError::SchemaMismatch { expected: d, found });
        }
    }
    p.values
        .iter()
        .zip(&q.values)
        .zip(w.as_slice())
        .enumerate()
        .try_fold(0.0, |acc, (i, ((a, b), wi))| Ok(acc + wi * distance_at(i, a, b)?))
}

/// Euclidean: `1/sqrt(Σ w·Dis + δ)`; Manhattan: `1/(Σ w·Dis + δ)`.
///
/// The Euclidean form takes the root of the weighted absolute differences;
/// `Dis` is not squared.
pub fn similarity(p: &Project, q: &Project, w: &WeightVector, kind: SimilarityKind) -> Result<f64, ModelError> {
    Ok(kind.from_weighted_sum(weighted_distance(p, q, w)?))
}

#[derive(Debug, Clone, Copy)]
pub struct Neighbor<'a> {
    pub project: &'a Project,
    /// Position in the case base.
    pub index: usize,
    pub similarity: f64,
}

/// The `k` most similar case-base projects, most similar first. Ties go to
/// the lower case-base index.
pub fn retrieve_analogies<'a>(
    p: &Project,
    case_base: &'a [Project],
    w: &WeightVector,
    cfg: &AbeConfig,
) -> Result<Vec<Neighbor<'a>>, ModelError> {
    if cfg.k_analogies == 0 {
        return Err(ModelError::ZeroK);
    }
    if case_base.is_empty() {
        return Err(ModelError::EmptyCaseBase);
    }
    if cfg.k_analogies > case_base.len() {
        return Err(ModelError::TooFewCases { k: cfg.k_analogies, size: case_base.len() });
    }
    let mut scored = Vec::with_capacity(case_base.len());
    for (index, q) in case_base.iter().enumerate() {
        if std::ptr::eq(p, q) {
            return Err(ModelError::SelfMatch);
        }
        scored.push((similarity(p, q, w, cfg.similarity)?, index));
    }
    let order = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    let k = cfg.k_analogies;
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, order);
        scored.truncate(k);
    }
    scored.sort_unstable_by(order);
    Ok(scored
        .into_iter()
        .map(|(similarity, index)| Neighbor { project: &case_base[index], index, similarity })
        .collect())
}

/// Aggregates neighbour efforts. Neighbours are expected most-similar first,
/// as returned by [`retrieve_analogies`].
pub fn solve(neighbors: &[Neighbor<'_>], kind: SolutionKind) -> Result<f64, ModelError> {
    if neighbors.is_empty() {
        return Err(ModelError::EmptyNeighbors);
    }
    let efforts: Vec<f64> = neighbors.iter().map(|n| n.project.effort).collect();
    let estimate = match kind {
        SolutionKind::ClosestAnalogy => {
            let best = neighbors
                .iter()
                .enumerate()
                .fold(0, |best, (i, n)| if n.similarity > neighbors[best].similarity { i } else { best });
            efforts[best]
        }
        SolutionKind::Mean => stats::mean(&efforts).expect("non-empty"),
        SolutionKind::Median => stats::median(&efforts).expect("non-empty"),
        SolutionKind::InverseWeightedMean => {
            let total: f64 = neighbors.iter().map(|n| n.similarity).sum();
            neighbors.iter().map(|n| n.similarity / total * n.project.effort).sum()
        }
    };
    Ok(estimate)
}

pub fn estimate(p: &Project, case_base: &[Project], w: &WeightVector, cfg: &AbeConfig) -> Result<f64, ModelError> {
    solve(&retrieve_analogies(p, case_base, w, cfg)?, cfg.solution)
}
