//! Correlation-based filter feature selection.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::ModelError;

pub const DEFAULT_CORR_THRESHOLD: f64 = 0.5;

/// Sample Pearson correlation. `Ok(None)` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(ModelError::TooShort { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub name: String,
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub kept: Vec<String>,
    /// Schema indices of `kept`, ascending.
    pub kept_indices: Vec<usize>,
    pub dropped: Vec<DroppedFeature>,
    pub threshold: f64,
}

/// Selects features using all rows of `d`.
pub fn select_features(d: &Dataset, threshold: f64) -> SelectionResult {
    select_features_on(d, &(0..d.len()).collect::<Vec<_>>(), threshold)
}

/// Keeps numeric/ordinal features with `|r| >= threshold` against effort,
/// computed over `rows` only. Nominal features are always kept. If nothing
/// survives, the feature with the largest `|r|` is kept (the first feature
/// when every correlation is undefined).
pub fn select_features_on(d: &Dataset, rows: &[usize], threshold: f64) -> SelectionResult {
    let effort: Vec<f64> = rows.iter().map(|&r| d.projects[r].effort).collect();
    let correlations: Vec<Option<f64>> = d
        .schema
        .features
        .iter()
        .enumerate()
        .map(|(f, feat)| {
            if !feat.kind.is_numeric() {
                return None;
            }
            let col: Vec<f64> = rows.iter().filter_map(|&r| d.projects[r].values[f].as_f64()).collect();
            pearson(&col, &effort).ok().flatten()
        })
        .collect();

    let mut keep: Vec<bool> = d
        .schema
        .features
        .iter()
        .zip(&correlations)
        .map(|(feat, r)| !feat.kind.is_numeric() || r.is_some_and(|r| r.abs() >= threshold))
        .collect();

    if !keep.iter().any(|&k| k) && !keep.is_empty() {
        let best = correlations
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (i, r.abs())))
            .fold(None, |acc: Option<(usize, f64)>, (i, a)| match acc {
                Some((_, b)) if b >= a => acc,
                _ => Some((i, a)),
            })
            .map_or(0, |(i, _)| i);
        keep[best] = true;
    }

    let mut result = SelectionResult { kept: Vec::new(), kept_indices: Vec::new(), dropped: Vec::new(), threshold };
    for (i, feat) in d.schema.features.iter().enumerate() {
        if keep[i] {
            result.kept.push(feat.name.clone());
            result.kept_indices.push(i);
        } else {
            result.dropped.push(DroppedFeature { name: feat.name.clone(), correlation: correlations[i] });
        }
    }
    result
}
