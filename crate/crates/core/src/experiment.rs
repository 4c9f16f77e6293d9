//! Baseline ABE vs firefly-weighted ABE on one holdout split, repeated over
//! seeds and datasets.
//!
//! Per seed: split → min-max scaling fitted on non-test rows → correlation
//! filter on non-test rows → (baseline) all-ones weights, or (FAABE) weights
//! optimized on the basic/train objective → estimate every test project from
//! the non-test case base → metrics. Both methods share the split, scaling
//! and selected features; only the weights differ.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abe::{self, SimilarityKind, WeightVector};
use crate::config::RunConfig;
use crate::dataset::{self, Dataset, MinMaxScaler, Project};
use crate::error::{Error, ModelError};
use crate::firefly::{self, FitnessObjective, Objective};
use crate::metrics::{self, MetricsReport, Split};
use crate::select::{self, SelectionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ABE")]
    Abe,
    #[serde(rename = "FAABE")]
    Faabe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Abe => "ABE",
            Method::Faabe => "FAABE",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One (dataset, method, seed) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dataset: String,
    pub similarity: SimilarityKind,
    pub method: Method,
    pub seed: u64,
    pub metrics: MetricsReport,
    /// Seconds. Kept out of JSON artifacts so they stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// A split with its fitted preprocessing: the dataset is scaled and reduced
/// to the selected features.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub data: Dataset,
    pub split: Split,
    pub selection: SelectionResult,
}

impl Prepared {
    pub fn new(d: &Dataset, cfg: &RunConfig, seed: u64) -> Result<Self, Error> {
        let split = metrics::make_split(d.len(), seed)?;
        let non_test = split.non_test();
        let scaled =
            if d.normalized { d.clone() } else { MinMaxScaler::fit(d, &non_test).apply(d)? };
        let selection = select::select_features_on(&scaled, &non_test, cfg.corr_threshold);
        let data = scaled.project_features(&selection.kept_indices);
        Ok(Self { data, split, selection })
    }

    pub fn dim(&self) -> usize {
        self.data.schema.k()
    }

    /// Case base used for test estimates.
    pub fn test_case_base(&self, strict_basic: bool) -> Vec<Project> {
        if strict_basic {
            self.data.rows(&self.split.basic)
        } else {
            self.data.rows(&self.split.non_test())
        }
    }

    pub fn objective(&self, cfg: &RunConfig) -> Result<FitnessObjective, ModelError> {
        Ok(FitnessObjective::from_rows(&self.data, &self.split.basic, &self.split.train, cfg.abe)?
            .with_parallel(cfg.parallel))
    }

    pub fn actual(&self) -> Vec<f64> {
        self.split.test.iter().map(|&i| self.data.projects[i].effort).collect()
    }

    /// Estimates every test project with weights `w`.
    pub fn predict(&self, w: &WeightVector, cfg: &RunConfig) -> Result<Vec<f64>, ModelError> {
        let base = self.test_case_base(cfg.strict_basic);
        let queries = self.data.rows(&self.split.test);
        let one = |p: &Project| abe::estimate(p, &base, w, &cfg.abe);
        if cfg.parallel {
            queries.par_iter().map(one).collect()
        } else {
            queries.iter().map(one).collect()
        }
    }
}

/// Seed of the optimizer derived from the split seed.
pub fn fa_seed(seed: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub row: ComparisonRow,
    pub predictions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaabeOutcome {
    pub row: ComparisonRow,
    pub predictions: Vec<f64>,
    pub weights: WeightVector,
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Training-objective brightness of the optimized weights.
    pub train_brightness: f64,
    /// Training-objective brightness of all-ones weights (the baseline).
    pub baseline_train_brightness: f64,
}

fn row(cfg: &RunConfig, d: &Dataset, method: Method, seed: u64, metrics: MetricsReport, started: Instant) -> ComparisonRow {
    ComparisonRow {
        dataset: d.name.clone(),
        similarity: cfg.abe.similarity,
        method,
        seed,
        metrics,
        wall_time: started.elapsed().as_secs_f64(),
    }
}

fn baseline_on(p: &Prepared, d: &Dataset, cfg: &RunConfig, seed: u64, started: Instant) -> Result<MethodOutcome, Error> {
    let predictions = p.predict(&WeightVector::ones(p.dim()), cfg)?;
    let metrics = metrics::compute_metrics(&p.actual(), &predictions)?;
    Ok(MethodOutcome { row: row(cfg, d, Method::Abe, seed, metrics, started), predictions })
}

fn faabe_on(p: &Prepared, d: &Dataset, cfg: &RunConfig, seed: u64, started: Instant) -> Result<FaabeOutcome, Error> {
    let objective = p.objective(cfg)?;
    let ones = WeightVector::ones(p.dim());
    let fa_cfg = firefly::FaConfig { seed: fa_seed(seed), ..cfg.fa };
    let outcome = firefly::optimize_seeded(&objective, &fa_cfg, std::slice::from_ref(&ones))?;
    let baseline_train_brightness = objective.brightness(&ones)?;
    let weights = outcome.best.position;
    let predictions = p.predict(&weights, cfg)?;
    let metrics = metrics::compute_metrics(&p.actual(), &predictions)?;
    Ok(FaabeOutcome {
        row: row(cfg, d, Method::Faabe, seed, metrics, started),
        predictions,
        weights,
        trace: outcome.trace,
        evaluations: outcome.evaluations,
        train_brightness: outcome.best.brightness,
        baseline_train_brightness,
    })
}

/// Unweighted ABE (all weights 1) on the seed's split.
pub fn run_baseline_abe(d: &Dataset, cfg: &RunConfig, seed: u64) -> Result<MethodOutcome, Error> {
    let started = Instant::now();
    baseline_on(&Prepared::new(d, cfg, seed)?, d, cfg, seed, started)
}

/// Firefly-weighted ABE on the seed's split. The all-ones vector is one of
/// the initial fireflies.
pub fn run_faabe(d: &Dataset, cfg: &RunConfig, seed: u64) -> Result<FaabeOutcome, Error> {
    let started = Instant::now();
    faabe_on(&Prepared::new(d, cfg, seed)?, d, cfg, seed, started)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub basic: usize,
    pub train: usize,
    pub test: usize,
}

/// Paired baseline and FAABE results for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub split: SplitSizes,
    pub selection: SelectionResult,
    pub actual: Vec<f64>,
    pub abe: MethodOutcome,
    pub faabe: FaabeOutcome,
}

pub fn run_pair(d: &Dataset, cfg: &RunConfig, seed: u64) -> Result<SeedResult, Error> {
    let started = Instant::now();
    let prepared = Prepared::new(d, cfg, seed)?;
    let prep_time = started.elapsed();
    let abe = baseline_on(&prepared, d, cfg, seed, started)?;
    let faabe = faabe_on(&prepared, d, cfg, seed, Instant::now() - prep_time)?;
    Ok(SeedResult {
        seed,
        split: SplitSizes {
            basic: prepared.split.basic.len(),
            train: prepared.split.train.len(),
            test: prepared.split.test.len(),
        },
        selection: prepared.selection.clone(),
        actual: prepared.actual(),
        abe,
        faabe,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResult {
    pub label: String,
    pub dataset: String,
    pub similarity: SimilarityKind,
    pub seeds: Vec<SeedResult>,
}

impl DatasetResult {
    pub fn rows(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.seeds.iter().flat_map(|s| [&s.abe.row, &s.faabe.row])
    }

    /// Per-metric medians across seeds for one method.
    pub fn median(&self, method: Method) -> MetricsReport {
        let pick = |f: fn(&MetricsReport) -> f64| {
            let v: Vec<f64> = self
                .seeds
                .iter()
                .map(|s| match method {
                    Method::Abe => f(&s.abe.row.metrics),
                    Method::Faabe => f(&s.faabe.row.metrics),
                })
                .collect();
            crate::stats::median(&v).unwrap_or(f64::NAN)
        };
        MetricsReport {
            mmre: pick(|m| m.mmre),
            mae: pick(|m| m.mae),
            mse: pick(|m| m.mse),
            rmse: pick(|m| m.rmse),
            n: self.seeds.first().map_or(0, |s| s.actual.len()),
        }
    }
}

/// Runs every seed of `cfg` on an already loaded dataset. Seeds run
/// concurrently when `cfg.parallel` is set; output order follows `cfg.seeds`.
pub fn run_dataset_on(d: &Dataset, cfg: &RunConfig) -> Result<DatasetResult, Error> {
    let seeds: Vec<SeedResult> = if cfg.parallel {
        cfg.seeds.par_iter().map(|&s| run_pair(d, cfg, s)).collect::<Result<_, _>>()?
    } else {
        cfg.seeds.iter().map(|&s| run_pair(d, cfg, s)).collect::<Result<_, _>>()?
    };
    Ok(DatasetResult { label: cfg.label(), dataset: d.name.clone(), similarity: cfg.abe.similarity, seeds })
}

pub fn run_dataset(cfg: &RunConfig) -> Result<DatasetResult, Error> {
    cfg.validate()?;
    let d = dataset::load_named(&cfg.dataset, &cfg.data_dir)?;
    run_dataset_on(&d, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub results: Vec<DatasetResult>,
    pub failures: Vec<SuiteFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub method: Method,
    pub seeds: usize,
    /// Medians over seeds.
    pub metrics: MetricsReport,
}

impl SuiteResult {
    pub fn rows(&self) -> Vec<&ComparisonRow> {
        self.results.iter().flat_map(|r| r.rows()).collect()
    }

    /// Median per (dataset, method), ABE before FAABE.
    pub fn summary(&self) -> Vec<SummaryRow> {
        self.results
            .iter()
            .flat_map(|r| {
                [Method::Abe, Method::Faabe].map(|m| SummaryRow {
                    dataset: r.label.clone(),
                    method: m,
                    seeds: r.seeds.len(),
                    metrics: r.median(m),
                })
            })
            .collect()
    }
}

/// Runs all configurations; a failing dataset is recorded and the rest continue.
pub fn run_suite(cfgs: &[RunConfig]) -> SuiteResult {
    let outcomes: Vec<(String, Result<DatasetResult, Error>)> =
        cfgs.par_iter().map(|c| (c.label(), run_dataset(c))).collect();
    let mut suite = SuiteResult { results: Vec::new(), failures: Vec::new() };
    for (label, outcome) in outcomes {
        match outcome {
            Ok(r) => suite.results.push(r),
            Err(e) => suite.failures.push(SuiteFailure { label, error: e.to_string() }),
        }
    }
    suite
}
