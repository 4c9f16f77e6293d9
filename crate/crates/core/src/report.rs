//! Text, JSON and CSV renderings of results, and the on-disk result layout:
//!
//! ```text
//! <out>/<label>/<seed>/metrics.json    both methods, predictions, split, selection
//! <out>/<label>/<seed>/weights.json    optimized weights and training brightness
//! <out>/<label>/<seed>/trace.csv       iteration,best_brightness
//! <out>/<label>/<seed>/config.resolved
//! <out>/summary.{txt,json,csv}         medians per dataset and method
//! <out>/timing.csv                     wall time per row (not reproducible)
//! ```
//!
//! All JSON is produced by serde with shortest round-trip float formatting;
//! text cells are derived from the same `f64` values via [`sig4`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{resolved_run, RunConfig};
use crate::error::Error;
use crate::experiment::{ComparisonRow, DatasetResult, Method, SeedResult, SuiteResult, SummaryRow};
use crate::metrics::MetricsReport;

/// Formats with 4 significant figures; scientific notation outside `[1e-3, 1e5)`.
pub fn sig4(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.3e}");
    // Exponent after rounding, so 99999 counts as 1.000e5.
    let mag: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-3..5).contains(&mag) {
        return sci;
    }
    format!("{x:.*}", (3 - mag).max(0) as usize)
}

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub dataset: String,
    pub method: Method,
    pub metrics: MetricsReport,
}

impl From<&ComparisonRow> for TableRow {
    fn from(r: &ComparisonRow) -> Self {
        Self { dataset: r.dataset.clone(), method: r.method, metrics: r.metrics }
    }
}

impl From<&SummaryRow> for TableRow {
    fn from(r: &SummaryRow) -> Self {
        Self { dataset: r.dataset.clone(), method: r.method, metrics: r.metrics }
    }
}

/// Aligned table, Table-2 layout: dataset shown once per group, the lower
/// (better) value of each metric within a dataset marked with `*`.
pub fn render_table<'a>(rows: impl IntoIterator<Item = &'a TableRow>) -> String {
    let rows: Vec<&TableRow> = rows.into_iter().collect();
    let mut groups: Vec<(&str, Vec<&TableRow>)> = Vec::new();
    for r in &rows {
        match groups.iter_mut().find(|(d, _)| *d == r.dataset) {
            Some((_, g)) => g.push(r),
            None => groups.push((&r.dataset, vec![r])),
        }
    }
    let mut body: Vec<[String; 6]> = Vec::new();
    for (dataset, group) in &groups {
        let best: Vec<f64> = (0..4)
            .map(|m| group.iter().map(|r| r.metrics.values()[m]).fold(f64::INFINITY, f64::min))
            .collect();
        for (i, r) in group.iter().enumerate() {
            let vals = r.metrics.values();
            let cell = |m: usize| {
                let mark = if group.len() > 1 && vals[m] == best[m] { "*" } else { "" };
                format!("{}{mark}", sig4(vals[m]))
            };
            body.push([
                if i == 0 { dataset.to_string() } else { String::new() },
                r.method.to_string(),
                cell(0),
                cell(1),
                cell(2),
                cell(3),
            ]);
        }
    }
    let header = ["Dataset", "Method", "MMRE", "MAE", "MSE", "RMSE"].map(String::from);
    let widths: Vec<usize> =
        (0..6).map(|c| body.iter().chain([&header]).map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let line = |r: &[String; 6]| {
        let mut s = format!("{:<w0$}  {:<w1$}", r[0], r[1], w0 = widths[0], w1 = widths[1]);
        for c in 2..6 {
            s.push_str(&format!("  {:>w$}", r[c], w = widths[c]));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 10));
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
    }
    out
}

/// Grouped-bar data: one line per (dataset, method).
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("dataset,method,seeds,MMRE,MAE,MSE,RMSE\n");
    for r in rows {
        let m = r.metrics;
        out.push_str(&format!("{},{},{},{},{},{},{}\n", r.dataset, r.method, r.seeds, m.mmre, m.mae, m.mse, m.rmse));
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[derive(Serialize)]
struct WeightsFile<'a> {
    features: &'a [String],
    weights: &'a [f64],
    train_brightness: f64,
    baseline_train_brightness: f64,
    evaluations: usize,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    dataset: &'a str,
    similarity: String,
    seed: u64,
    split: crate::experiment::SplitSizes,
    selection: &'a crate::select::SelectionResult,
    actual: &'a [f64],
    rows: [&'a ComparisonRow; 2],
    predictions: Predictions<'a>,
}

#[derive(Serialize)]
struct Predictions<'a> {
    #[serde(rename = "ABE")]
    abe: &'a [f64],
    #[serde(rename = "FAABE")]
    faabe: &'a [f64],
}

/// JSON body of `metrics.json` for one seed.
pub fn seed_metrics_json(result: &DatasetResult, seed: &SeedResult) -> Result<String, Error> {
    to_json(&MetricsFile {
        dataset: &result.dataset,
        similarity: result.similarity.to_string(),
        seed: seed.seed,
        split: seed.split,
        selection: &seed.selection,
        actual: &seed.actual,
        rows: [&seed.abe.row, &seed.faabe.row],
        predictions: Predictions { abe: &seed.abe.predictions, faabe: &seed.faabe.predictions },
    })
}

pub fn seed_weights_json(seed: &SeedResult) -> Result<String, Error> {
    to_json(&WeightsFile {
        features: &seed.selection.kept,
        weights: seed.faabe.weights.as_slice(),
        train_brightness: seed.faabe.train_brightness,
        baseline_train_brightness: seed.faabe.baseline_train_brightness,
        evaluations: seed.faabe.evaluations,
    })
}

pub fn trace_csv(seed: &SeedResult) -> String {
    crate::firefly::trace_csv(&seed.faabe.trace)
}

/// Writes the per-seed artifacts of one dataset run. Returns the written paths.
pub fn write_dataset(out_dir: &Path, cfg: &RunConfig, result: &DatasetResult) -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    for seed in &result.seeds {
        let dir = out_dir.join(&result.label).join(seed.seed.to_string());
        let mut single = cfg.clone();
        single.seeds = vec![seed.seed];
        for (name, body) in [
            ("metrics.json", seed_metrics_json(result, seed)?),
            ("weights.json", seed_weights_json(seed)?),
            ("trace.csv", trace_csv(seed)),
            ("config.resolved", resolved_run(&single)),
        ] {
            let path = dir.join(name);
            write_atomic(&path, body.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    summary: &'a [SummaryRow],
    rows: Vec<&'a ComparisonRow>,
    failures: &'a [crate::experiment::SuiteFailure],
}

pub fn summary_json(suite: &SuiteResult) -> Result<String, Error> {
    let summary = suite.summary();
    to_json(&SummaryFile { summary: &summary, rows: suite.rows(), failures: &suite.failures })
}

pub fn summary_text(suite: &SuiteResult) -> String {
    let rows: Vec<TableRow> = suite.summary().iter().map(TableRow::from).collect();
    let mut out = render_table(&rows);
    for f in &suite.failures {
        out.push_str(&format!("FAILED {}: {}\n", f.label, f.error));
    }
    out
}

pub fn timing_csv(suite: &SuiteResult) -> String {
    let mut out = String::from("dataset,method,seed,wall_time_s\n");
    for r in suite.rows() {
        out.push_str(&format!("{},{},{},{:.6}\n", r.dataset, r.method, r.seed, r.wall_time));
    }
    out
}

/// Writes every run's artifacts plus `summary.{txt,json,csv}` and `timing.csv`.
pub fn write_suite(out_dir: &Path, cfgs: &[RunConfig], suite: &SuiteResult) -> Result<(), Error> {
    for result in &suite.results {
        if let Some(cfg) = cfgs.iter().find(|c| c.label() == result.label) {
            write_dataset(out_dir, cfg, result)?;
        }
    }
    write_atomic(&out_dir.join("summary.txt"), summary_text(suite).as_bytes())?;
    write_atomic(&out_dir.join("summary.json"), summary_json(suite)?.as_bytes())?;
    write_atomic(&out_dir.join("summary.csv"), summary_csv(&suite.summary()).as_bytes())?;
    write_atomic(&out_dir.join("timing.csv"), timing_csv(suite).as_bytes())?;
    Ok(())
}
