//! Dataset model, CSV/manifest ingestion, descriptive statistics and min-max
//! normalization.
//!
//! A dataset ships as two files: `<name>.csv` (header row, one project per
//! line) and `<name>.manifest`, a small `key = value` file:
//!
//! ```text
//! # comments start with '#'
//! name    = kemerer            # optional, defaults to the file stem
//! effort  = EffortMM           # required, the dependent variable
//! nominal = Language,Hardware  # compared by equality only
//! ordinal = Rating             # numeric codes, treated numerically
//! ignore  = ID                 # columns dropped at load
//! ```
//!
//! Every other column is numeric. Rows with missing values (`""` or `?`) are
//! rejected, there is no imputation.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    /// Numeric codes of an ordered scale; distances use the codes.
    Ordinal,
    /// Unordered categories; distance is 0 when equal and 1 otherwise.
    Nominal,
}

impl FeatureKind {
    pub fn is_numeric(self) -> bool {
        !matches!(self, FeatureKind::Nominal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
}

/// Independent features plus the name of the effort column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<Feature>,
    pub effort_column: String,
}

impl FeatureSchema {
    pub fn new(features: Vec<Feature>, effort_column: impl Into<String>) -> Result<Self, DataError> {
        let effort_column = effort_column.into();
        let mut seen = HashSet::new();
        for name in features.iter().map(|f| f.name.as_str()).chain([effort_column.as_str()]) {
            if !seen.insert(name) {
                return Err(DataError::DuplicateColumn { column: name.to_string() });
            }
        }
        Ok(Self { features, effort_column })
    }

    /// Number of independent features.
    pub fn k(&self) -> usize {
        self.features.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureValue {
    Numeric(f64),
    Nominal(String),
}

impl FeatureValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            FeatureValue::Numeric(v) => Some(*v),
            FeatureValue::Nominal(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Numeric(v) => write!(f, "{v}"),
            FeatureValue::Nominal(s) => f.write_str(s),
        }
    }
}

/// One historical project: feature values in schema order and its known effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub values: Vec<FeatureValue>,
    pub effort: f64,
}

impl Project {
    pub fn new(values: Vec<FeatureValue>, effort: f64) -> Self {
        Self { values, effort }
    }

    /// Convenience constructor for all-numeric projects.
    pub fn numeric(values: &[f64], effort: f64) -> Self {
        Self::new(values.iter().copied().map(FeatureValue::Numeric).collect(), effort)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub schema: FeatureSchema,
    pub projects: Vec<Project>,
    pub normalized: bool,
}

impl Dataset {
    /// Builds a dataset after checking every project against the schema.
    pub fn new(name: impl Into<String>, schema: FeatureSchema, projects: Vec<Project>) -> Result<Self, DataError> {
        if projects.is_empty() {
            return Err(DataError::NoProjects);
        }
        for (row, p) in projects.iter().enumerate() {
            if p.values.len() != schema.k() {
                return Err(DataError::RowLength { row: row + 1, expected: schema.k(), found: p.values.len() });
            }
            for (f, v) in schema.features.iter().zip(&p.values) {
                if matches!(v, FeatureValue::Nominal(_)) == f.kind.is_numeric() {
                    return Err(DataError::NonNumeric { row: row + 1, column: f.name.clone(), token: v.to_string() });
                }
            }
            if !(p.effort.is_finite() && p.effort > 0.0) {
                return Err(DataError::NonPositiveEffort {
                    row: row + 1,
                    column: schema.effort_column.clone(),
                    value: p.effort,
                });
            }
        }
        Ok(Self { name: name.into(), schema, projects, normalized: false })
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn efforts(&self) -> Vec<f64> {
        self.projects.iter().map(|p| p.effort).collect()
    }

    /// Values of one numeric feature, `None` for nominal features.
    pub fn column(&self, feature: usize) -> Option<Vec<f64>> {
        self.projects.iter().map(|p| p.values[feature].as_f64()).collect()
    }

    /// Keeps only the given feature columns, in the given order.
    pub fn project_features(&self, keep: &[usize]) -> Dataset {
        let features = keep.iter().map(|&i| self.schema.features[i].clone()).collect();
        let projects = self
            .projects
            .iter()
            .map(|p| Project::new(keep.iter().map(|&i| p.values[i].clone()).collect(), p.effort))
            .collect();
        Dataset {
            name: self.name.clone(),
            schema: FeatureSchema { features, effort_column: self.schema.effort_column.clone() },
            projects,
            normalized: self.normalized,
        }
    }

    pub fn rows(&self, indices: &[usize]) -> Vec<Project> {
        indices.iter().map(|&i| self.projects[i].clone()).collect()
    }

    /// Manifest that reproduces this dataset's schema when reloading its CSV.
    pub fn manifest(&self) -> Manifest {
        let by_kind = |kind| {
            self.schema.features.iter().filter(|f| f.kind == kind).map(|f| f.name.clone()).collect()
        };
        Manifest {
            name: Some(self.name.clone()),
            effort: self.schema.effort_column.clone(),
            nominal: by_kind(FeatureKind::Nominal),
            ordinal: by_kind(FeatureKind::Ordinal),
            ignore: Vec::new(),
        }
    }

    /// Writes the dataset as CSV: features in schema order, effort last.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<&str> = self.schema.names().chain([self.schema.effort_column.as_str()]).collect();
        w.write_record(&header)?;
        for p in &self.projects {
            let mut record: Vec<String> = p.values.iter().map(|v| v.to_string()).collect();
            record.push(p.effort.to_string());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| DataError::Csv(e.into()))?;
        Ok(())
    }
}

/// Parsed `<name>.manifest` file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub name: Option<String>,
    pub effort: String,
    pub nominal: Vec<String>,
    pub ordinal: Vec<String>,
    pub ignore: Vec<String>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut m = Manifest::default();
        let mut effort = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| DataError::Manifest { line: idx + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let value = value.trim();
            let list = || value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>();
            match key.trim() {
                "name" => m.name = Some(value.to_string()),
                "effort" if value.is_empty() => return Err(err("effort column is empty".into())),
                "effort" => effort = Some(value.to_string()),
                "nominal" => m.nominal.extend(list()),
                "ordinal" => m.ordinal.extend(list()),
                "ignore" => m.ignore.extend(list()),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        m.effort = effort.ok_or(DataError::Manifest { line: 0, message: "missing `effort = <column>`".into() })?;
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self, DataError> {
        let text = fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    fn kind_of(&self, column: &str) -> FeatureKind {
        if self.nominal.iter().any(|c| c == column) {
            FeatureKind::Nominal
        } else if self.ordinal.iter().any(|c| c == column) {
            FeatureKind::Ordinal
        } else {
            FeatureKind::Numeric
        }
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "name = {name}")?;
        }
        writeln!(f, "effort = {}", self.effort)?;
        for (key, cols) in [("nominal", &self.nominal), ("ordinal", &self.ordinal), ("ignore", &self.ignore)] {
            if !cols.is_empty() {
                writeln!(f, "{key} = {}", cols.join(","))?;
            }
        }
        Ok(())
    }
}

fn is_missing(token: &str) -> bool {
    token.is_empty() || token == "?"
}

/// Loads a dataset from CSV text. Row numbers in errors count data rows from 1.
pub fn load_csv_from<R: Read>(name: &str, reader: R, manifest: &Manifest) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(DataError::DuplicateColumn { column: h.clone() });
        }
    }
    for col in std::iter::once(&manifest.effort)
        .chain(&manifest.nominal)
        .chain(&manifest.ordinal)
        .chain(&manifest.ignore)
    {
        if !header.contains(col) {
            return Err(DataError::UnknownColumn { column: col.clone() });
        }
    }
    let effort_idx = header.iter().position(|h| *h == manifest.effort).expect("checked above");
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&i| i != effort_idx && !manifest.ignore.contains(&header[i]))
        .collect();
    let features = feature_cols
        .iter()
        .map(|&i| Feature { name: header[i].clone(), kind: manifest.kind_of(&header[i]) })
        .collect();
    let schema = FeatureSchema::new(features, manifest.effort.clone())?;

    let mut projects = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != header.len() {
            return Err(DataError::RowLength { row, expected: header.len(), found: record.len() });
        }
        let mut values = Vec::with_capacity(feature_cols.len());
        for (&col, feature) in feature_cols.iter().zip(&schema.features) {
            let token = &record[col];
            if is_missing(token) {
                return Err(DataError::MissingValue { row, column: feature.name.clone() });
            }
            let value = if feature.kind.is_numeric() {
                FeatureValue::Numeric(parse_number(token).ok_or_else(|| DataError::NonNumeric {
                    row,
                    column: feature.name.clone(),
                    token: token.to_string(),
                })?)
            } else {
                FeatureValue::Nominal(token.to_string())
            };
            values.push(value);
        }
        let token = &record[effort_idx];
        if is_missing(token) {
            return Err(DataError::MissingValue { row, column: manifest.effort.clone() });
        }
        let effort = parse_number(token).ok_or_else(|| DataError::NonNumeric {
            row,
            column: manifest.effort.clone(),
            token: token.to_string(),
        })?;
        if effort <= 0.0 {
            return Err(DataError::NonPositiveEffort { row, column: manifest.effort.clone(), value: effort });
        }
        projects.push(Project::new(values, effort));
    }
    if projects.is_empty() {
        return Err(DataError::NoProjects);
    }
    let name = manifest.name.clone().unwrap_or_else(|| name.to_string());
    Ok(Dataset { name, schema, projects, normalized: false })
}

fn parse_number(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load_csv(path: &Path, manifest: &Manifest) -> Result<Dataset, DataError> {
    let file = fs::File::open(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    load_csv_from(stem, std::io::BufReader::new(file), manifest)
}

/// Resolves a dataset given either a name (looked up as `<dir>/<name>.csv`
/// with `<dir>/<name>.manifest`) or a path to a CSV file whose manifest sits
/// next to it.
pub fn resolve(name_or_path: &str, data_dir: &Path) -> Result<(PathBuf, PathBuf), DataError> {
    let as_path = Path::new(name_or_path);
    let csv_path = if as_path.extension().is_some_and(|e| e == "csv") {
        as_path.to_path_buf()
    } else {
        data_dir.join(format!("{}.csv", name_or_path.to_ascii_lowercase()))
    };
    if !csv_path.is_file() {
        return Err(DataError::NotFound(name_or_path.to_string(), csv_path));
    }
    let manifest_path = csv_path.with_extension("manifest");
    if !manifest_path.is_file() {
        return Err(DataError::NotFound(name_or_path.to_string(), manifest_path));
    }
    Ok((csv_path, manifest_path))
}

pub fn load_named(name_or_path: &str, data_dir: &Path) -> Result<Dataset, DataError> {
    let (csv_path, manifest_path) = resolve(name_or_path, data_dir)?;
    load_csv(&csv_path, &Manifest::from_file(&manifest_path)?)
}

/// Table-1 style summary of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub projects: usize,
    pub features: usize,
    pub effort_min: f64,
    pub effort_max: f64,
    pub effort_median: f64,
}

pub fn describe(d: &Dataset) -> Summary {
    let efforts = d.efforts();
    Summary {
        projects: d.len(),
        features: d.schema.k(),
        effort_min: efforts.iter().copied().fold(f64::INFINITY, f64::min),
        effort_max: efforts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        effort_median: stats::median(&efforts).unwrap_or(f64::NAN),
    }
}

impl Summary {
    pub fn to_text(&self, name: &str) -> String {
        format!(
            "{:<12} {:>8} {:>8} {:>12} {:>12} {:>12}\n{:<12} {:>8} {:>8} {:>12} {:>12} {:>12}\n",
            "dataset", "projects", "features", "effort_min", "effort_max", "effort_median",
            name, self.projects, self.features, self.effort_min, self.effort_max, self.effort_median,
        )
    }
}

/// Per-feature min/max, fitted on a subset of rows and applied to any project.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    ranges: Vec<Option<(f64, f64)>>,
}

impl MinMaxScaler {
    /// Fits min/max of each numeric feature over `rows`. Nominal features get `None`.
    pub fn fit(d: &Dataset, rows: &[usize]) -> Self {
        let ranges = d
            .schema
            .features
            .iter()
            .enumerate()
            .map(|(f, feat)| {
                feat.kind.is_numeric().then(|| {
                    rows.iter()
                        .filter_map(|&r| d.projects[r].values[f].as_f64())
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
                })
            })
            .collect();
        Self { ranges }
    }

    pub fn fit_all(d: &Dataset) -> Self {
        Self::fit(d, &(0..d.len()).collect::<Vec<_>>())
    }

    fn scale(&self, feature: usize, v: f64) -> f64 {
        match self.ranges[feature] {
            Some((lo, hi)) if hi > lo => ((v - lo) / (hi - lo)).clamp(0.0, 1.0),
            // Constant columns carry no similarity information.
            _ => 0.0,
        }
    }

    pub fn transform(&self, p: &Project) -> Project {
        let values = p
            .values
            .iter()
            .enumerate()
            .map(|(f, v)| match v {
                FeatureValue::Numeric(x) => FeatureValue::Numeric(self.scale(f, *x)),
                nominal => nominal.clone(),
            })
            .collect();
        Project::new(values, p.effort)
    }

    /// Applies the scaling to every project. Values outside the fitted range are clamped to [0,1].
    pub fn apply(&self, d: &Dataset) -> Result<Dataset, DataError> {
        if d.normalized {
            return Err(DataError::AlreadyNormalized);
        }
        Ok(Dataset {
            name: d.name.clone(),
            schema: d.schema.clone(),
            projects: d.projects.iter().map(|p| self.transform(p)).collect(),
            normalized: true,
        })
    }
}

/// Min-max normalizes every numeric feature with the dataset's own range.
/// Effort and nominal features are left untouched.
pub fn normalize(d: &Dataset) -> Result<Dataset, DataError> {
    MinMaxScaler::fit_all(d).apply(d)
}
