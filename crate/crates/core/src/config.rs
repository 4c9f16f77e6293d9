//! Run configuration and its plain-text `key = value` file format.
//!
//! ```text
//! # suite.conf
//! datasets       = cocomo81,desharnais,china,albrecht,kemerer,maxwell
//! data_dir       = data
//! similarity     = euclidean          # or a list: euclidean,manhattan
//! solution       = iwm
//! k              = 3
//! corr_threshold = 0.5
//! pop            = 20
//! iters          = 50
//! gamma          = 1.0
//! alpha          = 0.2
//! alpha_decay    = 0.97
//! beta0          = 1.0
//! seed           = 1                  # first seed; seeds = seed..seed+repeats
//! repeats        = 10
//! # seeds        = 3,17,99            # explicit list instead of seed/repeats
//! strict_basic   = false
//! parallel       = true
//! ```
//!
//! The same keys are accepted as CLI overrides, and every run writes the
//! fully resolved configuration next to its results.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::abe::{AbeConfig, SimilarityKind, SolutionKind};
use crate::error::ConfigError;
use crate::firefly::FaConfig;
use crate::select::DEFAULT_CORR_THRESHOLD;

pub const DATASETS: [&str; 6] = ["cocomo81", "desharnais", "china", "albrecht", "kemerer", "maxwell"];

/// Settings of one dataset run (all its seeds).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: String,
    pub data_dir: PathBuf,
    pub abe: AbeConfig,
    pub fa: FaConfig,
    pub corr_threshold: f64,
    pub seeds: Vec<u64>,
    /// Test-time case base is the basic set only instead of basic ∪ train.
    pub strict_basic: bool,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: String::new(),
            data_dir: PathBuf::from("data"),
            abe: AbeConfig::default(),
            fa: FaConfig::default(),
            corr_threshold: DEFAULT_CORR_THRESHOLD,
            seeds: (1..=10).collect(),
            strict_basic: false,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn repeats(&self) -> usize {
        self.seeds.len()
    }

    /// Directory label: the dataset name, suffixed with the similarity when it
    /// is not the default.
    pub fn label(&self) -> String {
        let stem = std::path::Path::new(&self.dataset)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.dataset)
            .to_string();
        match self.abe.similarity {
            SimilarityKind::Euclidean => stem,
            other => format!("{stem}-{other}"),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, message: &str| ConfigError::Invalid { key: key.into(), message: message.into() };
        if self.abe.k_analogies == 0 {
            return Err(invalid("k", "k must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.corr_threshold) {
            return Err(invalid("corr_threshold", "must be in [0, 1]"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("repeats", "need at least one seed"));
        }
        self.fa.validate()
    }
}

/// A suite: one base configuration fanned out over datasets and similarity kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub base: RunConfig,
    pub datasets: Vec<String>,
    pub similarities: Vec<SimilarityKind>,
    pub output_dir: PathBuf,
    first_seed: u64,
    repeats: Option<usize>,
    explicit_seeds: Option<Vec<u64>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            base: RunConfig::default(),
            datasets: DATASETS.iter().map(|s| s.to_string()).collect(),
            similarities: vec![SimilarityKind::Euclidean],
            output_dir: PathBuf::from("results"),
            first_seed: 1,
            repeats: None,
            explicit_seeds: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Invalid { key: key.into(), message: format!("`{value}`: {e}") })
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl SuiteConfig {
    pub const KEYS: [&'static str; 19] = [
        "dataset", "datasets", "data_dir", "output_dir", "similarity", "solution", "k", "corr_threshold", "pop",
        "iters", "gamma", "alpha", "alpha_decay", "beta0", "seed", "seeds", "repeats", "strict_basic", "parallel",
    ];

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "dataset" | "datasets" => self.datasets = list(value).map(String::from).collect(),
            "data_dir" => self.base.data_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "similarity" => {
                self.similarities = list(value).map(|v| parse(key, v)).collect::<Result<_, _>>()?;
                if let Some(&first) = self.similarities.first() {
                    self.base.abe.similarity = first;
                }
            }
            "solution" => self.base.abe.solution = parse::<SolutionKind>(key, value)?,
            "k" => self.base.abe.k_analogies = parse(key, value)?,
            "corr_threshold" => self.base.corr_threshold = parse(key, value)?,
            "pop" => self.base.fa.population = parse(key, value)?,
            "iters" => self.base.fa.max_iterations = parse(key, value)?,
            "gamma" => self.base.fa.gamma = parse(key, value)?,
            "alpha" => self.base.fa.alpha = parse(key, value)?,
            "alpha_decay" => self.base.fa.alpha_decay = parse(key, value)?,
            "beta0" => self.base.fa.beta0 = parse(key, value)?,
            "seed" => self.first_seed = parse(key, value)?,
            "repeats" => self.repeats = Some(parse(key, value)?),
            "seeds" => self.explicit_seeds = Some(list(value).map(|v| parse(key, v)).collect::<Result<_, _>>()?),
            "strict_basic" => self.base.strict_basic = parse(key, value)?,
            "parallel" => self.base.parallel = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        self.base.seeds = match &self.explicit_seeds {
            Some(seeds) => seeds.clone(),
            None => (0..self.repeats.unwrap_or(10) as u64).map(|i| self.first_seed.wrapping_add(i)).collect(),
        };
        Ok(())
    }

    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.datasets.is_empty() {
            return Err(ConfigError::Invalid { key: "datasets".into(), message: "no datasets".into() });
        }
        if self.similarities.is_empty() {
            return Err(ConfigError::Invalid { key: "similarity".into(), message: "no similarity kind".into() });
        }
        if let Some(seeds) = &self.explicit_seeds {
            if let Some(repeats) = self.repeats.filter(|&r| r != seeds.len()) {
                return Err(ConfigError::Invalid {
                    key: "seeds".into(),
                    message: format!("{} seeds given but repeats = {repeats}", seeds.len()),
                });
            }
        }
        self.base.validate()
    }

    /// One [`RunConfig`] per (dataset, similarity), datasets outermost.
    pub fn runs(&self) -> Vec<RunConfig> {
        self.datasets
            .iter()
            .flat_map(|d| {
                self.similarities.iter().map(move |&s| {
                    let mut run = self.base.clone();
                    run.dataset = d.clone();
                    run.abe.similarity = s;
                    run
                })
            })
            .collect()
    }

    /// The fully resolved configuration in file syntax.
    pub fn resolved(&self) -> String {
        resolved_text(&self.base, &self.datasets, &self.similarities, &self.output_dir)
    }
}

/// Resolved configuration of a single run, in config file syntax.
pub fn resolved_run(run: &RunConfig) -> String {
    resolved_text(run, std::slice::from_ref(&run.dataset), &[run.abe.similarity], &PathBuf::new())
}

fn resolved_text(run: &RunConfig, datasets: &[String], sims: &[SimilarityKind], output_dir: &std::path::Path) -> String {
    let join = |items: Vec<String>| items.join(",");
    let mut out = String::new();
    let _ = writeln!(out, "datasets = {}", datasets.join(","));
    let _ = writeln!(out, "data_dir = {}", run.data_dir.display());
    if !output_dir.as_os_str().is_empty() {
        let _ = writeln!(out, "output_dir = {}", output_dir.display());
    }
    let _ = writeln!(out, "similarity = {}", join(sims.iter().map(|s| s.to_string()).collect()));
    let _ = writeln!(out, "solution = {}", run.abe.solution);
    let _ = writeln!(out, "k = {}", run.abe.k_analogies);
    let _ = writeln!(out, "corr_threshold = {}", run.corr_threshold);
    let _ = writeln!(out, "pop = {}", run.fa.population);
    let _ = writeln!(out, "iters = {}", run.fa.max_iterations);
    let _ = writeln!(out, "gamma = {}", run.fa.gamma);
    let _ = writeln!(out, "alpha = {}", run.fa.alpha);
    let _ = writeln!(out, "alpha_decay = {}", run.fa.alpha_decay);
    let _ = writeln!(out, "beta0 = {}", run.fa.beta0);
    let _ = writeln!(out, "seeds = {}", join(run.seeds.iter().map(|s| s.to_string()).collect()));
    let _ = writeln!(out, "strict_basic = {}", run.strict_basic);
    let _ = writeln!(out, "parallel = {}", run.parallel);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SuiteConfig::default();
        assert_eq!(c.runs().len(), 6);
        assert_eq!(c.base.seeds, (1..=10).collect::<Vec<_>>());
        assert_eq!(c.base.abe, AbeConfig::default());
        assert_eq!(c.base.fa.population, 20);
        assert_eq!(c.base.fa.max_iterations, 50);
        c.validate().unwrap();
    }

    #[test]
    fn parse_and_resolve_round_trip() {
        let c = SuiteConfig::parse("datasets = kemerer, albrecht\nsimilarity = euclidean,manhattan\nk=2\nseed = 5\nrepeats = 3 # r\n").unwrap();
        assert_eq!(c.base.seeds, vec![5, 6, 7]);
        assert_eq!(c.base.abe.k_analogies, 2);
        let runs = c.runs();
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[1].label(), "kemerer-manhattan");
        let again = SuiteConfig::parse(&c.resolved()).unwrap();
        assert_eq!(again.runs(), runs);
    }

    #[test]
    fn errors() {
        assert_eq!(SuiteConfig::parse("nope = 1").unwrap_err(), ConfigError::UnknownKey("nope".into()));
        assert!(matches!(SuiteConfig::parse("k").unwrap_err(), ConfigError::Syntax { line: 1, .. }));
        assert!(matches!(SuiteConfig::parse("k = three").unwrap_err(), ConfigError::Invalid { .. }));
        let c = SuiteConfig::parse("k = 0").unwrap();
        assert!(matches!(c.validate().unwrap_err(), ConfigError::Invalid { key, .. } if key == "k"));
        let c = SuiteConfig::parse("corr_threshold = 1.5").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn explicit_seeds() {
        let c = SuiteConfig::parse("seeds = 3,17,99").unwrap();
        assert_eq!(c.base.seeds, vec![3, 17, 99]);
        c.validate().unwrap();
    }
}
