//! Argument parsing and command dispatch for the `faabe` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faabe_core::config::SuiteConfig;
use faabe_core::dataset;
use faabe_core::error::{ConfigError, Error};
use faabe_core::experiment::{self, SuiteResult};
use faabe_core::{report, selftest, SimilarityKind, SolutionKind};

#[derive(Debug, Parser)]
#[command(name = "faabe", version, about = "Analogy-based effort estimation with firefly-optimized feature weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum Command {
    /// Baseline ABE vs FAABE on one dataset.
    Run(RunArgs),
    /// Every dataset of a config file (default: all six benchmarks).
    Suite(SuiteArgs),
    /// Project count, feature count and effort statistics of a dataset.
    Describe(DescribeArgs),
    /// Runs the built-in numeric checks.
    SelfTest(SelfTestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Settings shared by `run` and `suite`. Unset flags fall back to the config
/// file, then to the built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct ModelArgs {
    /// Config file (`key = value` lines); flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory holding `<name>.csv` and `<name>.manifest` [default: data]
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// First split seed; seeds are seed, seed+1, ... [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeds [default: 10, or 1 when --seed is given to `run`]
    #[arg(long, value_parser = positive)]
    pub repeats: Option<usize>,
    /// Analogies per estimate [default: 3]
    #[arg(long, value_parser = parse_k)]
    pub k: Option<usize>,
    /// euclidean | manhattan [default: euclidean]
    #[arg(long, value_parser = clap::value_parser!(SimilarityKind))]
    pub similarity: Option<SimilarityKind>,
    /// closest | mean | median | iwm [default: iwm]
    #[arg(long, value_parser = clap::value_parser!(SolutionKind))]
    pub solution: Option<SolutionKind>,
    /// Minimum |Pearson r| with effort for a feature to be kept [default: 0.5]
    #[arg(long)]
    pub corr_threshold: Option<f64>,
    /// Firefly population N [default: 20]
    #[arg(long, value_parser = positive)]
    pub pop: Option<usize>,
    /// Firefly iterations T [default: 50]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Light absorption coefficient [default: 1.0]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Randomization scale [default: 0.2]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Attractiveness at distance zero [default: 1.0]
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Estimate test projects from the basic set only
    #[arg(long)]
    pub strict_basic: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct OutputArgs {
    /// Where result files are written [default: results]
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// No progress messages on stderr
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    /// Dataset name (looked up in --data-dir) or path to a CSV file
    #[arg(long)]
    pub dataset: String,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SuiteArgs {
    /// Comma-separated datasets, overriding the config file
    #[arg(long)]
    pub dataset: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct DescribeArgs {
    #[arg(long)]
    pub dataset: String,
    #[arg(long, value_name = "DIR", default_value = "data")]
    pub data_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SelfTestArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print only failing checks
    #[arg(long)]
    pub quiet: bool,
}

fn parse_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("k must be >= 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be >= 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0} of {1} self-test checks failed")]
    SelfTest(usize, usize),
    #[error("{failed} of {total} datasets failed")]
    Suite { failed: usize, total: usize, output: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::SelfTest(..) => 3,
            CliError::Suite { .. } => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Core(e.into())
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Builds the suite configuration: defaults, then the config file, then flags.
pub fn suite_config(model: &ModelArgs, output: &OutputArgs, datasets: Option<&str>, single_run: bool) -> Result<SuiteConfig, CliError> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = &model.config {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid { key: "config".into(), message: format!("{}: {e}", path.display()) })?;
        cfg.apply_text(&text)?;
    }
    let mut overrides: Vec<(&str, String)> = Vec::new();
    let mut push = |key, value: Option<String>| {
        if let Some(v) = value {
            overrides.push((key, v));
        }
    };
    push("datasets", datasets.map(String::from));
    push("data_dir", model.data_dir.as_ref().map(|p| p.display().to_string()));
    push("output_dir", output.output_dir.as_ref().map(|p| p.display().to_string()));
    push("seed", model.seed.map(|v| v.to_string()));
    let repeats = model.repeats.or((single_run && model.seed.is_some()).then_some(1));
    push("repeats", repeats.map(|v| v.to_string()));
    push("k", model.k.map(|v| v.to_string()));
    push("similarity", model.similarity.map(|v| v.to_string()));
    push("solution", model.solution.map(|v| v.to_string()));
    push("corr_threshold", model.corr_threshold.map(|v| v.to_string()));
    push("pop", model.pop.map(|v| v.to_string()));
    push("iters", model.iters.map(|v| v.to_string()));
    push("gamma", model.gamma.map(|v| v.to_string()));
    push("alpha", model.alpha.map(|v| v.to_string()));
    push("beta0", model.beta0.map(|v| v.to_string()));
    push("strict_basic", model.strict_basic.then(|| "true".to_string()));
    for (key, value) in overrides {
        cfg.set(key, &value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Renders a finished suite in the requested format.
pub fn render_suite(suite: &SuiteResult, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Text => report::summary_text(suite),
        Format::Json => report::summary_json(suite)?,
        Format::Csv => report::summary_csv(&suite.summary()),
    })
}

fn run_suite(cfg: &SuiteConfig, output: &OutputArgs, strict_errors: bool) -> Result<String, CliError> {
    let runs = cfg.runs();
    let suite = if strict_errors {
        // A single `run`: surface the typed error so the exit code is right.
        let results = runs.iter().map(experiment::run_dataset).collect::<Result<Vec<_>, _>>()?;
        SuiteResult { results, failures: Vec::new() }
    } else {
        experiment::run_suite(&runs)
    };
    if !output.quiet {
        for r in &suite.results {
            eprintln!("faabe: {} done ({} seeds)", r.label, r.seeds.len());
        }
        for f in &suite.failures {
            eprintln!("faabe: {} failed: {}", f.label, f.error);
        }
    }
    report::write_suite(&cfg.output_dir, &runs, &suite)?;
    report::write_atomic(&cfg.output_dir.join("config.resolved"), cfg.resolved().as_bytes())?;
    if !output.quiet {
        eprintln!("faabe: results written to {}", cfg.output_dir.display());
    }
    let rendered = render_suite(&suite, output.format)?;
    if suite.failures.is_empty() {
        Ok(rendered)
    } else {
        Err(CliError::Suite { failed: suite.failures.len(), total: runs.len(), output: rendered })
    }
}

fn describe(args: &DescribeArgs) -> Result<String, CliError> {
    let d = dataset::load_named(&args.dataset, &args.data_dir).map_err(Error::from)?;
    let s = dataset::describe(&d);
    Ok(match args.format {
        Format::Text => s.to_text(&d.name),
        Format::Json => report::to_json(&s)?,
        Format::Csv => format!(
            "dataset,projects,features,effort_min,effort_max,effort_median\n{},{},{},{},{},{}\n",
            d.name, s.projects, s.features, s.effort_min, s.effort_max, s.effort_median
        ),
    })
}

fn self_test(args: &SelfTestArgs) -> Result<String, CliError> {
    let checks = selftest::run();
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut out = String::new();
    match args.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = checks
                .iter()
                .map(|c| serde_json::json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            out = report::to_json(&items)?;
        }
        Format::Csv => {
            out.push_str("check,passed,detail\n");
            for c in &checks {
                let _ = writeln!(out, "{},{},\"{}\"", c.name, c.passed, c.detail);
            }
        }
        Format::Text => {
            for c in checks.iter().filter(|c| !args.quiet || !c.passed) {
                let _ = writeln!(out, "{} {} ({})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            let _ = writeln!(out, "{} passed, {failed} failed", checks.len() - failed);
        }
    }
    if failed > 0 {
        print!("{out}");
        return Err(CliError::SelfTest(failed, checks.len()));
    }
    Ok(out)
}

/// Executes a parsed command and returns what should go to stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run(a) => run_suite(&suite_config(&a.model, &a.output, Some(&a.dataset), true)?, &a.output, true),
        Command::Suite(a) => run_suite(&suite_config(&a.model, &a.output, a.dataset.as_deref(), false)?, &a.output, false),
        Command::Describe(a) => describe(a),
        Command::SelfTest(a) => self_test(a),
    }
}

/// Full program: parse, execute, print. Returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            if let CliError::Suite { output, .. } = &e {
                print!("{output}");
            }
            eprintln!("faabe: error: {e}");
            e.exit_code()
        }
    }
}
