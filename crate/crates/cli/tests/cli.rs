use std::fs;
use std::path::{Path, PathBuf};

use clap::CommandFactory;
use faabe_cli::{execute, main_with, parse_args, render_suite, Cli, Command, Format};
use faabe_core::report::sig4;
use faabe_core::SimilarityKind;

fn parse(args: &str) -> Result<Cli, clap::Error> {
    parse_args(std::iter::once("faabe").chain(args.split_whitespace()))
}

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("faabe").chain(args.iter().copied()))
}

/// 30-project CSV + manifest in `dir`; returns the CSV path.
fn fixture(dir: &Path) -> PathBuf {
    let mut csv = String::from("id,size,team,lang,noise,effort\n");
    let mut state = 7u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..30 {
        let size = 5.0 + 295.0 * next();
        let team = 1 + (next() * 6.0) as u32;
        let lang = if next() < 0.5 { "c" } else { "java" };
        let effort = 3.0 * size + 30.0 * f64::from(team) + 40.0 * next();
        csv.push_str(&format!("{i},{size:.2},{team},{lang},{:.3},{effort:.1}\n", next()));
    }
    let path = dir.join("syn.csv");
    fs::write(&path, csv).unwrap();
    fs::write(dir.join("syn.manifest"), "effort = effort\nignore = id\nnominal = lang\nordinal = team\n").unwrap();
    path
}

#[test]
fn parses_documented_examples() {
    match parse("describe --dataset cocomo81").unwrap().command {
        Command::Describe(a) => assert_eq!(a.dataset, "cocomo81"),
        other => panic!("{other:?}"),
    }
    match parse("run --dataset kemerer --seed 7 --k 3").unwrap().command {
        Command::Run(a) => {
            assert_eq!(a.dataset, "kemerer");
            assert_eq!(a.model.seed, Some(7));
            assert_eq!(a.model.k, Some(3));
        }
        other => panic!("{other:?}"),
    }
    let err = parse("run --k 0").unwrap_err();
    assert!(err.to_string().contains("k must be >= 1"), "{err}");
    assert!(matches!(parse("self-test").unwrap().command, Command::SelfTest(_)));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["run", "--dataset", "x", "--k", "0"]), 1);
    assert_eq!(run(&["run", "--dataset", "x", "--no-such-flag"]), 1);
    assert_eq!(run(&["run"]), 1);
    assert_eq!(run(&["run", "--dataset", "x", "--similarity", "cosine"]), 1);
    assert_eq!(run(&["suite", "--pop", "0"]), 1);
}

#[test]
fn help_mentions_every_flag() {
    let mut root = Cli::command();
    root.build();
    let documented = [
        "dataset", "data-dir", "seed", "k", "similarity", "solution", "corr-threshold", "pop", "iters", "gamma",
        "alpha", "beta0", "repeats", "strict-basic", "output-dir", "format", "quiet", "config",
    ];
    let mut seen = Vec::new();
    for sub in root.get_subcommands_mut() {
        let help = sub.render_long_help().to_string();
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(help.contains(&format!("--{long}")), "`{}` help lacks --{long}", sub.get_name());
                seen.push(long.to_string());
            }
        }
    }
    for flag in documented {
        assert!(seen.iter().any(|s| s == flag), "--{flag} not accepted by any subcommand");
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("suite.conf");
    fs::write(&conf, "datasets = kemerer\nk = 2\npop = 5\nseed = 4\nrepeats = 2\nsimilarity = euclidean,manhattan\n").unwrap();
    let cli = parse(&format!("suite --config {} --k 4", conf.display())).unwrap();
    let Command::Suite(a) = cli.command else { panic!() };
    let cfg = faabe_cli::suite_config(&a.model, &a.output, a.dataset.as_deref(), false).unwrap();
    assert_eq!(cfg.base.abe.k_analogies, 4);
    assert_eq!(cfg.base.fa.population, 5);
    assert_eq!(cfg.base.seeds, vec![4, 5]);
    assert_eq!(cfg.similarities, vec![SimilarityKind::Euclidean, SimilarityKind::Manhattan]);

    fs::write(&conf, "bogus = 1\n").unwrap();
    assert_eq!(run(&["suite", "--config", conf.to_str().unwrap()]), 1);
}

#[test]
fn run_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture(dir.path());
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let code = run(&[
            "run", "--dataset", csv.to_str().unwrap(), "--seed", "3", "--repeats", "2", "--pop", "6", "--iters", "5",
            "--output-dir", out.to_str().unwrap(), "--quiet",
        ]);
        assert_eq!(code, 0);
        outputs.push(out);
    }
    for rel in ["summary.json", "syn/3/metrics.json", "syn/4/weights.json", "syn/3/trace.csv", "syn/4/config.resolved"] {
        let a = fs::read(outputs[0].join(rel)).unwrap();
        assert!(!a.is_empty(), "{rel}");
        assert_eq!(a, fs::read(outputs[1].join(rel)).unwrap(), "{rel}");
    }
    let trace = fs::read_to_string(outputs[0].join("syn/3/trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,best_brightness\n"));
    assert_eq!(trace.lines().count(), 1 + 6);
}

#[test]
fn text_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture(dir.path());
    let args = format!("run --dataset {} --pop 4 --iters 3 --repeats 3 --output-dir {} --quiet", csv.display(), dir.path().join("o").display());
    let cli = parse(&args).unwrap();
    let text = execute(&cli).unwrap();
    let Command::Run(a) = &cli.command else { panic!() };
    let cfg = faabe_cli::suite_config(&a.model, &a.output, Some(&a.dataset), true).unwrap();
    let suite = faabe_core::experiment::run_suite(&cfg.runs());
    assert_eq!(render_suite(&suite, Format::Text).unwrap(), text);

    let json: serde_json::Value = serde_json::from_str(&render_suite(&suite, Format::Json).unwrap()).unwrap();
    let summary = json["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 2);
    let body: Vec<&str> = text.lines().skip(2).collect();
    for (row, line) in summary.iter().zip(body) {
        let cells: Vec<String> = line.split_whitespace().map(|c| c.trim_end_matches('*').to_string()).collect();
        let values = &cells[cells.len() - 4..];
        for (key, cell) in ["mmre", "mae", "mse", "rmse"].iter().zip(values) {
            assert_eq!(&sig4(row["metrics"][key].as_f64().unwrap()), cell, "{key} in `{line}`");
        }
    }
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2 * 3);
    assert!(rows.iter().all(|r| r.get("wall_time").is_none()));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["describe", "--dataset", "nope", "--data-dir", dir.path().to_str().unwrap()]), 2);
    fs::write(dir.path().join("bad.csv"), "a,effort\n1,?\n").unwrap();
    fs::write(dir.path().join("bad.manifest"), "effort = effort\n").unwrap();
    assert_eq!(run(&["describe", "--dataset", "bad", "--data-dir", dir.path().to_str().unwrap()]), 2);
    let out = dir.path().join("out");
    let code = run(&[
        "suite", "--dataset", "nope", "--data-dir", dir.path().to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "--quiet",
    ]);
    assert_eq!(code, 2);
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().contains("FAILED nope"));
}

#[test]
fn describe_and_self_test() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture(dir.path());
    let cli = parse(&format!("describe --dataset {} --format json", csv.display())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&execute(&cli).unwrap()).unwrap();
    assert_eq!(v["projects"], 30);
    assert_eq!(v["features"], 4);
    for key in ["effort_min", "effort_max", "effort_median"] {
        assert!(v[key].is_f64());
    }
    assert_eq!(run(&["self-test", "--quiet"]), 0);
}
