use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use umda_core::experiments::{
    exact_mean, fit_report, fit_sweep, models_for, persist, read_trials, sidecar_path, FitReport,
    GrowthModel, SizeRule, SweepConfig, SweepResult,
};
use umda_core::Problem;

use crate::{clock_seed, EXIT_FAILED, FitArgs, RunArgs};

/// Sweep settings read from `--config`. Every field is optional; flags
/// override file values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<Problem>,
    n_values: Option<Vec<usize>>,
    lambda_rule: Option<SizeRule>,
    mu_rule: Option<SizeRule>,
    repeats: Option<usize>,
    master_seed: Option<u64>,
    bootstrap_samples: Option<usize>,
    confidence: Option<f64>,
    rho: Option<f64>,
    max_generations: Option<u64>,
}

fn parse_rule(flag: &Option<String>, file: Option<SizeRule>, default: SizeRule, name: &str) -> Result<SizeRule> {
    match flag {
        Some(s) => s.parse().with_context(|| format!("--{name}")),
        None => Ok(file.unwrap_or(default)),
    }
}

/// Merges flags over the config file. Returns the config and whether the
/// seed was time-derived.
pub(crate) fn resolve(args: &RunArgs) -> Result<(SweepConfig, bool)> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let Some(problem) = args.problem.or(file.problem) else {
        bail!("--problem is required");
    };
    let Some(n_values) = args.n.clone().or(file.n_values) else {
        bail!("--n is required");
    };
    let lambda_rule = parse_rule(&args.lambda, file.lambda_rule, SizeRule::N, "lambda")?;
    let mu_rule = parse_rule(&args.mu, file.mu_rule, SizeRule::SqrtN, "mu")?;
    let seed = args.seed.or(file.master_seed);
    if seed.is_none() && args.strict {
        bail!("--strict requires --seed");
    }
    let mut config = SweepConfig::new(
        problem,
        n_values,
        lambda_rule,
        mu_rule,
        args.repeats.or(file.repeats).unwrap_or(100),
        seed.unwrap_or_else(clock_seed),
    );
    if let Some(b) = args.bootstrap.or(file.bootstrap_samples) {
        config.bootstrap_samples = b;
    }
    if let Some(c) = args.confidence.or(file.confidence) {
        config.confidence = c;
    }
    if let Some(r) = args.rho.or(file.rho) {
        config.rho = r;
    }
    if let Some(g) = args.max_generations.or(file.max_generations) {
        config.max_generations = g;
    }
    config.validate()?;
    Ok((config, seed.is_none()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trials".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_summary(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = String::from("n,lambda,mu,trials,failures,mean,ci_lower,ci_upper,mean_generations\n");
    for p in &result.points {
        let cells = match p.summary {
            Some(s) => format!("{},{},{},{}", s.mean, s.ci_lower, s.ci_upper, s.mean_generations),
            None => ",,,".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{cells}\n",
            p.n,
            p.lambda,
            p.mu,
            p.trials.len(),
            p.failures
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn print_table(result: &SweepResult) {
    println!(
        "{:>8} {:>8} {:>6} {:>14} {:>14} {:>14} {:>7}",
        "n", "lambda", "mu", "mean", "ci_lower", "ci_upper", "failed"
    );
    for p in &result.points {
        match p.summary {
            Some(s) => println!(
                "{:>8} {:>8} {:>6} {:>14.2} {:>14.2} {:>14.2} {:>7}",
                p.n, p.lambda, p.mu, s.mean, s.ci_lower, s.ci_upper, p.failures
            ),
            None => println!(
                "{:>8} {:>8} {:>6} {:>14} {:>14} {:>14} {:>7}",
                p.n, p.lambda, p.mu, "-", "-", "-", p.failures
            ),
        }
    }
}

fn print_fit(report: &FitReport) {
    println!("{:>10} {:>16} {:>10}", "model", "c", "rho");
    for f in &report.fits {
        let mark = if f.model == report.winner { " *" } else { "" };
        println!("{:>10} {:>16.6} {:>10.6}{mark}", f.model.as_str(), f.c, f.rho);
    }
}

pub fn run(args: &RunArgs, with_fit: bool) -> Result<u8> {
    let (config, clock) = resolve(args)?;
    let started = args.timestamps.then(|| chrono::Utc::now().to_rfc3339());
    let mut result = umda_core::experiments::run_sweep(&config)?;
    result.started_at = started;
    result.finished_at = args.timestamps.then(|| chrono::Utc::now().to_rfc3339());

    println!(
        "problem {}, seed {}{}, lambda={}, mu={}, {} trials per size",
        config.problem,
        config.master_seed,
        if clock { " (time-derived)" } else { "" },
        config.lambda_rule,
        config.mu_rule,
        config.repeats
    );
    print_table(&result);

    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    persist(&result, &args.out)?;
    let summary = with_suffix(&args.out, "summary.csv");
    write_summary(&result, &summary)?;
    println!(
        "wrote {}, {}, {}",
        args.out.display(),
        sidecar_path(&args.out).display(),
        summary.display()
    );

    if with_fit {
        let report = fit_sweep(&result)?;
        println!();
        print_fit(&report);
        let path = with_suffix(&args.out, "fit.json");
        let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        serde_json::to_writer_pretty(&mut f, &report)?;
        writeln!(f)?;
        println!("wrote {}", path.display());
    }

    let failures = result.failures();
    if failures > 0 {
        eprintln!(
            "warning: {failures} trial(s) reached the generation cap and are excluded from the means"
        );
        if args.strict {
            return Ok(EXIT_FAILED);
        }
    }
    Ok(0)
}

pub fn fit(args: &FitArgs) -> Result<u8> {
    let (problem, sizes, report) = fit_file(args)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("problem {problem}, {sizes} sizes");
        print_fit(&report);
    }
    Ok(0)
}

/// Reads a trial file and fits the requested models to the per-size means
/// of successful trials.
pub(crate) fn fit_file(args: &FitArgs) -> Result<(Problem, usize, FitReport)> {
    let rows = read_trials(&args.input)?;
    let Some(first) = rows.first() else {
        bail!("{} has no trials", args.input.display());
    };
    let problem = first.problem;
    if let Some(r) = rows.iter().find(|r| r.problem != problem) {
        bail!(
            "line {}: mixed problems '{}' and '{}'",
            r.line,
            problem,
            r.problem
        );
    }
    let mut by_n: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in &rows {
        let e = by_n.entry(r.n).or_default();
        if r.record.success {
            e.push(r.record.evaluations);
        }
    }
    let mut n_values = Vec::new();
    let mut means = Vec::new();
    for (n, evals) in by_n {
        match exact_mean(evals) {
            Some(m) => {
                n_values.push(n);
                means.push(m);
            }
            None => eprintln!("warning: no successful trials at n = {n}, skipped"),
        }
    }
    let models: Vec<GrowthModel> = match &args.models {
        Some(names) => names
            .iter()
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()?,
        None => models_for(problem).to_vec(),
    };
    let report = fit_report(&n_values, &means, &models)?;
    Ok((problem, n_values.len(), report))
}
