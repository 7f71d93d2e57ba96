//! Replicated runtime sweeps: trials over a list of problem sizes, bootstrap
//! confidence intervals, growth-model fits and CSV persistence.

mod fit;
mod persist;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bitstring::Problem;
use crate::eda::{run, AlgorithmParams, TrialRecord, DEFAULT_MAX_GENERATIONS};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream, BOOTSTRAP_TAG};

pub use fit::{fit_model, fit_report, fit_sweep, models_for, rank_models, FitReport, GrowthModel, ModelFit};
pub use persist::{load, persist, read_trials, sidecar_path, TrialRow, CSV_HEADER};

/// Version string recorded in sweep metadata.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A population size as a function of `n`, from the grammar
/// `const | n | sqrt_n | sqrt_n_log_n | log_n | c*expr`.
/// Values are rounded up and at least 1. Logarithms are natural.
#[derive(Clone, Debug, PartialEq)]
pub enum SizeRule {
    Const(f64),
    N,
    SqrtN,
    SqrtNLogN,
    LogN,
    Scaled(f64, Box<SizeRule>),
}

impl SizeRule {
    fn raw(&self, n: f64) -> f64 {
        match self {
            SizeRule::Const(c) => *c,
            SizeRule::N => n,
            SizeRule::SqrtN => n.sqrt(),
            SizeRule::SqrtNLogN => n.sqrt() * n.ln(),
            SizeRule::LogN => n.ln(),
            SizeRule::Scaled(c, inner) => c * inner.raw(n),
        }
    }

    pub fn eval(&self, n: usize) -> usize {
        let v = self.raw(n as f64).ceil();
        if v.is_finite() && v >= 1.0 {
            v as usize
        } else {
            1
        }
    }
}

impl fmt::Display for SizeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeRule::Const(c) => write!(f, "{c}"),
            SizeRule::N => f.write_str("n"),
            SizeRule::SqrtN => f.write_str("sqrt_n"),
            SizeRule::SqrtNLogN => f.write_str("sqrt_n_log_n"),
            SizeRule::LogN => f.write_str("log_n"),
            SizeRule::Scaled(c, inner) => write!(f, "{c}*{inner}"),
        }
    }
}

fn parse_coefficient(s: &str, rule: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(c) if c.is_finite() && c > 0.0 => Ok(c),
        _ => Err(Error::Parse(format!(
            "invalid size rule '{rule}': '{s}' is not a positive number"
        ))),
    }
}

impl FromStr for SizeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((c, rest)) = t.split_once('*') {
            let c = parse_coefficient(c.trim(), s)?;
            return Ok(SizeRule::Scaled(c, Box::new(rest.parse()?)));
        }
        match t {
            "n" => Ok(SizeRule::N),
            "sqrt_n" => Ok(SizeRule::SqrtN),
            "sqrt_n_log_n" => Ok(SizeRule::SqrtNLogN),
            "log_n" => Ok(SizeRule::LogN),
            _ => parse_coefficient(t, s).map(SizeRule::Const),
        }
    }
}

impl Serialize for SizeRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SizeRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_bootstrap() -> usize {
    100
}

fn default_confidence() -> f64 {
    0.95
}

fn default_rho() -> f64 {
    1.0
}

fn default_max_generations() -> u64 {
    DEFAULT_MAX_GENERATIONS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub problem: Problem,
    pub n_values: Vec<usize>,
    pub lambda_rule: SizeRule,
    pub mu_rule: SizeRule,
    pub repeats: usize,
    pub master_seed: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_samples: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_max_generations")]
    pub max_generations: u64,
}

impl SweepConfig {
    /// The UMDA on `problem` with default bootstrap settings.
    pub fn new(
        problem: Problem,
        n_values: Vec<usize>,
        lambda_rule: SizeRule,
        mu_rule: SizeRule,
        repeats: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            problem,
            n_values,
            lambda_rule,
            mu_rule,
            repeats,
            master_seed,
            bootstrap_samples: default_bootstrap(),
            confidence: default_confidence(),
            rho: default_rho(),
            max_generations: default_max_generations(),
        }
    }

    pub fn params(&self, n_index: usize, trial: usize) -> AlgorithmParams {
        let n = self.n_values[n_index];
        AlgorithmParams {
            n,
            lambda: self.lambda_rule.eval(n),
            mu: self.mu_rule.eval(n),
            rho: self.rho,
            max_generations: self.max_generations,
            seed: derive_seed(self.master_seed, &[n_index as u64, trial as u64]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::InvalidParameter("n_values must not be empty".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if self.bootstrap_samples < 1 {
            return Err(Error::InvalidParameter("bootstrap_samples must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence {} outside (0, 1)",
                self.confidence
            )));
        }
        for i in 0..self.n_values.len() {
            let p = self.params(i, 0);
            if p.n < 2 {
                return Err(Error::InvalidParameter(format!("n = {} below 2", p.n)));
            }
            if p.mu > p.lambda {
                return Err(Error::InvalidParameter(format!(
                    "mu = {} exceeds lambda = {} at n = {}",
                    p.mu, p.lambda, p.n
                )));
            }
            p.validate()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Mean and bootstrap interval over successful trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub mean_generations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub lambda: usize,
    pub mu: usize,
    pub trials: Vec<TrialRecord>,
    /// `None` when no trial succeeded.
    pub summary: Option<Summary>,
    /// Trials that hit the generation cap; excluded from the summary.
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    pub config_hash: String,
    pub code_version: String,
    #[serde(default)]
    pub started_at: Option<String>,
    #[serde(default)]
    pub finished_at: Option<String>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.points.iter().map(|p| p.failures).sum()
    }

    /// `(n, mean evaluations)` of every point with a summary.
    pub fn means(&self) -> (Vec<usize>, Vec<f64>) {
        self.points
            .iter()
            .filter_map(|p| p.summary.map(|s| (p.n, s.mean)))
            .unzip()
    }
}

/// Exact mean of integer samples: the sum is accumulated in `u128`.
pub fn exact_mean(values: impl IntoIterator<Item = u64>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .fold((0u128, 0u64), |(s, c), v| (s + v as u128, c + 1));
    (count > 0).then(|| sum as f64 / count as f64)
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let x = q * sorted.len() as f64;
    let r = x.round();
    let rank = if (x - r).abs() <= 1e-9 { r } else { x.ceil() };
    let idx = (rank as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Percentile bootstrap interval of the mean with `b` resamples.
///
/// The samples are sorted before resampling, so the interval depends only on
/// the multiset of samples and `seed`.
pub fn bootstrap_ci(samples: &[f64], b: usize, level: f64, seed: u64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("bootstrap needs at least one sample".into()));
    }
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap count must be positive".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence {level} outside (0, 1)")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rng = stream(seed);
    let k = sorted.len();
    let mut means: Vec<f64> = (0..b)
        .map(|_| {
            let s = crate::pb::compensated_sum((0..k).map(|_| sorted[rng.gen_range(0..k)]));
            s / k as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok((nearest_rank(&means, alpha), nearest_rank(&means, 1.0 - alpha)))
}

pub(crate) fn summarise(config: &SweepConfig, n_index: usize, trials: &[TrialRecord]) -> Result<Option<Summary>> {
    let ok: Vec<&TrialRecord> = trials.iter().filter(|t| t.success).collect();
    let Some(mean) = exact_mean(ok.iter().map(|t| t.evaluations)) else {
        return Ok(None);
    };
    let mean_generations = exact_mean(ok.iter().map(|t| t.generations)).unwrap_or(0.0);
    let samples: Vec<f64> = ok.iter().map(|t| t.evaluations as f64).collect();
    let seed = derive_seed(config.master_seed, &[BOOTSTRAP_TAG, n_index as u64]);
    let (lo, hi) = bootstrap_ci(&samples, config.bootstrap_samples, config.confidence, seed)?;
    // The percentile interval need not contain the sample mean for very
    // skewed data; widen it so it always does.
    Ok(Some(Summary {
        mean,
        ci_lower: lo.min(mean),
        ci_upper: hi.max(mean),
        mean_generations,
    }))
}

pub(crate) fn assemble(config: SweepConfig, trials: Vec<Vec<TrialRecord>>) -> Result<SweepResult> {
    let points = trials
        .into_iter()
        .enumerate()
        .map(|(i, trials)| {
            let p = config.params(i, 0);
            Ok(SweepPoint {
                n: p.n,
                lambda: p.lambda,
                mu: p.mu,
                summary: summarise(&config, i, &trials)?,
                failures: trials.iter().filter(|t| !t.success).count(),
                trials,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        config_hash: config.hash(),
        code_version: CODE_VERSION.to_string(),
        config,
        points,
        started_at: None,
        finished_at: None,
    })
}

/// Runs `repeats` trials for every size. Trials run in parallel; results are
/// collected in `(n_index, trial)` order so the output does not depend on
/// scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.n_values.len())
        .flat_map(|i| (0..config.repeats).map(move |t| (i, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(i, t)| run(&config.params(i, t), &config.problem))
        .collect::<Result<_>>()?;
    let trials = records
        .chunks(config.repeats)
        .map(<[TrialRecord]>::to_vec)
        .collect();
    assemble(config.clone(), trials)
}
