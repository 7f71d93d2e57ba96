//! Randomized verification sweeps over the probabilistic lemmas.
//!
//! Each sweep draws `cases` random instances from a per-case stream
//! `derive_seed(seed, [VERIFY_TAG, check, case])`, evaluates the check with
//! the exact DP, and aggregates the minimum slack and any violations. The
//! report is independent of thread count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::levels::check_inequality_g1;
use crate::pb::{
    check_anticoncentration, check_ce_lemma, check_feige, check_integer_mean_median,
    check_pmin_quarter_bound, BoundReport, PoissonBinomial,
};
use crate::rng::{derive_seed, stream, StreamRng, VERIFY_TAG};

/// Counterexamples kept in a report.
pub const MAX_COUNTEREXAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Feige,
    Anticoncentration,
    IntegerMedian,
    PminQuarter,
    Ce,
    InequalityG1,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Feige,
        Check::Anticoncentration,
        Check::IntegerMedian,
        Check::PminQuarter,
        Check::Ce,
        Check::InequalityG1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Feige => "feige",
            Check::Anticoncentration => "anticoncentration",
            Check::IntegerMedian => "integer-median",
            Check::PminQuarter => "pmin-quarter",
            Check::Ce => "ce",
            Check::InequalityG1 => "inequality-g1",
        }
    }

    /// Default largest number of Bernoulli components per case.
    pub fn default_k_max(self) -> usize {
        match self {
            Check::Feige => 20,
            Check::Anticoncentration | Check::IntegerMedian => 50,
            Check::PminQuarter => 40,
            Check::Ce => 60,
            Check::InequalityG1 => 0,
        }
    }

    fn tag(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Check::ALL.iter().map(|c| c.as_str()).collect();
                Error::InvalidParameter(format!(
                    "unknown check '{s}', expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub cases: usize,
    /// Largest `k`; `None` uses [`Check::default_k_max`].
    pub k_max: Option<usize>,
    pub seed: u64,
    /// Largest `n` for the level-inequality sweep.
    pub n_max: usize,
    pub p_min: f64,
    pub dstar: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            cases: 10_000,
            k_max: None,
            seed: 0,
            n_max: 1_000_000,
            p_min: 0.25,
            dstar: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: usize,
    pub params: Value,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: Check,
    pub cases: usize,
    pub seed: u64,
    /// Smallest signed slack; positive means every case held with room.
    pub min_slack: f64,
    /// Smallest checked value (the empirical infimum for `ce`).
    pub min_value: f64,
    pub violations: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Outcome {
    report: BoundReport,
    params: Value,
}

/// Random marginal vector: a mixture of exact 0/1, near-border and uniform
/// values in `[lo, 1]`.
fn random_probs(rng: &mut StreamRng, k: usize, lo: f64) -> Vec<f64> {
    (0..k)
        .map(|_| {
            let r: f64 = rng.gen();
            let p = if r < 0.1 {
                if lo > 0.0 {
                    lo
                } else {
                    0.0
                }
            } else if r < 0.2 {
                1.0
            } else if r < 0.3 {
                let eps = 10f64.powf(-rng.gen_range(2.0..9.0));
                if rng.gen_bool(0.5) {
                    1.0 - eps
                } else {
                    lo + eps
                }
            } else {
                rng.gen_range(lo..=1.0)
            };
            p.clamp(lo, 1.0)
        })
        .collect()
}

/// Rescales `probs` so the sum is the nearest integer, keeping every entry
/// in `[0, 1]`.
fn integer_mean(mut probs: Vec<f64>) -> Vec<f64> {
    let s: f64 = probs.iter().sum();
    let k = probs.len() as f64;
    let target = s.round().clamp(0.0, k);
    if target <= s {
        let scale = if s > 0.0 { target / s } else { 0.0 };
        probs.iter_mut().for_each(|p| *p *= scale);
    } else {
        let q = k - s;
        let scale = (k - target) / q;
        probs.iter_mut().for_each(|p| *p = 1.0 - (1.0 - *p) * scale);
    }
    probs
}

fn log_uniform(rng: &mut StreamRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn run_case(check: Check, opts: &SweepOptions, k_max: usize, rng: &mut StreamRng) -> Result<Outcome> {
    let k = rng.gen_range(1..=k_max.max(1));
    match check {
        Check::Feige => {
            let probs = random_probs(rng, k, 0.0);
            let delta = log_uniform(rng, 1e-3, 1e2);
            let d = PoissonBinomial::new(probs.clone())?;
            Ok(Outcome {
                report: check_feige(&d, delta)?,
                params: json!({ "probs": probs, "delta": delta }),
            })
        }
        Check::Anticoncentration => {
            let probs = random_probs(rng, k, 0.0);
            let d = PoissonBinomial::new(probs.clone())?;
            Ok(Outcome {
                report: check_anticoncentration(&d),
                params: json!({ "probs": probs }),
            })
        }
        Check::IntegerMedian => {
            let probs = integer_mean(random_probs(rng, k, 0.0));
            let d = PoissonBinomial::new(probs.clone())?;
            Ok(Outcome {
                report: check_integer_mean_median(&d)?,
                params: json!({ "probs": probs }),
            })
        }
        Check::PminQuarter => {
            let probs = random_probs(rng, k, 0.25);
            let d = PoissonBinomial::new(probs.clone())?;
            Ok(Outcome {
                report: check_pmin_quarter_bound(&d)?,
                params: json!({ "probs": probs }),
            })
        }
        Check::Ce => {
            let probs = random_probs(rng, k, opts.p_min);
            let d = PoissonBinomial::new(probs.clone())?;
            Ok(Outcome {
                report: check_ce_lemma(&d, opts.p_min, opts.dstar)?,
                params: json!({ "probs": probs, "p_min": opts.p_min, "dstar": opts.dstar }),
            })
        }
        Check::InequalityG1 => {
            let n_max = opts.n_max.max(1);
            let n = log_uniform(rng, 1.0, n_max as f64 + 1.0).floor().clamp(1.0, n_max as f64) as usize;
            let d = 1.0 - rng.gen::<f64>();
            let f_prev = rng.gen_range(0..n);
            let ell = rng.gen_range(0..=n);
            let nf = n as f64;
            let lo = (f_prev as f64 - ell as f64 / nf).max(0.0);
            let expectation = rng.gen_range(lo..=nf);
            let r = check_inequality_g1(n, d, f_prev, ell, expectation)?;
            let report = BoundReport {
                value: r.lhs,
                bound: r.rhs,
                slack: r.lhs - r.rhs,
                satisfied: r.holds,
            };
            Ok(Outcome {
                report,
                params: json!({
                    "n": n, "d": d, "f_prev": f_prev, "ell": ell, "expectation": expectation
                }),
            })
        }
    }
}

pub fn run_verification(check: Check, opts: &SweepOptions) -> Result<VerifyReport> {
    if opts.cases == 0 {
        return Err(Error::InvalidParameter("cases must be positive".into()));
    }
    let k_max = opts.k_max.unwrap_or_else(|| check.default_k_max());
    if check != Check::InequalityG1 && k_max == 0 {
        return Err(Error::InvalidParameter("k-max must be positive".into()));
    }
    if check == Check::Ce && !(opts.p_min > 0.0 && opts.p_min <= 1.0 && opts.dstar >= 1.0 / opts.p_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p_min <= 1 and dstar >= 1/p_min, got p_min = {}, dstar = {}",
            opts.p_min, opts.dstar
        )));
    }
    let outcomes: Vec<Outcome> = (0..opts.cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = stream(derive_seed(opts.seed, &[VERIFY_TAG, check.tag(), case as u64]));
            run_case(check, opts, k_max, &mut rng)
        })
        .collect::<Result<_>>()?;

    let mut report = VerifyReport {
        check,
        cases: opts.cases,
        seed: opts.seed,
        min_slack: f64::INFINITY,
        min_value: f64::INFINITY,
        violations: 0,
        counterexamples: Vec::new(),
    };
    for (case, o) in outcomes.into_iter().enumerate() {
        report.min_slack = report.min_slack.min(o.report.slack);
        report.min_value = report.min_value.min(o.report.value);
        if !o.report.satisfied {
            report.violations += 1;
            if report.counterexamples.len() < MAX_COUNTEREXAMPLES {
                report.counterexamples.push(Counterexample {
                    case,
                    params: o.params,
                    value: o.report.value,
                    bound: o.report.bound,
                });
            }
        }
    }
    Ok(report)
}
