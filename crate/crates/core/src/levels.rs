//! Level partitions and the level-based upper bound on the expected
//! optimisation time of non-elitist population algorithms.
//!
//! For a partition `A_1, ..., A_m` with per-level upgrade probabilities
//! `z_j`, growth factor `1 + delta` and selective pressure `gamma0`, the
//! bound (in fitness evaluations) is
//!
//! ```text
//! E[T] <= (8 / delta^2) * sum_j [ lambda * ln(6 delta lambda / (4 + z_j delta lambda)) + 1 / z_j ]
//! ```
//!
//! provided `lambda >= (4 / (gamma0 delta^2)) * ln(128 m / (z_* delta^2))`.
//! Presets build the partitions used for LeadingOnes/BinVal and for OneMax
//! with small and large parent populations.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::eda::{MarginalModel, Sampler};
use crate::error::{Error, Result};
use crate::pb::compensated_sum;
use crate::rng::{derive_seed, stream, LEVEL_TAG};

/// Default lower bound on `Pr(Y >= E[Y])` for marginals at least 1/4:
/// `(1/2) * (1/4)^7`.
pub const DEFAULT_PSI: f64 = 0.5 * 6.103_515_625e-5;

/// How a search point is mapped to its level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelScheme {
    /// `A_j = { x : LeadingOnes(x) = j - 1 }`.
    LeadingOnes,
    /// `A_j = { x : OneMax(x) = j - 1 }`.
    OneMax,
    /// `A_j = { x : f_{j-1} <= OneMax(x) < f_j }`, `A_m = {1^n}`.
    OneMaxSpaced { thresholds: Vec<usize> },
    /// Arbitrary partition, no level function.
    Custom,
}

impl LevelScheme {
    /// 1-based level of `x`, if the scheme defines one.
    pub fn level_of(&self, x: &BitString) -> Option<usize> {
        match self {
            LevelScheme::LeadingOnes => Some(x.leading_ones() + 1),
            LevelScheme::OneMax => Some(x.count_ones() + 1),
            LevelScheme::OneMaxSpaced { thresholds } => {
                let ones = x.count_ones();
                // thresholds = f_0 .. f_ell with f_ell = n.
                Some(thresholds.partition_point(|&f| f <= ones))
            }
            LevelScheme::Custom => None,
        }
    }
}

/// Levels with their upgrade probabilities and bound constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPartition {
    pub label: String,
    /// Number of levels.
    pub m: usize,
    /// `z_1 .. z_{m-1}`.
    pub z: Vec<f64>,
    pub delta: f64,
    pub gamma0: f64,
    pub scheme: LevelScheme,
    /// Non-fatal regime notes, e.g. checks on existential constants.
    #[serde(default)]
    pub advisories: Vec<String>,
}

impl LevelPartition {
    pub fn new(label: impl Into<String>, z: Vec<f64>, delta: f64, gamma0: f64) -> Result<Self> {
        let p = Self {
            label: label.into(),
            m: z.len() + 1,
            z,
            delta,
            gamma0,
            scheme: LevelScheme::Custom,
            advisories: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.z.is_empty() || self.m != self.z.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "need m - 1 = {} upgrade probabilities, got {}",
                self.m.saturating_sub(1),
                self.z.len()
            )));
        }
        if let Some(z) = self.z.iter().find(|&&z| !(z > 0.0 && z <= 1.0)) {
            return Err(Error::InvalidParameter(format!("z_j = {z} outside (0, 1]")));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 = {} outside (0, 1)",
                self.gamma0
            )));
        }
        Ok(())
    }

    pub fn z_star(&self) -> f64 {
        self.z.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest population size admitted by the population-size condition.
    pub fn g3_min_population(&self) -> f64 {
        g3_min_population(self.m, self.z_star(), self.delta, self.gamma0)
    }

    pub fn satisfies_g3(&self, lambda: f64) -> bool {
        lambda >= self.g3_min_population()
    }

    /// Upper bound on the expected number of evaluations. Evaluable for any
    /// `lambda`; callers should check [`Self::satisfies_g3`] to know whether
    /// it is a valid bound.
    pub fn level_based_bound(&self, lambda: f64) -> f64 {
        level_based_bound(&self.z, self.delta, lambda)
    }
}

/// `(4 / (gamma0 delta^2)) * ln(128 m / (z_* delta^2))`.
pub fn g3_min_population(m: usize, z_star: f64, delta: f64, gamma0: f64) -> f64 {
    let d2 = delta * delta;
    4.0 / (gamma0 * d2) * (128.0 * m as f64 / (z_star * d2)).ln()
}

/// `(8 / delta^2) * sum_j [lambda ln(6 delta lambda / (4 + z_j delta lambda)) + 1/z_j]`.
pub fn level_based_bound(z: &[f64], delta: f64, lambda: f64) -> f64 {
    let dl = delta * lambda;
    let sum = compensated_sum(
        z.iter()
            .map(|&zj| lambda * (6.0 * dl / (4.0 + zj * dl)).ln() + 1.0 / zj),
    );
    8.0 / (delta * delta) * sum
}

/// The √n-spaced OneMax thresholds `f_0 = 0`, `f_{i+1} = f_i + ceil(d sqrt(n - f_i))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSequence {
    pub n: usize,
    pub d: f64,
    pub f: Vec<usize>,
    /// First index with `f = n`.
    pub ell: usize,
}

impl LevelSequence {
    /// `(sqrt(n) / (d + 1), 2 sqrt(n) / d)`, which strictly contains `ell`.
    pub fn ell_bounds(&self) -> (f64, f64) {
        let r = (self.n as f64).sqrt();
        (r / (self.d + 1.0), 2.0 * r / self.d)
    }
}

pub fn level_sequence(n: usize, d: f64) -> Result<LevelSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidParameter(format!("spacing d = {d} outside (0, 1]")));
    }
    let mut f = vec![0usize];
    let mut cur = 0usize;
    while cur < n {
        let step = (d * ((n - cur) as f64).sqrt()).ceil() as usize;
        cur += step.max(1);
        f.push(cur);
    }
    if cur != n {
        return Err(Error::Precondition(format!(
            "level sequence overshot n = {n} (reached {cur})"
        )));
    }
    let seq = LevelSequence {
        n,
        d,
        ell: f.len() - 1,
        f,
    };
    let (lo, hi) = seq.ell_bounds();
    let ell = seq.ell as f64;
    if !(lo < ell && ell < hi) {
        return Err(Error::Precondition(format!(
            "level count {ell} outside ({lo}, {hi})"
        )));
    }
    Ok(seq)
}

fn check_population(mu: usize, lambda: usize) -> Result<()> {
    if mu == 0 || lambda <= mu {
        return Err(Error::Regime(format!(
            "need 0 < mu < lambda, got mu = {mu}, lambda = {lambda}"
        )));
    }
    Ok(())
}

/// LeadingOnes (and BinVal) partition: `m = n + 1`, `z_j = 1/(e n)`,
/// `gamma0 = mu / lambda`, `delta = min(1, lambda/(e mu) - 1)`.
pub fn preset_leadingones(n: usize, mu: usize, lambda: usize) -> Result<LevelPartition> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    check_population(mu, lambda)?;
    let ratio = lambda as f64 / (E * mu as f64);
    if ratio <= 1.0 {
        return Err(Error::Regime(format!(
            "lambda >= (1 + delta) e mu needs lambda > e mu = {:.4}, got lambda = {lambda}",
            E * mu as f64
        )));
    }
    Ok(LevelPartition {
        label: "leadingones".into(),
        m: n + 1,
        z: vec![1.0 / (E * n as f64); n],
        delta: (ratio - 1.0).min(1.0),
        gamma0: mu as f64 / lambda as f64,
        scheme: LevelScheme::LeadingOnes,
        advisories: Vec::new(),
    })
}

/// OneMax with `a ln n <= mu <= sqrt(n (1 - c))`: `m = n + 1`,
/// `z_j = c (n - j + 1) / n`, `gamma0 = mu / lambda`,
/// `1 + delta = (1 - c) lambda / (13 e mu)` capped at `delta = 1`.
///
/// The lower limit `a ln n` involves an unquantified constant and is only
/// reported as an advisory.
pub fn preset_onemax_small(n: usize, mu: usize, lambda: usize, c: f64, a: f64) -> Result<LevelPartition> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1)")));
    }
    check_population(mu, lambda)?;
    let (nf, muf, lf) = (n as f64, mu as f64, lambda as f64);
    let mu_max = (nf * (1.0 - c)).sqrt();
    if muf > mu_max {
        return Err(Error::Regime(format!(
            "mu <= sqrt(n (1 - c)) fails: mu = {mu} > {mu_max:.4}"
        )));
    }
    let lambda_min = 13.0 * E / (1.0 - c) * muf;
    if lf < lambda_min {
        return Err(Error::Regime(format!(
            "lambda >= (13 e / (1 - c)) mu fails: lambda = {lambda} < {lambda_min:.4}"
        )));
    }
    let one_plus_delta = (1.0 - c) * lf / (13.0 * E * muf);
    if one_plus_delta <= 1.0 {
        return Err(Error::Regime(format!(
            "(1 - c) lambda / (13 e mu) = {one_plus_delta} leaves no delta > 0"
        )));
    }
    let mut advisories = Vec::new();
    if muf < a * nf.ln() {
        advisories.push(format!(
            "advisory: mu >= a ln n fails for a = {a}: mu = {mu} < {:.4}",
            a * nf.ln()
        ));
    }
    Ok(LevelPartition {
        label: "onemax-small".into(),
        m: n + 1,
        z: (1..=n).map(|j| c * (n - j + 1) as f64 / nf).collect(),
        delta: (one_plus_delta - 1.0).min(1.0),
        gamma0: muf / lf,
        scheme: LevelScheme::OneMax,
        advisories,
    })
}

/// Largest admissible spacing: the positive root of `psi^-2 d^2 + d - 1 = 0`.
pub fn max_spacing(psi: f64) -> f64 {
    let psi2 = psi * psi;
    let disc = 1.0 + 4.0 / psi2;
    (disc.sqrt() - 1.0) * psi2 / 2.0
}

/// OneMax with `mu >= c sqrt(n) ln n`: levels from [`level_sequence`],
/// `z_j = kappa`, `gamma0 = mu / lambda <= psi / ((1 + delta) e)`.
///
/// `large_c` feeds the advisory check on the parent population size.
pub fn preset_onemax_large(
    n: usize,
    mu: usize,
    lambda: usize,
    d: f64,
    kappa: f64,
    psi: f64,
    large_c: f64,
) -> Result<LevelPartition> {
    if !(psi > 0.0 && psi <= 1.0) {
        return Err(Error::InvalidParameter(format!("psi = {psi} outside (0, 1]")));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} outside (0, 1]")));
    }
    check_population(mu, lambda)?;
    let d2 = max_spacing(psi);
    if !(d > 0.0 && d <= d2) {
        return Err(Error::Regime(format!(
            "0 < d <= d_2 fails: d = {d}, d_2 = {d2:.6e} for psi = {psi:.6e}"
        )));
    }
    let seq = level_sequence(n, d)?;
    let gamma0 = mu as f64 / lambda as f64;
    let one_plus_delta = psi / (E * gamma0);
    if one_plus_delta <= 1.0 {
        return Err(Error::Regime(format!(
            "mu / lambda <= psi / ((1 + delta) e) fails: mu / lambda = {gamma0:.6} >= psi / e = {:.6e}",
            psi / E
        )));
    }
    let mut advisories = Vec::new();
    let nf = n as f64;
    let mu_min = large_c * nf.sqrt() * nf.ln();
    if (mu as f64) < mu_min {
        advisories.push(format!(
            "advisory: mu >= c sqrt(n) ln n fails for c = {large_c}: mu = {mu} < {mu_min:.4}"
        ));
    }
    Ok(LevelPartition {
        label: "onemax-large".into(),
        m: seq.ell + 1,
        z: vec![kappa; seq.ell],
        delta: (one_plus_delta - 1.0).min(1.0),
        gamma0,
        scheme: LevelScheme::OneMaxSpaced { thresholds: seq.f },
        advisories,
    })
}

/// Evaluates both sides of
/// `E + d sqrt(n - E) >= f_prev + d sqrt(n - f_prev)` under the hypothesis
/// `E >= f_prev - ell / n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityG1 {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_inequality_g1(n: usize, d: f64, f_prev: usize, ell: usize, expectation: f64) -> Result<InequalityG1> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::Precondition(format!("d = {d} outside (0, 1]")));
    }
    if f_prev >= n {
        return Err(Error::Precondition(format!("f_prev = {f_prev} must be below n = {n}")));
    }
    if ell > n {
        return Err(Error::Precondition(format!("ell = {ell} exceeds n = {n}")));
    }
    let nf = n as f64;
    let floor = f_prev as f64 - ell as f64 / nf;
    if !(expectation >= floor) || expectation > nf {
        return Err(Error::Precondition(format!(
            "expectation {expectation} outside [f_prev - ell/n, n] = [{floor}, {nf}]"
        )));
    }
    let lhs = expectation + d * (nf - expectation).sqrt();
    let rhs = f_prev as f64 + d * (nf - f_prev as f64).sqrt();
    Ok(InequalityG1 {
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

/// Monte-Carlo estimate of one level's upgrade probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpgradeEstimate {
    /// 1-based level `j`.
    pub level: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// The partition's `z_j`.
    pub preset: f64,
}

/// Worst-case model at level `j` for the partition's scheme.
///
/// - LeadingOnes: the first `j - 1` marginals on the upper border, the rest
///   on the lower border.
/// - OneMax: the same configuration, whose `j - 1` expected ones put every
///   selected individual in `A_j`.
/// - Spaced OneMax: every marginal equal to `max(1/4, f_{j-1} / n)`, so the
///   expected number of ones is at least `f_{j-1}` with marginals at least
///   1/4.
pub fn worst_case_model(scheme: &LevelScheme, n: usize, level: usize) -> Result<MarginalModel> {
    let (lo, hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
    let probs = match scheme {
        LevelScheme::LeadingOnes | LevelScheme::OneMax => {
            (0..n).map(|i| if i + 1 < level { hi } else { lo }).collect()
        }
        LevelScheme::OneMaxSpaced { thresholds } => {
            let f_prev = *thresholds.get(level - 1).ok_or_else(|| {
                Error::InvalidParameter(format!("level {level} beyond partition"))
            })?;
            let p = (f_prev as f64 / n as f64).max(0.25).clamp(lo, hi);
            vec![p; n]
        }
        LevelScheme::Custom => {
            return Err(Error::InvalidParameter(
                "custom partitions have no worst-case configuration".into(),
            ))
        }
    };
    MarginalModel::from_probs(probs)
}

/// Estimates `Pr(offspring in A_{>= j+1})` at each level's worst-case
/// configuration with `samples` offspring per level.
pub fn empirical_zj(partition: &LevelPartition, n: usize, samples: usize, seed: u64) -> Result<Vec<UpgradeEstimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    if matches!(partition.scheme, LevelScheme::Custom) {
        return Err(Error::InvalidParameter(
            "custom partitions have no level function".into(),
        ));
    }
    (1..partition.m)
        .into_par_iter()
        .map(|level| {
            let model = worst_case_model(&partition.scheme, n, level)?;
            let sampler = Sampler::new(&model);
            let mut rng = stream(derive_seed(seed, &[LEVEL_TAG, level as u64]));
            let mut x = BitString::zeros(n);
            let mut hits = 0u64;
            for _ in 0..samples {
                sampler.sample_into(&mut x, &mut rng);
                if partition.scheme.level_of(&x).unwrap_or(0) > level {
                    hits += 1;
                }
            }
            let est = hits as f64 / samples as f64;
            Ok(UpgradeEstimate {
                level,
                estimate: est,
                std_error: (est * (1.0 - est) / samples as f64).sqrt(),
                preset: partition.z[level - 1],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn level_sequence_examples() {
        let s = level_sequence(25, 1.0).unwrap();
        assert_eq!(s.f, vec![0, 5, 10, 14, 18, 21, 23, 25]);
        assert_eq!(s.ell, 7);
        assert_eq!(s.ell_bounds(), (2.5, 10.0));

        let s = level_sequence(1, 1.0).unwrap();
        assert_eq!(s.f, vec![0, 1]);
        assert_eq!(s.ell, 1);

        let s = level_sequence(10_000, 0.5).unwrap();
        let (lo, hi) = s.ell_bounds();
        assert!((lo - 66.666_666).abs() < 1e-3 && hi == 400.0);
        assert!(lo < s.ell as f64 && (s.ell as f64) < hi);

        assert!(level_sequence(10, 0.0).is_err());
        assert!(level_sequence(10, 1.5).is_err());
        assert!(level_sequence(0, 0.5).is_err());
    }

    #[test]
    fn g3_examples() {
        let v = g3_min_population(101, 1.0 / (100.0 * E), 1.0, 0.25);
        assert!((v - 241.2).abs() < 0.05, "{v}");
        let v = g3_min_population(2, 1.0, 1.0, 0.5);
        assert!((v - 44.36).abs() < 0.01, "{v}");
        let a = g3_min_population(50, 0.01, 0.7, 0.3);
        let b = g3_min_population(100, 0.01, 0.7, 0.3);
        assert!(rel_close(b - a, 4.0 / (0.3 * 0.49) * 2f64.ln(), 1e-12));
    }

    #[test]
    fn bound_examples() {
        let p = LevelPartition::new("two", vec![0.5], 1.0, 0.5).unwrap();
        let v = p.level_based_bound(100.0);
        let expected = 8.0 * (100.0 * (600.0f64 / 54.0).ln() + 2.0);
        assert!(rel_close(v, expected, 1e-14));
        // 6 delta lambda = 4 + z delta lambda: log term vanishes.
        let lambda = 1.0;
        let z = 2.0;
        assert_eq!(level_based_bound(&[z], 1.0, lambda), 8.0 * (0.0 + 0.5));
    }

    #[test]
    fn partition_validation() {
        assert!(LevelPartition::new("x", vec![], 1.0, 0.5).is_err());
        assert!(LevelPartition::new("x", vec![0.0], 1.0, 0.5).is_err());
        assert!(LevelPartition::new("x", vec![0.5], 0.0, 0.5).is_err());
        assert!(LevelPartition::new("x", vec![0.5], 1.0, 1.0).is_err());
    }

    #[test]
    fn leadingones_preset() {
        let p = preset_leadingones(100, 10, 100).unwrap();
        assert_eq!(p.m, 101);
        assert_eq!(p.delta, 1.0);
        assert!(rel_close(p.z_star(), 1.0 / (100.0 * E), 1e-15));
        assert_eq!(p.gamma0, 0.1);
        assert!(p.level_based_bound(100.0).is_finite());

        // lambda just above e mu gives a small delta.
        let p = preset_leadingones(100, 10, 28).unwrap();
        assert!(rel_close(p.delta, 28.0 / (10.0 * E) - 1.0, 1e-12));
        // lambda below e mu has no admissible delta.
        assert!(matches!(preset_leadingones(100, 10, 27), Err(Error::Regime(_))));
    }

    #[test]
    fn leadingones_bound_scaling() {
        // O(n lambda ln lambda + n^2) at fixed mu / lambda.
        let ratio = |n: usize| {
            let lambda = 10 * n;
            let p = preset_leadingones(n, n, lambda).unwrap();
            let (nf, lf) = (n as f64, lambda as f64);
            p.level_based_bound(lf) / (nf * lf * lf.ln() + nf * nf)
        };
        let r: Vec<f64> = [100, 200, 400].iter().map(|&n| ratio(n)).collect();
        for w in r.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() <= 0.15, "{r:?}");
        }
    }

    #[test]
    fn onemax_small_preset() {
        let p = preset_onemax_small(100, 7, 495, 0.5, 1.0).unwrap();
        assert_eq!(p.m, 101);
        assert_eq!(p.z[0], 0.5);
        assert!(rel_close(p.z[99], 0.5 / 100.0, 1e-15));
        assert!(p.delta > 0.0 && p.delta < 0.01);
        assert!(p.advisories.is_empty());

        let err = preset_onemax_small(100, 8, 1000, 0.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("sqrt(n (1 - c))"), "{err}");
        let err = preset_onemax_small(100, 7, 400, 0.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("13 e"), "{err}");
        let p = preset_onemax_small(100, 3, 495, 0.5, 1.0).unwrap();
        assert_eq!(p.advisories.len(), 1);
    }

    #[test]
    fn onemax_small_bound_is_linear_in_n_lambda() {
        let c = 0.5;
        let ratio = |n: usize| {
            let mu = ((n as f64 * (1.0 - c)).sqrt().floor()) as usize;
            let lambda = (2.0 * 13.0 * E / (1.0 - c) * mu as f64).ceil() as usize;
            let p = preset_onemax_small(n, mu, lambda, c, 1.0).unwrap();
            assert_eq!(p.delta, 1.0);
            p.level_based_bound(lambda as f64) / (n as f64 * lambda as f64)
        };
        let r: Vec<f64> = [1_000, 2_000, 4_000, 8_000].iter().map(|&n| ratio(n)).collect();
        for w in r.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() <= 0.15, "{r:?}");
        }
    }

    #[test]
    fn max_spacing_is_root() {
        for psi in [DEFAULT_PSI, 0.01, 0.25, 1.0] {
            let d = max_spacing(psi);
            assert!(d > 0.0 && d < 1.0);
            let q = d * d / (psi * psi) + d - 1.0;
            assert!(q.abs() < 1e-9, "psi {psi}: {q}");
            // d / sqrt(1 - d) = psi at the root.
            assert!(rel_close(d / (1.0 - d).sqrt(), psi, 1e-6));
        }
    }

    #[test]
    fn onemax_large_preset() {
        let psi = 0.25;
        let d = max_spacing(psi);
        let n = 400;
        let mu = 120;
        let lambda = (2.0 * E * mu as f64 / psi).ceil() as usize;
        let p = preset_onemax_large(n, mu, lambda, d, 0.25, psi, 1.0).unwrap();
        let seq = level_sequence(n, d).unwrap();
        assert_eq!(p.m, seq.ell + 1);
        assert!(p.z.iter().all(|&z| z == 0.25));
        assert_eq!(p.delta, 1.0);
        assert!(p.gamma0 <= psi / ((1.0 + p.delta) * E) + 1e-15);

        let err = preset_onemax_large(n, mu, lambda, d * 1.01, 0.25, psi, 1.0).unwrap_err();
        assert!(err.to_string().contains("d_2"), "{err}");
        assert!(preset_onemax_large(n, mu, mu + 1, d, 0.25, psi, 1.0).is_err());
    }

    #[test]
    fn inequality_g1_examples() {
        let r = check_inequality_g1(100, 0.7, 50, 10, 50.0).unwrap();
        assert!(r.holds && r.lhs == r.rhs);
        assert!(check_inequality_g1(100, 1.0, 50, 10, 50.5).unwrap().holds);
        assert!(check_inequality_g1(100, 1.0, 50, 10, 49.8).is_err());
        assert!(check_inequality_g1(100, 1.2, 50, 10, 50.5).is_err());
    }

    #[test]
    fn inequality_g1_fails_just_below_f_prev() {
        // The hypothesis admits E in [f_prev - ell/n, f_prev), where
        // x + d sqrt(n - x) is increasing, so the inequality is reversed.
        let r = check_inequality_g1(100, 1.0, 50, 10, 49.95).unwrap();
        assert!(!r.holds, "{r:?}");
    }

    #[test]
    fn monotone_in_z_and_delta() {
        let lambda = 1e5;
        let z = vec![0.01, 0.02, 0.05, 0.1];
        let base = level_based_bound(&z, 0.8, lambda);
        for j in 0..z.len() {
            let mut bigger = z.clone();
            bigger[j] *= 1.5;
            assert!(level_based_bound(&bigger, 0.8, lambda) <= base);
        }
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let delta = k as f64 / 100.0;
            let v = level_based_bound(&z, delta, lambda);
            assert!(v <= prev, "delta {delta}");
            prev = v;
        }
    }

    #[test]
    fn empirical_leadingones_upgrade() {
        let n = 50;
        let p = preset_leadingones(n, 5, 50).unwrap();
        let est = empirical_zj(&p, n, 200_000, 4).unwrap();
        assert_eq!(est.len(), n);
        for e in est.iter().filter(|e| [1, 10, 25, 50].contains(&e.level)) {
            let q = 1.0 / n as f64;
            let exact = (1.0 - q).powi(e.level as i32 - 1) * q;
            let sigma = (exact * (1.0 - exact) / 200_000.0).sqrt();
            assert!((e.estimate - exact).abs() <= 3.0 * sigma, "{e:?} vs {exact}");
            assert!(exact >= e.preset);
        }
    }

    #[test]
    fn empirical_onemax_case0_upgrade() {
        let n = 60;
        let p = preset_onemax_small(n, 5, 400, 0.5, 1.0).unwrap();
        let est = empirical_zj(&p, n, 50_000, 9).unwrap();
        for e in &est {
            let floor = (n - e.level + 1) as f64 / (E * n as f64);
            assert!(e.estimate >= floor - 3.0 * e.std_error.max(1e-3), "{e:?} vs {floor}");
        }
    }

    #[test]
    fn level_functions() {
        let x: BitString = "1101100".parse().unwrap();
        assert_eq!(LevelScheme::LeadingOnes.level_of(&x), Some(3));
        assert_eq!(LevelScheme::OneMax.level_of(&x), Some(5));
        let spaced = LevelScheme::OneMaxSpaced {
            thresholds: vec![0, 3, 5, 6, 7],
        };
        assert_eq!(spaced.level_of(&x), Some(2));
        assert_eq!(spaced.level_of(&BitString::ones(7)), Some(5));
        assert_eq!(spaced.level_of(&BitString::zeros(7)), Some(1));
        assert_eq!(LevelScheme::Custom.level_of(&x), None);
    }

    proptest! {
        #[test]
        fn level_sequence_hits_n(n in 1usize..200_000, d in 0.001f64..=1.0) {
            let s = level_sequence(n, d).unwrap();
            prop_assert_eq!(*s.f.last().unwrap(), n);
            prop_assert!(s.f.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn g3_monotone(m in 2usize..10_000, z in 1e-6f64..1.0, delta in 0.01f64..=1.0, g in 0.01f64..0.99) {
            let v = g3_min_population(m, z, delta, g);
            prop_assert!(v > 0.0);
            prop_assert!(g3_min_population(m + 1, z, delta, g) > v);
            prop_assert!(g3_min_population(m, z * 0.5, delta, g) > v);
        }
    }
}
