//! Exact Poisson–Binomial distribution and checkers for the concentration
//! results used in level-based runtime proofs.
//!
//! The mass function is built by the usual convolution recurrence, adding
//! one Bernoulli variable at a time. Every step is a convex combination of
//! non-negative numbers, so double precision stays accurate to a few ulps
//! per step; a rational path ([`pmf_exact`]) exists for golden tests.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_f64;

/// Anti-concentration constant, as printed (four decimals).
pub const ETA: f64 = 0.4688;
/// Slack added to [`ETA`] when comparing, since the constant is rounded.
pub const ETA_SLACK: f64 = 1e-4;
/// Absolute tolerance when comparing probabilities against lower bounds.
pub const PROB_TOLERANCE: f64 = 1e-12;
/// How close a mean must be to an integer to count as one.
pub const INTEGER_MEAN_TOLERANCE: f64 = 1e-9;
/// Lower bound on `Pr(Y >= E[Y])` for marginals at least 1/4 obtained by
/// chaining the explicit constants of its proof: `p_min * (1/2) * (1/4)^7`.
pub const PMIN_QUARTER_CONSTANT: f64 = 0.25 * 0.5 * 6.103_515_625e-5;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Law of a sum of independent Bernoulli variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonBinomial {
    probs: Vec<f64>,
}

impl PoissonBinomial {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::InvalidParameter(format!(
                "success probability {i} = {p} outside [0, 1]"
            )));
        }
        Ok(Self { probs })
    }

    /// Number of Bernoulli components.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }

    pub fn variance(&self) -> f64 {
        compensated_sum(self.probs.iter().map(|p| p * (1.0 - p)))
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `pmf()[y] = Pr(Y = y)` for `y = 0..=k`, in O(k²).
    pub fn pmf(&self) -> Vec<f64> {
        let k = self.probs.len();
        let mut mass = vec![0.0; k + 1];
        mass[0] = 1.0;
        for (j, &p) in self.probs.iter().enumerate() {
            let q = 1.0 - p;
            for y in (1..=j + 1).rev() {
                mass[y] = mass[y] * q + mass[y - 1] * p;
            }
            mass[0] *= q;
        }
        mass
    }

    /// `Pr(Y >= y)`.
    pub fn tail_geq(&self, y: usize) -> f64 {
        tail_from(&self.pmf(), y)
    }

    /// Draws one value by sampling every component.
    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        self.probs.iter().filter(|&&p| unit_f64(rng) < p).count()
    }
}

fn tail_from(pmf: &[f64], y: usize) -> f64 {
    if y == 0 {
        return 1.0;
    }
    if y >= pmf.len() {
        return 0.0;
    }
    compensated_sum(pmf[y..].iter().copied()).min(1.0)
}

/// Smallest integer `y` with `y >= x`, treating values within
/// [`INTEGER_MEAN_TOLERANCE`] of an integer as that integer.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= INTEGER_MEAN_TOLERANCE {
        r
    } else {
        x.ceil()
    }
}

fn index_at_least(threshold: f64) -> usize {
    let c = ceil_snapped(threshold);
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}

/// Exact rational mass function.
pub fn pmf_exact(probs: &[BigRational]) -> Vec<BigRational> {
    let k = probs.len();
    let mut mass = vec![BigRational::zero(); k + 1];
    mass[0] = BigRational::one();
    for (j, p) in probs.iter().enumerate() {
        let q = BigRational::one() - p;
        for y in (1..=j + 1).rev() {
            mass[y] = &mass[y] * &q + &mass[y - 1] * p;
        }
        mass[0] = &mass[0] * &q;
    }
    mass
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Converts back to the nearest double.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("representable value")
}

/// Outcome of comparing a computed quantity with a bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// The computed probability or statistic.
    pub value: f64,
    /// The bound it is compared with.
    pub bound: f64,
    /// Signed distance to the bound, positive when satisfied with room.
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundReport {
    fn at_least(value: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            slack: value - bound,
            satisfied: value >= bound - PROB_TOLERANCE,
        }
    }
}

/// `Pr(Y > E[Y] - delta) >= min{1/13, delta / (1 + delta)}`.
pub fn check_feige(d: &PoissonBinomial, delta: f64) -> Result<BoundReport> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Precondition(format!("delta = {delta} must be positive")));
    }
    let cut = d.mean() - delta;
    // Y > cut  <=>  Y >= floor(cut) + 1 for integer Y.
    let r = cut.round();
    let first = if (cut - r).abs() <= INTEGER_MEAN_TOLERANCE {
        r + 1.0
    } else {
        cut.floor() + 1.0
    };
    let first = if first <= 0.0 { 0 } else { first as usize };
    let lhs = d.tail_geq(first);
    let rhs = (1.0 / 13.0f64).min(delta / (1.0 + delta));
    Ok(BoundReport::at_least(lhs, rhs))
}

/// `sigma * max_y Pr(Y = y) <= eta`.
pub fn check_anticoncentration(d: &PoissonBinomial) -> BoundReport {
    let sigma = d.std_dev();
    let peak = d.pmf().into_iter().fold(0.0f64, f64::max);
    let value = sigma * peak;
    BoundReport {
        value,
        bound: ETA,
        slack: ETA - value,
        satisfied: value <= ETA + ETA_SLACK,
    }
}

/// `Pr(Y >= E[Y]) >= 1/2` when `E[Y]` is an integer.
pub fn check_integer_mean_median(d: &PoissonBinomial) -> Result<BoundReport> {
    let mean = d.mean();
    let r = mean.round();
    if (mean - r).abs() > INTEGER_MEAN_TOLERANCE {
        return Err(Error::Precondition(format!("mean {mean} is not an integer")));
    }
    let value = d.tail_geq(r.max(0.0) as usize);
    Ok(BoundReport::at_least(value, 0.5))
}

/// `Pr(Y >= E[Y])` against [`PMIN_QUARTER_CONSTANT`] when every marginal is
/// at least 1/4.
pub fn check_pmin_quarter_bound(d: &PoissonBinomial) -> Result<BoundReport> {
    if d.is_empty() {
        return Err(Error::Precondition("need at least one component".into()));
    }
    if let Some(p) = d.probs().iter().find(|&&p| p < 0.25) {
        return Err(Error::Precondition(format!("marginal {p} below 1/4")));
    }
    let value = d.tail_geq(index_at_least(d.mean()));
    Ok(BoundReport::at_least(value, PMIN_QUARTER_CONSTANT))
}

/// `Pr(Y >= min{E[Y] + dstar * sqrt(k - floor(E[Y])), k})`, which must be
/// bounded away from zero. Only positivity is asserted.
pub fn check_ce_lemma(d: &PoissonBinomial, p_min: f64, dstar: f64) -> Result<BoundReport> {
    if !(p_min > 0.0 && p_min <= 1.0) {
        return Err(Error::Precondition(format!("p_min = {p_min} outside (0, 1]")));
    }
    if dstar < 1.0 / p_min {
        return Err(Error::Precondition(format!(
            "dstar = {dstar} below 1/p_min = {}",
            1.0 / p_min
        )));
    }
    if let Some(p) = d.probs().iter().find(|&&p| p < p_min) {
        return Err(Error::Precondition(format!("marginal {p} below p_min = {p_min}")));
    }
    let k = d.len() as f64;
    let mean = d.mean();
    let floor_mean = if (mean - mean.round()).abs() <= INTEGER_MEAN_TOLERANCE {
        mean.round()
    } else {
        mean.floor()
    };
    let threshold = (mean + dstar * (k - floor_mean).max(0.0).sqrt()).min(k);
    let value = d.tail_geq(index_at_least(threshold));
    Ok(BoundReport {
        value,
        bound: 0.0,
        slack: value,
        satisfied: value > 0.0,
    })
}
