use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitstring::Problem;
use crate::error::{Error, Result};
use crate::pb::compensated_sum;

use super::SweepResult;

/// Correlations closer than this are treated as equal when ranking.
pub const RHO_TIE: f64 = 1e-12;

/// One-constant growth models `c * g(n)`, in increasing asymptotic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GrowthModel {
    #[serde(rename = "n ln n")]
    NLogN,
    #[serde(rename = "n^1.5")]
    NPow15,
    #[serde(rename = "n^2")]
    NSquared,
    #[serde(rename = "n^2 ln n")]
    NSquaredLogN,
}

impl GrowthModel {
    pub const ALL: [GrowthModel; 4] = [
        GrowthModel::NLogN,
        GrowthModel::NPow15,
        GrowthModel::NSquared,
        GrowthModel::NSquaredLogN,
    ];

    pub fn g(self, n: f64) -> f64 {
        match self {
            GrowthModel::NLogN => n * n.ln(),
            GrowthModel::NPow15 => n * n.sqrt(),
            GrowthModel::NSquared => n * n,
            GrowthModel::NSquaredLogN => n * n * n.ln(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GrowthModel::NLogN => "n ln n",
            GrowthModel::NPow15 => "n^1.5",
            GrowthModel::NSquared => "n^2",
            GrowthModel::NSquaredLogN => "n^2 ln n",
        }
    }
}

impl fmt::Display for GrowthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrowthModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GrowthModel::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown growth model '{s}'")))
    }
}

/// Candidate models for a benchmark: three for OneMax and BinVal, four for
/// LeadingOnes.
pub fn models_for(problem: Problem) -> &'static [GrowthModel] {
    match problem {
        Problem::LeadingOnes => &GrowthModel::ALL,
        Problem::OneMax | Problem::BinVal => &GrowthModel::ALL[..3],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: GrowthModel,
    pub c: f64,
    pub rho: f64,
}

fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Pearson correlation; zero when either side has no variance.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Least-squares fit of `y = c g(n)`: `c = sum(y g) / sum(g^2)`, with `rho`
/// the Pearson correlation between `y` and the fitted values.
pub fn fit_model(n_values: &[usize], means: &[f64], model: GrowthModel) -> Result<ModelFit> {
    if n_values.len() != means.len() {
        return Err(Error::InvalidParameter(format!(
            "{} sizes but {} means",
            n_values.len(),
            means.len()
        )));
    }
    if n_values.len() < 2 {
        return Err(Error::InvalidParameter("fitting needs at least two points".into()));
    }
    if let Some(y) = means.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
        return Err(Error::InvalidParameter(format!("mean runtime {y} is not positive")));
    }
    let g: Vec<f64> = n_values.iter().map(|&n| model.g(n as f64)).collect();
    let gg = compensated_sum(g.iter().map(|v| v * v));
    if gg == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "model {model} is zero at every size"
        )));
    }
    let c = compensated_sum(g.iter().zip(means).map(|(a, b)| a * b)) / gg;
    let fitted: Vec<f64> = g.iter().map(|v| c * v).collect();
    Ok(ModelFit {
        model,
        c,
        rho: pearson(means, &fitted),
    })
}

/// Sorts by `rho` descending; near-ties go to the lower-order model.
pub fn rank_models(fits: &[ModelFit]) -> Vec<ModelFit> {
    let mut out = fits.to_vec();
    out.sort_by(|a, b| {
        if (a.rho - b.rho).abs() <= RHO_TIE {
            a.model.cmp(&b.model)
        } else {
            b.rho.partial_cmp(&a.rho).unwrap_or(Ordering::Equal)
        }
    });
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Ranked fits, best first.
    pub fits: Vec<ModelFit>,
    pub winner: GrowthModel,
}

impl FitReport {
    pub fn fit(&self, model: GrowthModel) -> Option<&ModelFit> {
        self.fits.iter().find(|f| f.model == model)
    }
}

pub fn fit_report(n_values: &[usize], means: &[f64], models: &[GrowthModel]) -> Result<FitReport> {
    if models.is_empty() {
        return Err(Error::InvalidParameter("no models to fit".into()));
    }
    let fits: Vec<ModelFit> = models
        .iter()
        .map(|&m| fit_model(n_values, means, m))
        .collect::<Result<_>>()?;
    let fits = rank_models(&fits);
    Ok(FitReport {
        winner: fits[0].model,
        fits,
    })
}

/// Fits the benchmark's candidate models to the sweep's mean evaluations.
pub fn fit_sweep(result: &SweepResult) -> Result<FitReport> {
    let (n, y) = result.means();
    fit_report(&n, &y, models_for(result.config.problem))
}
