//! The UMDA with margins and its PBIL generalisation.
//!
//! One generation samples `lambda` offspring from the product distribution
//! given by the marginals, keeps the `mu` fittest (ties broken uniformly at
//! random), and moves each marginal towards the frequency of ones among the
//! survivors:
//!
//! ```text
//! p'(i) = clamp((1 - rho) * p(i) + rho * X_i / mu, 1/n, 1 - 1/n)
//! ```
//!
//! `rho = 1` is the UMDA. Smoothing is applied before clamping.

mod sampler;
mod selection;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bitstring::{BitString, Fitness, Objective};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

pub(crate) use sampler::Sampler;

/// Default generation cap for a single run.
pub const DEFAULT_MAX_GENERATIONS: u64 = 100_000;

/// Probability vector over the `n` positions, kept inside
/// `[1/n, 1 - 1/n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalModel {
    probs: Vec<f64>,
}

impl MarginalModel {
    /// The initial model, `p(i) = 1/2` everywhere.
    pub fn uniform(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            probs: vec![0.5; n],
        })
    }

    /// Every marginal on the upper border.
    pub fn pinned_high(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            probs: vec![1.0 - 1.0 / n as f64; n],
        })
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        check_size(n)?;
        let (lo, hi) = borders(n);
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, &p)| !(lo..=hi).contains(&p))
        {
            return Err(Error::InvalidParameter(format!(
                "marginal {i} = {p} outside [{lo}, {hi}]"
            )));
        }
        Ok(Self { probs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn lower_border(&self) -> f64 {
        borders(self.n()).0
    }

    #[inline]
    pub fn upper_border(&self) -> f64 {
        borders(self.n()).1
    }

    /// Applies the update rule given per-position one-counts among `mu`
    /// selected individuals.
    pub fn update_from_counts(&mut self, counts: &[u32], mu: usize, rho: f64) {
        assert_eq!(counts.len(), self.n());
        let (lo, hi) = borders(self.n());
        let mu = mu as f64;
        for (p, &c) in self.probs.iter_mut().zip(counts) {
            let q = c as f64 / mu;
            let raw = if rho == 1.0 { q } else { (1.0 - rho) * *p + rho * q };
            *p = raw.clamp(lo, hi);
        }
    }
}

#[inline]
fn borders(n: usize) -> (f64, f64) {
    let lo = 1.0 / n as f64;
    (lo, 1.0 - lo)
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "problem size n = {n} must be at least 2"
        )));
    }
    Ok(())
}

/// Parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmParams {
    pub n: usize,
    pub lambda: usize,
    pub mu: usize,
    /// Smoothing parameter in `(0, 1]`; `1` gives the UMDA.
    pub rho: f64,
    pub max_generations: u64,
    pub seed: u64,
}

impl AlgorithmParams {
    pub fn umda(n: usize, lambda: usize, mu: usize, seed: u64) -> Self {
        Self {
            n,
            lambda,
            mu,
            rho: 1.0,
            max_generations: DEFAULT_MAX_GENERATIONS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_size(self.n)?;
        if self.mu < 1 || self.mu >= self.lambda {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= mu < lambda, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothing rho = {} outside (0, 1]",
                self.rho
            )));
        }
        Ok(())
    }
}

/// A set of individuals, optionally sorted best first.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub individuals: Vec<BitString>,
    pub sorted: bool,
}

impl Population {
    pub fn new(individuals: Vec<BitString>) -> Self {
        Self {
            individuals,
            sorted: false,
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn fitnesses<F: Objective + ?Sized>(&self, objective: &F) -> Vec<Fitness> {
        self.individuals.iter().map(|x| objective.evaluate(x)).collect()
    }

    /// Number of ones per position.
    pub fn column_counts(&self, n: usize) -> Vec<u32> {
        let mut counts = vec![0u32; n];
        for x in &self.individuals {
            add_counts(&mut counts, x);
        }
        counts
    }
}

#[inline]
fn add_counts(counts: &mut [u32], x: &BitString) {
    for i in x.ones_positions() {
        counts[i] += 1;
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Fitness evaluations until the optimum was first sampled, counting
    /// the whole generation in which it appeared (`lambda * generations`).
    pub evaluations: u64,
    /// Generations sampled, including the successful one.
    pub generations: u64,
    pub success: bool,
    pub seed: u64,
}

/// Draws `lambda` independent offspring from `model`.
pub fn sample_population(model: &MarginalModel, lambda: usize, rng: &mut impl RngCore) -> Population {
    let sampler = Sampler::new(model);
    let individuals = (0..lambda)
        .map(|_| {
            let mut x = BitString::zeros(model.n());
            sampler.sample_into(&mut x, rng);
            x
        })
        .collect();
    Population::new(individuals)
}

/// Keeps the `mu` fittest individuals, best first, breaking ties uniformly
/// at random.
pub fn truncation_select<F: Objective + ?Sized>(
    pop: &Population,
    mu: usize,
    objective: &F,
    rng: &mut impl RngCore,
) -> Result<Population> {
    if mu > pop.len() {
        return Err(Error::Precondition(format!(
            "cannot select mu = {mu} from {} individuals",
            pop.len()
        )));
    }
    let mut keys = Vec::new();
    let mut order = Vec::new();
    selection::top_indices(&pop.individuals, mu, objective, rng, &mut keys, &mut order);
    Ok(Population {
        individuals: order.iter().map(|&i| pop.individuals[i].clone()).collect(),
        sorted: true,
    })
}

/// Returns the model after one update from the selected individuals.
pub fn update_model(model: &MarginalModel, selected: &Population, rho: f64) -> Result<MarginalModel> {
    if selected.is_empty() {
        return Err(Error::Precondition("selected population is empty".into()));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!("smoothing rho = {rho} outside (0, 1]")));
    }
    let counts = selected.column_counts(model.n());
    let mut next = model.clone();
    next.update_from_counts(&counts, selected.len(), rho);
    Ok(next)
}

/// Runs the algorithm from the uniform model until the optimum is sampled or
/// the generation cap is reached.
pub fn run<F: Objective + ?Sized>(params: &AlgorithmParams, objective: &F) -> Result<TrialRecord> {
    run_from(params, objective, MarginalModel::uniform(params.n)?)
}

/// Like [`run`] but starting from an arbitrary model.
pub fn run_from<F: Objective + ?Sized>(
    params: &AlgorithmParams,
    objective: &F,
    model: MarginalModel,
) -> Result<TrialRecord> {
    params.validate()?;
    if model.n() != params.n {
        return Err(Error::InvalidParameter(format!(
            "model has {} marginals but n = {}",
            model.n(),
            params.n
        )));
    }
    let mut umda = Umda::new(params, objective, model);
    while umda.generation < params.max_generations {
        if umda.step() {
            return Ok(TrialRecord {
                evaluations: umda.generation * params.lambda as u64,
                generations: umda.generation,
                success: true,
                seed: params.seed,
            });
        }
    }
    Ok(TrialRecord {
        evaluations: umda.generation * params.lambda as u64,
        generations: umda.generation,
        success: false,
        seed: params.seed,
    })
}

/// Generation-by-generation driver with reusable buffers.
pub struct Umda<'a, F: ?Sized> {
    params: AlgorithmParams,
    objective: &'a F,
    model: MarginalModel,
    sampler: Sampler,
    rng: StreamRng,
    population: Vec<BitString>,
    keys: Vec<u64>,
    order: Vec<usize>,
    counts: Vec<u32>,
    generation: u64,
}

impl<'a, F: Objective + ?Sized> Umda<'a, F> {
    pub fn new(params: &AlgorithmParams, objective: &'a F, model: MarginalModel) -> Self {
        let n = params.n;
        Self {
            params: params.clone(),
            objective,
            sampler: Sampler::new(&model),
            model,
            rng: stream(params.seed),
            population: (0..params.lambda).map(|_| BitString::zeros(n)).collect(),
            keys: Vec::with_capacity(params.lambda),
            order: Vec::with_capacity(params.lambda),
            counts: vec![0; n],
            generation: 0,
        }
    }

    pub fn model(&self) -> &MarginalModel {
        &self.model
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Samples one generation; returns true if it contains an optimum, in
    /// which case the model is left untouched.
    pub fn step(&mut self) -> bool {
        for x in &mut self.population {
            self.sampler.sample_into(x, &mut self.rng);
        }
        self.generation += 1;
        if self.population.iter().any(|x| self.objective.is_optimal(x)) {
            return true;
        }
        selection::top_indices(
            &self.population,
            self.params.mu,
            self.objective,
            &mut self.rng,
            &mut self.keys,
            &mut self.order,
        );
        self.counts.iter_mut().for_each(|c| *c = 0);
        for &i in &self.order {
            add_counts(&mut self.counts, &self.population[i]);
        }
        self.model
            .update_from_counts(&self.counts, self.params.mu, self.params.rho);
        self.sampler.rebuild(&self.model);
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::Problem;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// `|observed - expected| <= k * sigma` for a binomial proportion.
    fn within_sigma(hits: u64, trials: u64, p: f64, k: f64) -> bool {
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        ((hits as f64 / trials as f64) - p).abs() <= k * sigma
    }

    #[test]
    fn update_examples() {
        let n = 10;
        let model = MarginalModel::uniform(n).unwrap();
        let col = |bits: [bool; 4]| {
            Population::new(
                bits.iter()
                    .map(|&b| {
                        let mut x = BitString::zeros(n);
                        x.set(0, b);
                        x
                    })
                    .collect(),
            )
        };
        let m = update_model(&model, &col([true, true, false, true]), 1.0).unwrap();
        assert_eq!(m.probs()[0], 0.75);
        let m = update_model(&model, &col([false; 4]), 1.0).unwrap();
        assert_eq!(m.probs()[0], 0.1);
        assert_eq!(m.probs()[1], 0.1);

        // PBIL convex combination: 0.5 * 0.5 + 0.5 * 0.9.
        let mut m = MarginalModel::uniform(n).unwrap();
        let mut counts = vec![0; n];
        counts[0] = 9;
        m.update_from_counts(&counts, 10, 0.5);
        assert!((m.probs()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(AlgorithmParams::umda(10, 10, 5, 0).validate().is_ok());
        assert!(AlgorithmParams::umda(1, 10, 5, 0).validate().is_err());
        assert!(AlgorithmParams::umda(10, 5, 5, 0).validate().is_err());
        assert!(AlgorithmParams::umda(10, 5, 0, 0).validate().is_err());
        let mut p = AlgorithmParams::umda(10, 10, 5, 0);
        p.rho = 0.0;
        assert!(p.validate().is_err());
        p.rho = 1.5;
        assert!(p.validate().is_err());
        assert!(MarginalModel::from_probs(vec![0.5, 0.0, 0.5]).is_err());
    }

    #[test]
    fn empty_population_when_lambda_zero() {
        let model = MarginalModel::uniform(8).unwrap();
        let mut rng = stream(1);
        assert!(sample_population(&model, 0, &mut rng).is_empty());
    }

    #[test]
    fn all_ones_frequency_at_upper_border() {
        let n = 100;
        let model = MarginalModel::pinned_high(n).unwrap();
        let mut rng = stream(11);
        let trials = 100_000u64;
        let hits = (0..trials)
            .filter(|_| sample_population(&model, 1, &mut rng).individuals[0].is_all_ones())
            .count() as u64;
        let p = (1.0 - 1.0 / n as f64).powi(n as i32);
        assert!(within_sigma(hits, trials, p, 3.0), "hits {hits}, p {p}");
    }

    #[test]
    fn fair_marginals_give_half_frequencies() {
        let n = 40;
        let model = MarginalModel::uniform(n).unwrap();
        let mut rng = stream(12);
        let pop = sample_population(&model, 100_000, &mut rng);
        let counts = pop.column_counts(n);
        for c in counts {
            assert!(within_sigma(c as u64, 100_000, 0.5, 3.5), "count {c}");
        }
    }

    #[test]
    fn mixed_marginals_match_per_position() {
        // Border and interior positions interleaved across a word boundary.
        let n = 70;
        let (lo, hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
        let probs: Vec<f64> = (0..n)
            .map(|i| match i % 4 {
                0 => lo,
                1 => hi,
                2 => 0.3,
                _ => 0.85,
            })
            .collect();
        let model = MarginalModel::from_probs(probs.clone()).unwrap();
        let mut rng = stream(13);
        let trials = 200_000u64;
        let counts = sample_population(&model, trials as usize, &mut rng).column_counts(n);
        for (i, (&c, &p)) in counts.iter().zip(&probs).enumerate() {
            assert!(within_sigma(c as u64, trials, p, 4.0), "position {i}: {c} vs {p}");
        }
    }

    #[test]
    fn truncation_examples() {
        // Fitnesses (5, 3, 3, 1) under OneMax.
        let pop = Population::new(vec![bs("11111"), bs("11100"), bs("00111"), bs("10000")]);
        let mut rng = stream(5);
        let reps = 10_000u64;
        let mut first_three = 0u64;
        for _ in 0..reps {
            let sel = truncation_select(&pop, 2, &Problem::OneMax, &mut rng).unwrap();
            assert_eq!(sel.individuals[0], bs("11111"));
            if sel.individuals[1] == bs("11100") {
                first_three += 1;
            } else {
                assert_eq!(sel.individuals[1], bs("00111"));
            }
        }
        assert!(within_sigma(first_three, reps, 0.5, 3.0), "{first_three}");

        let eq = Population::new(vec![bs("10"), bs("01"), bs("10")]);
        let all = truncation_select(&eq, 3, &Problem::OneMax, &mut rng).unwrap();
        assert_eq!(all.len(), 3);

        let distinct = Population::new(vec![bs("100"), bs("111"), bs("000"), bs("110")]);
        let top = truncation_select(&distinct, 2, &Problem::OneMax, &mut rng).unwrap();
        assert_eq!(top.individuals, vec![bs("111"), bs("110")]);
        assert!(top.sorted);

        assert!(truncation_select(&distinct, 5, &Problem::OneMax, &mut rng).is_err());
    }

    #[test]
    fn tied_group_order_is_uniform() {
        // Three equal individuals distinguished only by identity: each of the
        // 3! orders should appear with probability 1/6.
        let a = bs("1100");
        let b = bs("1010");
        let c = bs("0110");
        let pop = Population::new(vec![a.clone(), b.clone(), c.clone()]);
        let mut rng = stream(77);
        let reps = 60_000u64;
        let mut seen = std::collections::HashMap::new();
        for _ in 0..reps {
            let sel = truncation_select(&pop, 3, &Problem::OneMax, &mut rng).unwrap();
            *seen.entry(sel.individuals).or_insert(0u64) += 1;
        }
        assert_eq!(seen.len(), 6);
        for &count in seen.values() {
            assert!(within_sigma(count, reps, 1.0 / 6.0, 4.0), "{count}");
        }
    }

    #[test]
    fn cap_zero_means_no_evaluations() {
        let mut p = AlgorithmParams::umda(10, 10, 5, 3);
        p.max_generations = 0;
        let r = run(&p, &Problem::OneMax).unwrap();
        assert!(!r.success);
        assert_eq!(r.evaluations, 0);
        assert_eq!(r.generations, 0);
    }

    #[test]
    fn cap_hit_is_reported_not_raised() {
        let mut p = AlgorithmParams::umda(200, 4, 2, 3);
        p.max_generations = 3;
        let r = run(&p, &Problem::LeadingOnes).unwrap();
        assert!(!r.success);
        assert_eq!(r.generations, 3);
        assert_eq!(r.evaluations, 12);
    }

    #[test]
    fn tiny_onemax_runs() {
        let mut evals: Vec<u64> = (0..100)
            .map(|s| {
                let p = AlgorithmParams::umda(2, 10, 5, s);
                let r = run(&p, &Problem::OneMax).unwrap();
                assert!(r.success);
                assert_eq!(r.evaluations, 10 * r.generations);
                assert!(r.evaluations <= 10 * p.max_generations);
                r.evaluations
            })
            .collect();
        evals.sort_unstable();
        let median = evals[50];
        assert!((10..=200).contains(&median), "median {median}");
    }

    #[test]
    fn runs_are_deterministic() {
        for problem in Problem::ALL {
            let p = AlgorithmParams::umda(40, 40, 7, 99);
            assert_eq!(run(&p, &problem).unwrap(), run(&p, &problem).unwrap());
        }
    }

    #[test]
    fn pinned_model_succeeds_fast() {
        // From the upper borders one offspring is optimal with probability
        // (1 - 1/n)^n, so the first generation succeeds with probability
        // 1 - (1 - (1 - 1/n)^n)^lambda. A model that stayed pinned would
        // need a geometric number of generations with mean at most e.
        let n = 20;
        let lambda = 2;
        let p_one = (1.0 - 1.0 / n as f64).powi(n as i32);
        let p_gen = 1.0 - (1.0 - p_one).powi(lambda as i32);
        assert!(1.0 / p_gen <= std::f64::consts::E);
        let reps = 5_000u64;
        let mut first = 0u64;
        for s in 0..reps {
            let mut p = AlgorithmParams::umda(n, lambda, 1, s);
            p.max_generations = 1;
            let r = run_from(&p, &Problem::OneMax, MarginalModel::pinned_high(n).unwrap()).unwrap();
            first += u64::from(r.success);
        }
        assert!(within_sigma(first, reps, p_gen, 3.0), "{first}");
        assert!(reps as f64 / first as f64 <= std::f64::consts::E);
    }

    /// A straightforward UMDA written from the algorithm description alone:
    /// per-bit Bernoulli sampling with `rand::StdRng`, full sort with a
    /// shuffled tiebreak.
    fn reference_generations(n: usize, lambda: usize, mu: usize, seed: u64) -> u64 {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let (lo, hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
        let mut p = vec![0.5; n];
        for t in 1.. {
            let mut pop: Vec<Vec<bool>> = (0..lambda)
                .map(|_| p.iter().map(|&pi| rng.gen::<f64>() < pi).collect())
                .collect();
            if pop.iter().any(|x| x.iter().all(|&b| b)) {
                return t;
            }
            use rand::seq::SliceRandom;
            pop.shuffle(&mut rng);
            pop.sort_by_key(|x| std::cmp::Reverse(x.iter().filter(|&&b| b).count()));
            for i in 0..n {
                let ones = pop[..mu].iter().filter(|x| x[i]).count();
                p[i] = (ones as f64 / mu as f64).clamp(lo, hi);
            }
        }
        unreachable!()
    }

    #[test]
    fn matches_reference_implementation() {
        // n = 2 has both borders at 1/2, so each generation succeeds with
        // probability 1 - (3/4)^lambda; check both implementations against
        // that and against each other.
        let (n, lambda, mu) = (2, 3, 1);
        let reps = 20_000u64;
        let ours: Vec<u64> = (0..reps)
            .map(|s| run(&AlgorithmParams::umda(n, lambda, mu, s), &Problem::OneMax).unwrap().generations)
            .collect();
        let theirs: Vec<u64> = (0..reps).map(|s| reference_generations(n, lambda, mu, s)).collect();
        let q = 1.0 - 0.75f64.powi(lambda as i32);
        for sample in [&ours, &theirs] {
            let first = sample.iter().filter(|&&g| g == 1).count() as u64;
            assert!(within_sigma(first, reps, q, 4.0));
            let mean = sample.iter().sum::<u64>() as f64 / reps as f64;
            let sd = ((1.0 - q) / (q * q) / reps as f64).sqrt();
            assert!((mean - 1.0 / q).abs() <= 4.0 * sd, "mean {mean}");
        }

        // A size where the model actually moves: compare mean generations.
        let (n, lambda, mu) = (6, 8, 3);
        let reps = 4_000u64;
        let a: Vec<f64> = (0..reps)
            .map(|s| run(&AlgorithmParams::umda(n, lambda, mu, s), &Problem::OneMax).unwrap().generations as f64)
            .collect();
        let b: Vec<f64> = (0..reps).map(|s| reference_generations(n, lambda, mu, s) as f64).collect();
        let stats = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (m, var / v.len() as f64)
        };
        let ((ma, va), (mb, vb)) = (stats(&a), stats(&b));
        assert!((ma - mb).abs() <= 4.0 * (va + vb).sqrt(), "{ma} vs {mb}");
    }

    #[test]
    fn identity_selection_is_a_martingale() {
        // mu = lambda and rho = 1: E[X_i / mu] = p(i).
        let n = 12;
        let probs: Vec<f64> = (0..n).map(|i| 0.15 + 0.06 * i as f64).collect();
        let model = MarginalModel::from_probs(probs.clone()).unwrap();
        let mut rng = stream(21);
        let lambda = 10;
        let reps = 20_000;
        let mut sums = vec![0.0; n];
        for _ in 0..reps {
            let pop = sample_population(&model, lambda, &mut rng);
            let counts = pop.column_counts(n);
            for (s, c) in sums.iter_mut().zip(counts) {
                *s += c as f64 / lambda as f64;
            }
        }
        for (i, (&s, &p)) in sums.iter().zip(&probs).enumerate() {
            let mean = s / reps as f64;
            let sigma = (p * (1.0 - p) / (lambda * reps) as f64).sqrt();
            assert!((mean - p).abs() <= 3.5 * sigma, "position {i}: {mean} vs {p}");
        }
    }

    proptest! {
        #[test]
        fn updates_stay_within_borders(
            n in 2usize..80,
            mu in 1usize..20,
            rho in 0.01f64..=1.0,
            seed in any::<u64>(),
        ) {
            let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
            let probs: Vec<f64> = (0..n).map(|_| {
                let (lo, hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
                lo + (hi - lo) * rng.gen::<f64>()
            }).collect();
            let model = MarginalModel::from_probs(probs).unwrap();
            let selected = Population::new((0..mu).map(|_| {
                let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                BitString::from_bits(&bits)
            }).collect());
            let next = update_model(&model, &selected, rho).unwrap();
            for &p in next.probs() {
                prop_assert!(p >= next.lower_border() && p <= next.upper_border());
            }
        }
    }
}
