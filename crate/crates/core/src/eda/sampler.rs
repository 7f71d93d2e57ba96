//! Sampling offspring from a marginal model.
//!
//! Positions whose marginal sits exactly on a border (`1/n` or `1 - 1/n`)
//! deviate from their likely value with probability `1/n`. Instead of one
//! Bernoulli draw per such position, the sampler copies the likely values
//! and jumps between deviations with geometric gaps, which is exact and
//! costs O(1) expected draws per individual for the bordered part. Interior
//! marginals get one 64-bit uniform draw each.

use rand::RngCore;

use super::MarginalModel;
use crate::bitstring::{mask_of, words_for, BitString};
use crate::rng::unit_f64;

#[derive(Clone, Debug)]
pub(crate) struct Sampler {
    n: usize,
    base: Vec<u64>,
    border: Vec<u32>,
    interior: Vec<(u32, u64, u64)>,
    ln_keep: f64,
}

/// `p` scaled to a 64-bit threshold; a draw `u < threshold` succeeds with
/// probability `p` up to 2^-64.
#[inline]
fn threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

impl Sampler {
    pub(crate) fn new(model: &MarginalModel) -> Self {
        let n = model.n();
        let mut s = Sampler {
            n,
            base: vec![0; words_for(n)],
            border: Vec::new(),
            interior: Vec::new(),
            ln_keep: (-1.0 / n as f64).ln_1p(),
        };
        s.rebuild(model);
        s
    }

    pub(crate) fn rebuild(&mut self, model: &MarginalModel) {
        debug_assert_eq!(model.n(), self.n);
        let (lo, hi) = (model.lower_border(), model.upper_border());
        self.base.iter_mut().for_each(|w| *w = 0);
        self.border.clear();
        self.interior.clear();
        for (i, &p) in model.probs().iter().enumerate() {
            let (w, m) = mask_of(i);
            if p >= hi {
                self.base[w] |= m;
                self.border.push(i as u32);
            } else if p <= lo {
                self.border.push(i as u32);
            } else {
                self.interior.push((w as u32, m, threshold(p)));
            }
        }
    }

    /// Gap to the next deviation among bordered positions.
    #[inline]
    fn gap(&self, rng: &mut impl RngCore, limit: usize) -> usize {
        let u = 1.0 - unit_f64(rng);
        let g = (u.ln() / self.ln_keep).floor();
        if g >= limit as f64 {
            limit
        } else {
            g as usize
        }
    }

    pub(crate) fn sample_into(&self, x: &mut BitString, rng: &mut impl RngCore) {
        debug_assert_eq!(x.len(), self.n);
        let words = x.words_mut();
        words.copy_from_slice(&self.base);
        for &(w, m, t) in &self.interior {
            if rng.next_u64() < t {
                words[w as usize] |= m;
            }
        }
        let len = self.border.len();
        if len > 0 {
            let mut i = self.gap(rng, len);
            while i < len {
                x.flip(self.border[i] as usize);
                i += 1 + self.gap(rng, len);
            }
        }
    }
}
