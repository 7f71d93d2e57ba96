//! Truncation selection with uniformly random tie-breaking.
//!
//! Individuals are ranked by (fitness descending, fresh uniform 64-bit key
//! ascending), with the index as a final tiebreak for the 2^-64 chance of a
//! key collision. Within a group of equal fitness the keys induce a uniform
//! random order.

use std::cmp::Ordering;

use rand::RngCore;

use crate::bitstring::{BitString, Objective};

/// Fills `order` with the indices of the `mu` best individuals, best first.
pub(crate) fn top_indices<F: Objective + ?Sized>(
    individuals: &[BitString],
    mu: usize,
    objective: &F,
    rng: &mut impl RngCore,
    keys: &mut Vec<u64>,
    order: &mut Vec<usize>,
) {
    let lambda = individuals.len();
    debug_assert!(mu <= lambda);
    keys.clear();
    keys.extend((0..lambda).map(|_| rng.next_u64()));
    order.clear();
    order.extend(0..lambda);
    if mu == 0 {
        order.clear();
        return;
    }
    let keys = &*keys;
    let rank = |&a: &usize, &b: &usize| -> Ordering {
        objective
            .compare(&individuals[b], &individuals[a])
            .then_with(|| keys[a].cmp(&keys[b]))
            .then_with(|| a.cmp(&b))
    };
    if mu < lambda {
        order.select_nth_unstable_by(mu - 1, rank);
        order.truncate(mu);
    }
    order.sort_unstable_by(rank);
}
