//! Heapsort: insert everything, then delete-min until empty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forest::FixPolicy;
use crate::heap::Queue;
use crate::stats::StatsRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortRun {
    pub sorted: Vec<i64>,
    pub comparisons: u64,
    pub rearrangements: u64,
}

/// `n` uniform 32-bit keys from `seed`.
pub fn random_keys(n: usize, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| i64::from(rng.gen::<u32>())).collect()
}

pub fn heapsort(keys: &[i64], policy: FixPolicy) -> SortRun {
    heapsort_with(keys, policy, |_| {})
}

/// Like [`heapsort`], calling `on_step` after each of the `2n` operations.
pub fn heapsort_with(
    keys: &[i64],
    policy: FixPolicy,
    mut on_step: impl FnMut(&StatsRecord),
) -> SortRun {
    let mut q: Queue<i64, ()> = Queue::new(policy);
    for (i, &k) in keys.iter().enumerate() {
        q.insert(k, ());
        on_step(&StatsRecord::capture(i, "insert", &q));
    }
    let mut sorted = Vec::with_capacity(keys.len());
    while let Ok((k, ())) = q.delete_min() {
        sorted.push(k);
        on_step(&StatsRecord::capture(
            keys.len() + sorted.len() - 1,
            "delete-min",
            &q,
        ));
    }
    SortRun {
        sorted,
        comparisons: q.comparisons(),
        rearrangements: q.ledger().rearrangements(),
    }
}
