//! Height-indexed buckets of perfect trees.
//!
//! The count of trees at height `h` is digit `h` of a number written in
//! place values `2^(h+1) - 1`; the forest's element count is the value of
//! that number. Fixing is carry propagation: three trees of one height are
//! rearranged into one taller tree and two shorter ones.

use std::collections::BTreeMap;
use std::num::NonZeroU32;

use crate::compare::{CountingComparator, KeyOrder};
use crate::ledger::PotentialLedger;
use crate::tree::{perfect_size, NodeArena, PerfectTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixMode {
    /// Fix until every digit is at most 2.
    Eager,
    /// A bounded number of fixes per operation; digits stay at most 4.
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixPolicy {
    mode: FixMode,
    relaxed_budget: NonZeroU32,
}

impl Default for FixPolicy {
    fn default() -> Self {
        Self::eager()
    }
}

impl FixPolicy {
    pub fn eager() -> Self {
        Self {
            mode: FixMode::Eager,
            relaxed_budget: NonZeroU32::MIN,
        }
    }

    /// Relaxed policy with `budget` fixes attempted per operation. `None` if
    /// the budget is zero.
    pub fn relaxed(budget: u32) -> Option<Self> {
        Some(Self {
            mode: FixMode::Relaxed,
            relaxed_budget: NonZeroU32::new(budget)?,
        })
    }

    pub fn mode(&self) -> FixMode {
        self.mode
    }

    pub fn relaxed_budget(&self) -> u32 {
        self.relaxed_budget.get()
    }

    /// Largest digit allowed once an operation completes.
    pub fn digit_bound(&self) -> usize {
        match self.mode {
            FixMode::Eager => 2,
            FixMode::Relaxed => 4,
        }
    }
}

/// Position of a tree inside the forest: bucket height and index in bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreePos {
    pub height: u32,
    pub index: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Forest {
    buckets: BTreeMap<u32, Vec<PerfectTree>>,
    size: usize,
    policy: FixPolicy,
}

impl Forest {
    pub fn new(policy: FixPolicy) -> Self {
        Self {
            buckets: BTreeMap::new(),
            size: 0,
            policy,
        }
    }

    pub fn policy(&self) -> FixPolicy {
        self.policy
    }

    /// Total element count.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of trees of height `h`.
    pub fn digit(&self, h: u32) -> usize {
        self.buckets.get(&h).map_or(0, Vec::len)
    }

    /// Digits from height 0 up to the tallest tree; empty for an empty forest.
    pub fn digits(&self) -> Vec<usize> {
        let Some((&top, _)) = self.buckets.last_key_value() else {
            return Vec::new();
        };
        (0..=top).map(|h| self.digit(h)).collect()
    }

    pub fn max_digit(&self) -> usize {
        self.buckets.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn tree_count(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    /// Sum of tree heights, from bucket bookkeeping.
    pub fn height_sum(&self) -> u64 {
        self.buckets
            .iter()
            .map(|(&h, trees)| u64::from(h) * trees.len() as u64)
            .sum()
    }

    /// Trees in bucket order: ascending height, then position.
    pub fn trees(&self) -> impl Iterator<Item = (TreePos, PerfectTree)> + '_ {
        self.buckets.iter().flat_map(|(&height, trees)| {
            trees
                .iter()
                .enumerate()
                .map(move |(index, &t)| (TreePos { height, index }, t))
        })
    }

    /// Appends `tree` to its height's bucket. Does not fix.
    pub fn add_tree(&mut self, tree: PerfectTree) {
        self.size += tree.size();
        self.buckets.entry(tree.height()).or_default().push(tree);
    }

    /// Removes and returns the tree at `pos`, keeping bucket order.
    pub fn take_tree(&mut self, pos: TreePos) -> PerfectTree {
        let bucket = self
            .buckets
            .get_mut(&pos.height)
            .expect("take_tree from an empty bucket");
        let tree = bucket.remove(pos.index);
        if bucket.is_empty() {
            self.buckets.remove(&pos.height);
        }
        self.size -= tree.size();
        tree
    }

    /// Position of the tree rooted at `root`, whose height is `height`.
    pub fn locate(&self, root: crate::tree::NodeId, height: u32) -> Option<TreePos> {
        let index = self
            .buckets
            .get(&height)?
            .iter()
            .position(|t| t.root() == root)?;
        Some(TreePos { height, index })
    }

    /// Appends every tree of `other` after this forest's trees, height by height.
    pub fn append(&mut self, other: Forest) {
        self.size += other.size;
        for (h, trees) in other.buckets {
            self.buckets.entry(h).or_default().extend(trees);
        }
    }

    /// Remaps node ids after the forest's arena was absorbed into another.
    pub(crate) fn shift_roots(&mut self, offset: u32) {
        for trees in self.buckets.values_mut() {
            for t in trees.iter_mut() {
                *t = t.shifted(offset);
            }
        }
    }

    /// Tree whose root key is minimal; ties go to the lower height, then the
    /// earlier position. Uses `tree_count - 1` comparisons.
    pub fn scan_min<K, V, C: KeyOrder<K>>(
        &self,
        arena: &NodeArena<K, V>,
        cmp: &CountingComparator<C>,
    ) -> Option<(TreePos, PerfectTree)> {
        let mut best: Option<(TreePos, PerfectTree)> = None;
        for (pos, tree) in self.trees() {
            match best {
                Some((_, b)) if !cmp.less(arena.key(tree.root()), arena.key(b.root())) => {}
                _ => best = Some((pos, tree)),
            }
        }
        best
    }

    fn lowest_with_at_least(&self, count: usize) -> Option<u32> {
        self.buckets
            .iter()
            .find(|(_, trees)| trees.len() >= count)
            .map(|(&h, _)| h)
    }

    /// One rearrangement of the first three trees at height `h`.
    fn step<K, V, C: KeyOrder<K>>(
        &mut self,
        h: u32,
        arena: &mut NodeArena<K, V>,
        cmp: &CountingComparator<C>,
        ledger: &mut PotentialLedger,
    ) {
        let bucket = self.buckets.get_mut(&h).expect("step on empty bucket");
        let trio = [bucket[0], bucket[1], bucket[2]];
        // Heights are measured by walking the trees, not read from the
        // bucket keys, so the ledger sees the step's true effect.
        let before: u32 = trio.iter().map(|t| arena.spine_height(t.root())).sum();
        bucket.drain(..3);
        if bucket.is_empty() {
            self.buckets.remove(&h);
        }
        let out = arena
            .rearrange(cmp, trio)
            .expect("trees in one bucket share a height");
        let mut after = arena.spine_height(out.big.root());
        self.buckets.entry(h + 1).or_default().push(out.big);
        if let Some(leftovers) = out.leftovers {
            after += leftovers
                .iter()
                .map(|t| arena.spine_height(t.root()))
                .sum::<u32>();
            self.buckets.entry(h - 1).or_default().extend(leftovers);
        }
        ledger
            .record_rearrangement(h, after as i64 - before as i64)
            .expect("potential accounting out of sync with the forest");
    }

    /// Restores the policy's digit bound. Always picks the lowest overflowing
    /// height and the first three trees there. Returns the number of
    /// rearrangements performed.
    pub fn fix<K, V, C: KeyOrder<K>>(
        &mut self,
        arena: &mut NodeArena<K, V>,
        cmp: &CountingComparator<C>,
        ledger: &mut PotentialLedger,
    ) -> u64 {
        let mut steps = 0;
        match self.policy.mode {
            FixMode::Eager => {
                while let Some(h) = self.lowest_with_at_least(3) {
                    self.step(h, arena, cmp, ledger);
                    steps += 1;
                }
            }
            FixMode::Relaxed => {
                for _ in 0..self.policy.relaxed_budget() {
                    let Some(h) = self.lowest_with_at_least(3) else {
                        break;
                    };
                    self.step(h, arena, cmp, ledger);
                    steps += 1;
                }
                while let Some(h) = self.lowest_with_at_least(5) {
                    self.step(h, arena, cmp, ledger);
                    steps += 1;
                }
            }
        }
        steps
    }

    /// Height sum measured from the trees themselves (left-spine walks),
    /// independent of bucket bookkeeping.
    pub fn recompute_phi<K, V>(&self, arena: &NodeArena<K, V>) -> u64 {
        self.trees()
            .map(|(_, t)| u64::from(arena.spine_height(t.root())))
            .sum()
    }

    /// Σ digit(h) · (2^(h+1) − 1).
    pub fn digit_value(&self) -> usize {
        self.buckets
            .iter()
            .map(|(&h, trees)| trees.len() * perfect_size(h))
            .sum()
    }
}
