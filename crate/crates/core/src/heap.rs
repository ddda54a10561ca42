//! The priority queue.
//!
//! A [`Queue`] is a [`Forest`] of perfect trees over a [`NodeArena`], a
//! counting comparator, and a [`PotentialLedger`]. Every mutating operation
//! makes its structural change, records the resulting potential change,
//! runs the policy's fix, and closes the ledger record.
//!
//! | Operation      | Comparisons                                 |
//! |----------------|---------------------------------------------|
//! | `insert`       | 2 per rearrangement                         |
//! | `find_min`     | `tree_count - 1`                            |
//! | `delete_min`   | `tree_count - 1` + 2 per rearrangement      |
//! | `decrease_key` | 1 + at most the tree height                 |
//! | `delete`       | 2 per rearrangement                         |
//! | `meld`         | 2 per rearrangement                         |
//!
//! `delete_min` never sifts down: the subtrees of a removed root are already
//! perfect heap-ordered trees and go straight back into the forest.

use thiserror::Error;

use crate::compare::{CountingComparator, KeyOrder, Natural};
use crate::forest::{FixMode, FixPolicy, Forest};
use crate::ledger::{AuditReport, OpKind, PotentialLedger};
use crate::tree::{NodeArena, PerfectTree, SplitRoot, Violation};

pub use crate::tree::Handle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum QueueError {
    #[error("queue is empty")]
    Empty,
    #[error("handle is dead or belongs to another queue")]
    InvalidHandle,
    #[error("decrease_key called with a larger key")]
    KeyIncrease,
    #[error("cannot meld queues with different policies or key orders")]
    MeldMismatch,
}

pub struct Queue<K, V, C = Natural> {
    arena: NodeArena<K, V>,
    forest: Forest,
    ledger: PotentialLedger,
    cmp: CountingComparator<C>,
}

impl<K: Ord, V> Queue<K, V, Natural> {
    /// Empty min-queue ordered by `K: Ord`.
    pub fn new(policy: FixPolicy) -> Self {
        Self::with_order(policy, Natural)
    }
}

impl<K: Ord, V> Default for Queue<K, V, Natural> {
    fn default() -> Self {
        Self::new(FixPolicy::eager())
    }
}

impl<K, V, C: KeyOrder<K>> Queue<K, V, C> {
    pub fn with_order(policy: FixPolicy, order: C) -> Self {
        Self {
            arena: NodeArena::new(),
            forest: Forest::new(policy),
            ledger: PotentialLedger::new(),
            cmp: CountingComparator::new(order),
        }
    }

    pub fn len(&self) -> usize {
        self.forest.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn policy(&self) -> FixPolicy {
        self.forest.policy()
    }

    pub fn order(&self) -> &C {
        self.cmp.inner()
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn arena(&self) -> &NodeArena<K, V> {
        &self.arena
    }

    pub fn ledger(&self) -> &PotentialLedger {
        &self.ledger
    }

    /// Current potential (sum of tree heights).
    pub fn phi(&self) -> u64 {
        self.ledger.phi()
    }

    /// Total comparisons made, including `find_min`.
    pub fn comparisons(&self) -> u64 {
        self.cmp.count()
    }

    pub fn digit(&self, height: u32) -> usize {
        self.forest.digit(height)
    }

    pub fn digits(&self) -> Vec<usize> {
        self.forest.digits()
    }

    pub fn tree_count(&self) -> usize {
        self.forest.tree_count()
    }

    /// Key of a live element.
    pub fn get(&self, handle: Handle) -> Option<(&K, &V)> {
        let node = self.arena.resolve(handle)?;
        Some((self.arena.key(node), self.arena.payload(node)))
    }

    pub fn contains(&self, handle: Handle) -> bool {
        self.arena.resolve(handle).is_some()
    }

    fn finish(&mut self, start: u64) {
        self.forest
            .fix(&mut self.arena, &self.cmp, &mut self.ledger);
        self.ledger
            .close_op(self.cmp.count() - start)
            .expect("operation record was opened");
        debug_assert!(self.forest.max_digit() <= self.policy().digit_bound());
        debug_assert_eq!(self.forest.height_sum(), self.ledger.phi());
    }

    fn record(&mut self, op: OpKind, delta: i64) {
        self.ledger
            .record_structural(op, delta)
            .expect("structural potential change underflowed");
    }

    pub fn insert(&mut self, key: K, payload: V) -> Handle {
        let start = self.cmp.count();
        let (tree, handle) = self.arena.make_singleton(key, payload);
        self.forest.add_tree(tree);
        self.record(OpKind::Insert, i64::from(tree.height()));
        self.finish(start);
        handle
    }

    pub fn find_min(&self) -> Result<(&K, &V), QueueError> {
        let (_, tree) = self
            .forest
            .scan_min(&self.arena, &self.cmp)
            .ok_or(QueueError::Empty)?;
        Ok((self.arena.key(tree.root()), self.arena.payload(tree.root())))
    }

    /// Detaches a root, files its subtrees, and returns the structural Δφ.
    fn remove_root(&mut self, tree: PerfectTree) -> (SplitRoot<K, V>, i64) {
        let split = self.arena.split_root(tree);
        let mut delta = -i64::from(tree.height());
        if let Some(leftovers) = split.leftovers {
            for t in leftovers {
                delta += i64::from(t.height());
                self.forest.add_tree(t);
            }
        }
        (split, delta)
    }

    pub fn delete_min(&mut self) -> Result<(K, V), QueueError> {
        let start = self.cmp.count();
        let (pos, _) = self
            .forest
            .scan_min(&self.arena, &self.cmp)
            .ok_or(QueueError::Empty)?;
        let tree = self.forest.take_tree(pos);
        let (split, delta) = self.remove_root(tree);
        self.record(OpKind::DeleteMin, delta);
        self.finish(start);
        Ok((split.key, split.payload))
    }

    /// Lowers the key of a live element. Equal keys are accepted.
    pub fn decrease_key(&mut self, handle: Handle, key: K) -> Result<(), QueueError> {
        let node = self
            .arena
            .resolve(handle)
            .ok_or(QueueError::InvalidHandle)?;
        let start = self.cmp.count();
        if self.cmp.less(self.arena.key(node), &key) {
            return Err(QueueError::KeyIncrease);
        }
        self.arena.replace_key(node, key);
        self.arena.sift_up(&self.cmp, node);
        self.record(OpKind::DecreaseKey, 0);
        self.finish(start);
        Ok(())
    }

    /// Removes a live element: it is moved to its tree's root without
    /// comparisons, then split off like a minimum.
    pub fn delete(&mut self, handle: Handle) -> Result<(K, V), QueueError> {
        let node = self
            .arena
            .resolve(handle)
            .ok_or(QueueError::InvalidHandle)?;
        let start = self.cmp.count();
        let root = self.arena.sift_to_root(node);
        let height = self.arena.spine_height(root);
        let pos = self
            .forest
            .locate(root, height)
            .expect("every root belongs to the forest");
        let tree = self.forest.take_tree(pos);
        let (split, delta) = self.remove_root(tree);
        self.record(OpKind::Delete, delta);
        self.finish(start);
        Ok((split.key, split.payload))
    }

    /// Consumes both queues. `self`'s trees come first in every bucket;
    /// handles from either queue stay valid in the result.
    ///
    /// The arena with less storage is moved into the other, so the memory
    /// work is linear in the smaller one while the comparison work is only
    /// that of the fix.
    pub fn meld(self, other: Self) -> Result<Self, QueueError> {
        if self.policy() != other.policy() || self.order() != other.order() {
            return Err(QueueError::MeldMismatch);
        }
        let Queue {
            arena: mut a_arena,
            forest: mut a_forest,
            ledger: mut a_ledger,
            cmp,
        } = self;
        let Queue {
            arena: mut b_arena,
            forest: mut b_forest,
            ledger: b_ledger,
            cmp: b_cmp,
        } = other;

        let arena = if b_arena.storage() > a_arena.storage() {
            let offset = b_arena.absorb(a_arena);
            a_forest.shift_roots(offset);
            b_arena
        } else {
            let offset = a_arena.absorb(b_arena);
            b_forest.shift_roots(offset);
            a_arena
        };
        a_forest.append(b_forest);
        a_ledger.absorb(b_ledger);
        cmp.absorb_count(&b_cmp);

        let mut q = Queue {
            arena,
            forest: a_forest,
            ledger: a_ledger,
            cmp,
        };
        let start = q.cmp.count();
        q.record(OpKind::Meld, 0);
        q.finish(start);
        Ok(q)
    }

    /// Removes every element in ascending key order.
    pub fn drain_sorted(&mut self) -> impl Iterator<Item = (K, V)> + '_ {
        std::iter::from_fn(move || self.delete_min().ok())
    }

    /// Full structural validation: every tree, bucket heights, element
    /// counts, handle table, and the policy's digit bound. Linear time.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut total = 0;
        for (pos, tree) in self.forest.trees() {
            if pos.height != tree.height() {
                out.push(Violation::BucketHeight {
                    root: tree.root(),
                    bucket: pos.height,
                    height: tree.height(),
                });
            }
            total += tree.size();
            out.extend(self.arena.validate(self.cmp.inner(), tree));
        }
        let n = self.forest.size();
        for (what, actual) in [
            ("trees", total),
            ("digits", self.forest.digit_value()),
            ("arena", self.arena.len()),
            ("handles", self.arena.live_handles()),
        ] {
            if actual != n {
                out.push(Violation::Count {
                    what,
                    expected: n,
                    actual,
                });
            }
        }
        let bound = self.policy().digit_bound();
        for h in 0..self.forest.digits().len() as u32 {
            let count = self.forest.digit(h);
            if count > bound {
                out.push(Violation::DigitBound {
                    height: h,
                    count,
                    bound,
                });
            }
        }
        out
    }

    /// Ledger audit against the height sum measured from the trees.
    pub fn audit(&self) -> AuditReport {
        self.ledger.audit(self.forest.recompute_phi(&self.arena))
    }

    /// `2·⌊log₂(n+1)⌋`, the tree-count ceiling that digits ≤ 2 imply.
    pub fn eager_tree_bound(n: usize) -> usize {
        2 * (usize::BITS - 1 - (n + 1).leading_zeros()) as usize
    }

    pub fn is_eager(&self) -> bool {
        self.policy().mode() == FixMode::Eager
    }
}

impl<K, V, C: KeyOrder<K>> Extend<(K, V)> for Queue<K, V, C> {
    fn extend<I: IntoIterator<Item = (K, V)>>(&mut self, iter: I) {
        for (k, v) in iter {
            self.insert(k, v);
        }
    }
}
