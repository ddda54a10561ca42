//! Reference priority queue and the differential runner.
//!
//! [`OracleQueue`] is a sorted set of `(key, id)` pairs: obviously correct,
//! and fast enough for scripts of a few thousand operations. Element ids
//! are insertion numbers, matching the handle numbering of workload scripts.
//! Among equal minimal keys the oracle removes the smallest id.
//!
//! [`run_differential`] replays a script against both queues and compares
//! results by key only. When the real queue removes a different element of
//! the same minimal key, the runner swaps the two script handles so later
//! operations keep addressing equivalent elements.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use crate::compare::{KeyOrder, Natural};
use crate::forest::FixPolicy;
use crate::heap::{Queue, QueueError};
use crate::replay::{Outcome, Replay};
use crate::stats::StatsRecord;
use crate::workload::{WorkloadOp, WorkloadScript};

#[derive(Debug, Clone, Default)]
pub struct OracleQueue {
    entries: BTreeSet<(i64, usize)>,
    keys: HashMap<usize, i64>,
    /// Live ids, for uniform sampling; `slots` maps id -> index here.
    live: Vec<usize>,
    slots: HashMap<usize, usize>,
    live_odd: usize,
    next_id: usize,
}

impl OracleQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of live elements with an odd id.
    pub fn live_odd(&self) -> usize {
        self.live_odd
    }

    pub fn key_of(&self, id: usize) -> Option<i64> {
        self.keys.get(&id).copied()
    }

    /// Uniformly random live id.
    pub fn random_live<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.live.is_empty() {
            None
        } else {
            Some(self.live[rng.gen_range(0..self.live.len())])
        }
    }

    fn forget(&mut self, id: usize) -> Option<i64> {
        let key = self.keys.remove(&id)?;
        self.live_odd -= id % 2;
        self.entries.remove(&(key, id));
        let slot = self.slots.remove(&id).expect("live id has a slot");
        self.live.swap_remove(slot);
        if let Some(&moved) = self.live.get(slot) {
            self.slots.insert(moved, slot);
        }
        Some(key)
    }

    /// Inserts and returns the new element's id.
    pub fn insert(&mut self, key: i64) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        self.live_odd += id % 2;
        self.entries.insert((key, id));
        self.keys.insert(id, key);
        self.slots.insert(id, self.live.len());
        self.live.push(id);
        id
    }

    pub fn find_min(&self) -> Result<(i64, usize), QueueError> {
        self.entries.first().copied().ok_or(QueueError::Empty)
    }

    pub fn delete_min(&mut self) -> Result<(i64, usize), QueueError> {
        let (key, id) = self.find_min()?;
        self.forget(id);
        Ok((key, id))
    }

    pub fn decrease_key(&mut self, id: usize, key: i64) -> Result<(), QueueError> {
        let current = self.key_of(id).ok_or(QueueError::InvalidHandle)?;
        if key > current {
            return Err(QueueError::KeyIncrease);
        }
        self.entries.remove(&(current, id));
        self.entries.insert((key, id));
        self.keys.insert(id, key);
        Ok(())
    }

    pub fn delete(&mut self, id: usize) -> Result<i64, QueueError> {
        self.forget(id).ok_or(QueueError::InvalidHandle)
    }

    /// Applies one script operation. `meld-split` leaves the multiset as is.
    pub fn apply(&mut self, op: &WorkloadOp) -> Outcome {
        let keyed = |r: Result<i64, QueueError>| match r {
            Ok(k) => Outcome::Key(k),
            Err(e) => Outcome::Failed(e),
        };
        match *op {
            WorkloadOp::Insert(k) => {
                self.insert(k);
                Outcome::Done
            }
            WorkloadOp::FindMin => keyed(self.find_min().map(|(k, _)| k)),
            WorkloadOp::DeleteMin => keyed(self.delete_min().map(|(k, _)| k)),
            WorkloadOp::DecreaseKey { handle, key } => match self.decrease_key(handle, key) {
                Ok(()) => Outcome::Done,
                Err(e) => Outcome::Failed(e),
            },
            WorkloadOp::Delete(h) => keyed(self.delete(h)),
            WorkloadOp::MeldSplit(_) => Outcome::Done,
        }
    }
}

/// When to run the full (linear-time) validation and ledger audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AuditMode {
    /// After every operation.
    Always,
    /// Once, after the last operation.
    #[default]
    Final,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Divergence {
    /// The queue and the oracle disagree on an operation's result.
    Result {
        op_index: usize,
        op: WorkloadOp,
        expected: Outcome,
        got: Outcome,
    },
    /// A structural or accounting invariant failed after an operation.
    Invariant { op_index: usize, detail: String },
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Divergence::Result {
                op_index,
                op,
                expected,
                got,
            } => write!(f, "op {op_index} (`{op}`): expected {expected}, got {got}"),
            Divergence::Invariant { op_index, detail } => {
                write!(f, "op {op_index}: invariant failure: {detail}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub ops_run: usize,
    pub divergence: Option<Divergence>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Cheap per-operation checks: digit bound, eager tree-count bound, ledger
/// potential against bucket bookkeeping, and element count.
fn cheap_checks<C: KeyOrder<i64>>(q: &Queue<i64, usize, C>, oracle_len: usize) -> Option<String> {
    let bound = q.policy().digit_bound();
    if q.forest().max_digit() > bound {
        return Some(format!("digit above {bound}: {:?}", q.digits()));
    }
    let n = q.len();
    if q.is_eager() && n > 0 && q.tree_count() > Queue::<i64, usize, C>::eager_tree_bound(n) {
        return Some(format!("{} trees for n = {n}", q.tree_count()));
    }
    if q.forest().height_sum() != q.phi() {
        return Some(format!(
            "ledger phi {} != bucket height sum {}",
            q.phi(),
            q.forest().height_sum()
        ));
    }
    if n != oracle_len {
        return Some(format!("size {n}, oracle has {oracle_len}"));
    }
    None
}

fn full_checks<C: KeyOrder<i64>>(q: &Queue<i64, usize, C>) -> Option<String> {
    let violations = q.validate();
    if !violations.is_empty() {
        return Some(format!("structure: {violations:?}"));
    }
    let report = q.audit();
    if !report.is_clean() {
        return Some(format!("ledger: {:?}", report.failures));
    }
    None
}

/// Replays `script` against a natural-order queue and the oracle.
pub fn run_differential(script: &WorkloadScript, policy: FixPolicy, audit: AuditMode) -> Verdict {
    run_differential_with(script, policy, Natural, audit, |_| {})
}

/// Replays `script` against a queue using `order` and against the oracle
/// (which always uses natural `i64` order), calling `on_step` with the
/// queue's stats after every operation. Stops at the first divergence.
pub fn run_differential_with<C: KeyOrder<i64>>(
    script: &WorkloadScript,
    policy: FixPolicy,
    order: C,
    audit: AuditMode,
    mut on_step: impl FnMut(&StatsRecord),
) -> Verdict {
    let mut replay = Replay::new(policy, order);
    let mut oracle = OracleQueue::new();
    let fail = |op_index, divergence| Verdict {
        ops_run: op_index + 1,
        divergence: Some(divergence),
    };

    for (op_index, op) in script.ops.iter().enumerate() {
        let got = replay.apply(op);
        let expected = match op {
            WorkloadOp::DeleteMin => match oracle.delete_min() {
                Ok((key, oracle_id)) => {
                    if let (Outcome::Key(k), Some(removed)) = (got.outcome, got.removed) {
                        if k == key && removed != oracle_id {
                            // Same key, different element: keep script handles aligned.
                            if oracle.key_of(removed) != Some(key) {
                                return fail(
                                    op_index,
                                    Divergence::Invariant {
                                        op_index,
                                        detail: format!(
                                            "removed handle {removed}, which the oracle does not hold at key {key}"
                                        ),
                                    },
                                );
                            }
                            replay.swap_handles(removed, oracle_id);
                        }
                    }
                    Outcome::Key(key)
                }
                Err(e) => Outcome::Failed(e),
            },
            other => oracle.apply(other),
        };
        if expected != got.outcome {
            return fail(
                op_index,
                Divergence::Result {
                    op_index,
                    op: *op,
                    expected,
                    got: got.outcome,
                },
            );
        }
        let detail = cheap_checks(replay.queue(), oracle.len()).or_else(|| match audit {
            AuditMode::Always => full_checks(replay.queue()),
            AuditMode::Final => None,
        });
        if let Some(detail) = detail {
            return fail(op_index, Divergence::Invariant { op_index, detail });
        }
        on_step(&replay.stats(op_index, op.name()));
    }

    if audit == AuditMode::Final && !script.is_empty() {
        if let Some(detail) = full_checks(replay.queue()) {
            let op_index = script.len() - 1;
            return fail(op_index, Divergence::Invariant { op_index, detail });
        }
    }
    Verdict {
        ops_run: script.len(),
        divergence: None,
    }
}
