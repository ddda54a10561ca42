//! Applies workload scripts to a real queue.
//!
//! Script handles are insert numbers. The replay keeps its own mapping from
//! script handle to queue [`Handle`], because `meld-split` re-inserts
//! elements (new queue handles, same script handle) and the differential
//! runner may swap two script handles after a tie.

use std::collections::BTreeSet;
use std::fmt;
use std::mem;

use crate::compare::KeyOrder;
use crate::forest::FixPolicy;
use crate::heap::{Handle, Queue, QueueError};
use crate::stats::StatsRecord;
use crate::workload::WorkloadOp;

/// Result of one operation, compared by key only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Key(i64),
    Failed(QueueError),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Done => f.write_str("ok"),
            Outcome::Key(k) => write!(f, "key {k}"),
            Outcome::Failed(e) => write!(f, "error `{e}`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Applied {
    pub outcome: Outcome,
    /// Script handle of the element a delete-min removed.
    pub removed: Option<usize>,
}

impl From<Outcome> for Applied {
    fn from(outcome: Outcome) -> Self {
        Applied {
            outcome,
            removed: None,
        }
    }
}

/// A queue being driven by a script. Payloads are element tokens.
pub struct Replay<C: KeyOrder<i64>> {
    queue: Queue<i64, usize, C>,
    /// token -> (queue handle, script handle)
    elements: Vec<(Handle, usize)>,
    /// script handle -> token of its live element
    script: Vec<Option<usize>>,
    /// Live odd script handles, in order, for `meld-split`.
    live_odd: BTreeSet<usize>,
}

impl<C: KeyOrder<i64>> Replay<C> {
    pub fn new(policy: FixPolicy, order: C) -> Self {
        Self {
            queue: Queue::with_order(policy, order),
            elements: Vec::new(),
            script: Vec::new(),
            live_odd: BTreeSet::new(),
        }
    }

    pub fn queue(&self) -> &Queue<i64, usize, C> {
        &self.queue
    }

    pub fn stats(&self, op_index: usize, op: &'static str) -> StatsRecord {
        StatsRecord::capture(op_index, op, &self.queue)
    }

    fn handle(&self, script_handle: usize) -> Option<Handle> {
        let token = (*self.script.get(script_handle)?)?;
        Some(self.elements[token].0)
    }

    fn set_live(&mut self, script_handle: usize, token: Option<usize>) {
        self.script[script_handle] = token;
        if script_handle % 2 == 1 {
            if token.is_some() {
                self.live_odd.insert(script_handle);
            } else {
                self.live_odd.remove(&script_handle);
            }
        }
    }

    fn insert_into(
        queue: &mut Queue<i64, usize, C>,
        elements: &mut Vec<(Handle, usize)>,
        key: i64,
        script_handle: usize,
    ) -> usize {
        let token = elements.len();
        let handle = queue.insert(key, token);
        elements.push((handle, script_handle));
        token
    }

    /// Exchanges which queue elements two script handles refer to.
    pub fn swap_handles(&mut self, a: usize, b: usize) {
        let (ta, tb) = (self.script[a], self.script[b]);
        self.set_live(a, tb);
        self.set_live(b, ta);
        for s in [a, b] {
            if let Some(token) = self.script[s] {
                self.elements[token].1 = s;
            }
        }
    }

    pub fn apply(&mut self, op: &WorkloadOp) -> Applied {
        let keyed = |r: Result<i64, QueueError>| match r {
            Ok(k) => Outcome::Key(k),
            Err(e) => Outcome::Failed(e),
        };
        match *op {
            WorkloadOp::Insert(key) => {
                let script_handle = self.script.len();
                let token =
                    Self::insert_into(&mut self.queue, &mut self.elements, key, script_handle);
                self.script.push(None);
                self.set_live(script_handle, Some(token));
                Outcome::Done.into()
            }
            WorkloadOp::FindMin => keyed(self.queue.find_min().map(|(k, _)| *k)).into(),
            WorkloadOp::DeleteMin => match self.queue.delete_min() {
                Ok((key, token)) => {
                    let script_handle = self.elements[token].1;
                    self.set_live(script_handle, None);
                    Applied {
                        outcome: Outcome::Key(key),
                        removed: Some(script_handle),
                    }
                }
                Err(e) => Outcome::Failed(e).into(),
            },
            WorkloadOp::DecreaseKey { handle, key } => {
                let result = match self.handle(handle) {
                    Some(h) => self.queue.decrease_key(h, key),
                    None => Err(QueueError::InvalidHandle),
                };
                match result {
                    Ok(()) => Outcome::Done.into(),
                    Err(e) => Outcome::Failed(e).into(),
                }
            }
            WorkloadOp::Delete(handle) => {
                let result = match self.handle(handle) {
                    Some(h) => self.queue.delete(h).map(|(k, _)| k),
                    None => Err(QueueError::InvalidHandle),
                };
                if result.is_ok() {
                    self.set_live(handle, None);
                }
                keyed(result).into()
            }
            WorkloadOp::MeldSplit(fraction) => {
                self.meld_split(fraction);
                Outcome::Done.into()
            }
        }
    }

    /// Moves the first `round(fraction · m)` of the `m` live odd script
    /// handles into a fresh queue, then melds it back.
    fn meld_split(&mut self, fraction: f64) {
        let policy = self.queue.policy();
        let order = self.queue.order().clone();
        let take = (fraction * self.live_odd.len() as f64).round() as usize;
        let moving: Vec<usize> = self.live_odd.iter().take(take).copied().collect();
        let mut side = Queue::with_order(policy, order.clone());
        for s in moving {
            let token = self.script[s].expect("filtered live");
            let (key, _) = self
                .queue
                .delete(self.elements[token].0)
                .expect("live script handle has a live element");
            let token = Self::insert_into(&mut side, &mut self.elements, key, s);
            self.script[s] = Some(token);
        }
        let main = mem::replace(&mut self.queue, Queue::with_order(policy, order));
        self.queue = main.meld(side).expect("same policy and order");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::Natural;

    #[test]
    fn meld_split_preserves_contents_and_handles() {
        let mut r = Replay::new(FixPolicy::eager(), Natural);
        for k in 0..20 {
            r.apply(&WorkloadOp::Insert(100 + k));
        }
        r.apply(&WorkloadOp::MeldSplit(0.5));
        assert_eq!(r.queue().len(), 20);
        assert!(r.queue().validate().is_empty());
        for s in 0..20 {
            let h = r.handle(s).unwrap();
            assert_eq!(r.queue().get(h).unwrap().0, &(100 + s as i64));
        }
        assert_eq!(
            r.apply(&WorkloadOp::DecreaseKey { handle: 7, key: 1 })
                .outcome,
            Outcome::Done
        );
        assert_eq!(r.apply(&WorkloadOp::DeleteMin).removed, Some(7));
    }

    #[test]
    fn dead_handles_fail() {
        let mut r = Replay::new(FixPolicy::eager(), Natural);
        r.apply(&WorkloadOp::Insert(1));
        assert_eq!(r.apply(&WorkloadOp::Delete(0)).outcome, Outcome::Key(1));
        assert_eq!(
            r.apply(&WorkloadOp::Delete(0)).outcome,
            Outcome::Failed(QueueError::InvalidHandle)
        );
        assert_eq!(
            r.apply(&WorkloadOp::DeleteMin).outcome,
            Outcome::Failed(QueueError::Empty)
        );
    }
}
