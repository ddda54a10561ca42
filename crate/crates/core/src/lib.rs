//! A link-based priority queue built from perfect heap-ordered binary trees.
//!
//! Trees are kept in buckets by height. Whenever a bucket holds three trees,
//! a rearrangement step turns them into one tree of height `h + 1` (rooted at
//! the smallest of the three roots) plus that root's two former subtrees of
//! height `h - 1`. Under the eager policy no height ever holds more than two
//! trees, so the forest has `O(log n)` trees; the relaxed policy allows four.
//!
//! Each queue carries a [`PotentialLedger`](ledger::PotentialLedger) that
//! tracks the sum of tree heights and checks the amortized accounting of the
//! rearrangement steps.
//!
//! ```
//! use perfect_heap::{FixPolicy, Queue};
//!
//! let mut q = Queue::new(FixPolicy::eager());
//! let h = q.insert(5, "five");
//! q.insert(3, "three");
//! q.insert(9, "nine");
//! q.decrease_key(h, 1).unwrap();
//! assert_eq!(q.delete_min().unwrap(), (1, "five"));
//! assert_eq!(q.delete_min().unwrap(), (3, "three"));
//! assert!(q.audit().is_clean());
//! ```

pub mod bench;
pub mod compare;
pub mod counter;
pub mod dot;
pub mod forest;
pub mod heap;
pub mod ledger;
pub mod oracle;
pub mod replay;
pub mod sort;
pub mod stats;
pub mod tree;
pub mod workload;

pub use compare::{CountingComparator, KeyOrder, Natural, Reversed};
pub use forest::{FixMode, FixPolicy, Forest};
pub use heap::{Handle, Queue, QueueError};
pub use ledger::{AuditReport, OpKind, PotentialLedger};
pub use oracle::{run_differential, AuditMode, OracleQueue, Verdict};
pub use stats::StatsRecord;
pub use tree::{NodeArena, NodeId, PerfectTree, Violation};
pub use workload::{WorkloadOp, WorkloadScript};
