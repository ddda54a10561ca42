//! Comparison-counting benchmark over a list of sizes.
//!
//! Each size runs two workloads: `sort` (n random inserts, then n
//! delete-mins) and `mixed` (a generated script of 2n operations). All
//! numbers are operation counts, so results depend only on the inputs.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compare::Natural;
use crate::counter::DigitCounter;
use crate::forest::FixPolicy;
use crate::heap::Queue;
use crate::replay::Replay;
use crate::stats::{write_aligned, Format, StatsRecord};
use crate::workload::generate;

pub const COLUMNS: [&str; 14] = [
    "n",
    "workload",
    "ops",
    "comparisons",
    "max_op_comparisons",
    "max_delete_min_comparisons",
    "rearrangements",
    "insert_rearrangements",
    "counter_carries",
    "trees_after_inserts",
    "tree_bound",
    "max_tree_count",
    "max_phi",
    "final_phi",
];

/// One (size, workload) cell. Columns that only make sense for the
/// insert phase of `sort` are empty for `mixed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub workload: &'static str,
    pub ops: usize,
    pub comparisons: u64,
    pub max_op_comparisons: u64,
    pub max_delete_min_comparisons: u64,
    pub rearrangements: u64,
    pub insert_rearrangements: Option<u64>,
    pub counter_carries: Option<u64>,
    pub trees_after_inserts: Option<usize>,
    pub tree_bound: Option<usize>,
    pub max_tree_count: usize,
    pub max_phi: u64,
    pub final_phi: u64,
}

impl BenchRow {
    fn cells(&self) -> Vec<String> {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.workload.to_string(),
            self.ops.to_string(),
            self.comparisons.to_string(),
            self.max_op_comparisons.to_string(),
            self.max_delete_min_comparisons.to_string(),
            self.rearrangements.to_string(),
            opt(self.insert_rearrangements),
            opt(self.counter_carries),
            opt_usize(self.trees_after_inserts),
            opt_usize(self.tree_bound),
            self.max_tree_count.to_string(),
            self.max_phi.to_string(),
            self.final_phi.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub row: BenchRow,
    /// Per-operation stats, filled only when tracing.
    pub trace: Vec<StatsRecord>,
}

/// Accumulates the per-op maxima of a cell.
struct Tracker {
    trace: Option<Vec<StatsRecord>>,
    last_comparisons: u64,
    max_op: u64,
    max_delete_min: u64,
    max_trees: usize,
    max_phi: u64,
}

impl Tracker {
    fn new(trace: bool) -> Self {
        Self {
            trace: trace.then(Vec::new),
            last_comparisons: 0,
            max_op: 0,
            max_delete_min: 0,
            max_trees: 0,
            max_phi: 0,
        }
    }

    fn observe<V>(&mut self, op_index: usize, op: &'static str, q: &Queue<i64, V>) {
        let spent = q.comparisons() - self.last_comparisons;
        self.last_comparisons = q.comparisons();
        self.max_op = self.max_op.max(spent);
        if op == "delete-min" {
            self.max_delete_min = self.max_delete_min.max(spent);
        }
        self.max_trees = self.max_trees.max(q.tree_count());
        self.max_phi = self.max_phi.max(q.phi());
        if let Some(trace) = &mut self.trace {
            trace.push(StatsRecord::capture(op_index, op, q));
        }
    }
}

/// n random 32-bit keys inserted, then n delete-mins.
pub fn sort_cell(n: usize, policy: FixPolicy, seed: u64, trace: bool) -> BenchCell {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Queue<i64, ()> = Queue::new(policy);
    let mut t = Tracker::new(trace);
    for i in 0..n {
        q.insert(i64::from(rng.gen::<u32>()), ());
        t.observe(i, "insert", &q);
    }
    let insert_rearrangements = q.ledger().rearrangements();
    let trees_after_inserts = q.tree_count();
    let mut counter = DigitCounter::new(policy);
    for _ in 0..n {
        counter.increment();
    }
    for i in 0..n {
        q.delete_min().expect("n elements were inserted");
        t.observe(n + i, "delete-min", &q);
    }
    BenchCell {
        row: BenchRow {
            n,
            workload: "sort",
            ops: 2 * n,
            comparisons: q.comparisons(),
            max_op_comparisons: t.max_op,
            max_delete_min_comparisons: t.max_delete_min,
            rearrangements: q.ledger().rearrangements(),
            insert_rearrangements: Some(insert_rearrangements),
            counter_carries: Some(counter.carries()),
            trees_after_inserts: Some(trees_after_inserts),
            tree_bound: Some(Queue::<i64, ()>::eager_tree_bound(n)),
            max_tree_count: t.max_trees,
            max_phi: t.max_phi,
            final_phi: q.phi(),
        },
        trace: t.trace.unwrap_or_default(),
    }
}

/// A generated script of 2n operations.
pub fn mixed_cell(n: usize, policy: FixPolicy, seed: u64, trace: bool) -> BenchCell {
    let script = generate(2 * n, seed);
    let mut replay = Replay::new(policy, Natural);
    let mut t = Tracker::new(trace);
    for (i, op) in script.ops.iter().enumerate() {
        replay.apply(op);
        t.observe(i, op.name(), replay.queue());
    }
    let q = replay.queue();
    BenchCell {
        row: BenchRow {
            n,
            workload: "mixed",
            ops: script.len(),
            comparisons: q.comparisons(),
            max_op_comparisons: t.max_op,
            max_delete_min_comparisons: t.max_delete_min,
            rearrangements: q.ledger().rearrangements(),
            insert_rearrangements: None,
            counter_carries: None,
            trees_after_inserts: None,
            tree_bound: None,
            max_tree_count: t.max_trees,
            max_phi: t.max_phi,
            final_phi: q.phi(),
        },
        trace: t.trace.unwrap_or_default(),
    }
}

/// Both workloads for every size, in order.
pub fn run(sizes: &[usize], policy: FixPolicy, seed: u64, trace: bool) -> Vec<BenchCell> {
    sizes
        .iter()
        .flat_map(|&n| {
            [
                sort_cell(n, policy, seed, trace),
                mixed_cell(n, policy, seed, trace),
            ]
        })
        .collect()
}

pub fn write_rows<W: Write>(out: W, rows: &[BenchRow], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(COLUMNS)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = rows.iter().map(BenchRow::cells).collect();
            write_aligned(out, &COLUMNS, &cells, &[1])
        }
    }
}
