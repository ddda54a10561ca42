//! Graphviz rendering of a queue's forest.

use std::fmt::{Display, Write};

use thiserror::Error;

use crate::compare::KeyOrder;
use crate::forest::FixPolicy;
use crate::heap::Queue;
use crate::replay::Replay;
use crate::tree::NodeId;
use crate::workload::WorkloadScript;

/// One cluster per height, tallest first; nodes are labeled by key and
/// edges point from parent to child. An empty queue renders as an empty
/// digraph.
pub fn render<K: Display, V, C: KeyOrder<K>>(q: &Queue<K, V, C>) -> String {
    let arena = q.arena();
    let mut out = String::from("digraph forest {\n");
    let mut heights: Vec<u32> = q.forest().trees().map(|(pos, _)| pos.height).collect();
    heights.dedup();
    if !heights.is_empty() {
        out.push_str("  node [shape=circle];\n");
    }
    for &h in heights.iter().rev() {
        writeln!(out, "  subgraph cluster_h{h} {{").unwrap();
        writeln!(out, "    label=\"height {h}\";").unwrap();
        let mut edges = Vec::new();
        for (_, tree) in q.forest().trees().filter(|(pos, _)| pos.height == h) {
            let mut stack = vec![tree.root()];
            while let Some(node) = stack.pop() {
                writeln!(out, "    {} [label=\"{}\"];", name(node), arena.key(node)).unwrap();
                let (left, right) = arena.children(node);
                for child in [left, right].into_iter().flatten() {
                    edges.push((node, child));
                    stack.push(child);
                }
            }
        }
        for (from, to) in edges {
            writeln!(out, "    {} -> {};", name(from), name(to)).unwrap();
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn name(node: NodeId) -> String {
    format!("n{}", node.index())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("op index {index} out of range for a script of {len} operations")]
pub struct IndexError {
    pub index: usize,
    pub len: usize,
}

/// Replays `script` through op `at` (inclusive) and renders the result.
/// `None` renders the state after the whole script.
pub fn render_script_at(
    script: &WorkloadScript,
    policy: FixPolicy,
    at: Option<usize>,
) -> Result<String, IndexError> {
    let end = match at {
        Some(i) if i >= script.len() => {
            return Err(IndexError {
                index: i,
                len: script.len(),
            })
        }
        Some(i) => i + 1,
        None => script.len(),
    };
    let mut replay = Replay::new(policy, crate::compare::Natural);
    for op in &script.ops[..end] {
        replay.apply(op);
    }
    Ok(render(replay.queue()))
}
