//! Line-oriented workload scripts.
//!
//! ```text
//! # seed: 7
//! i 42          insert key 42 (handles are numbered from 0 in insert order)
//! dm            delete-min
//! fm            find-min
//! dk 0 17       decrease-key on handle 0 to 17
//! del 3         delete handle 3
//! meld-split 0.5
//! ```
//!
//! `meld-split f` moves the first `round(f · m)` live odd-numbered handles
//! (of `m` such) into a fresh queue and melds it back. Moving is done by
//! delete and re-insert, so it costs time linear in the number moved. Text after `#` is a
//! comment; a `# seed: N` comment records the generator seed.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::oracle::OracleQueue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WorkloadOp {
    Insert(i64),
    DeleteMin,
    FindMin,
    DecreaseKey { handle: usize, key: i64 },
    Delete(usize),
    MeldSplit(f64),
}

impl WorkloadOp {
    pub fn name(&self) -> &'static str {
        match self {
            WorkloadOp::Insert(_) => "insert",
            WorkloadOp::DeleteMin => "delete-min",
            WorkloadOp::FindMin => "find-min",
            WorkloadOp::DecreaseKey { .. } => "decrease-key",
            WorkloadOp::Delete(_) => "delete",
            WorkloadOp::MeldSplit(_) => "meld-split",
        }
    }
}

impl fmt::Display for WorkloadOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadOp::Insert(k) => write!(f, "i {k}"),
            WorkloadOp::DeleteMin => f.write_str("dm"),
            WorkloadOp::FindMin => f.write_str("fm"),
            WorkloadOp::DecreaseKey { handle, key } => write!(f, "dk {handle} {key}"),
            WorkloadOp::Delete(h) => write!(f, "del {h}"),
            WorkloadOp::MeldSplit(x) => write!(f, "meld-split {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkloadScript {
    pub seed: Option<u64>,
    pub ops: Vec<WorkloadOp>,
}

impl WorkloadScript {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn inserts(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, WorkloadOp::Insert(_)))
            .count()
    }

    pub fn from_keys(keys: impl IntoIterator<Item = i64>) -> Self {
        Self {
            seed: None,
            ops: keys.into_iter().map(WorkloadOp::Insert).collect(),
        }
    }
}

impl fmt::Display for WorkloadScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(seed) = self.seed {
            writeln!(f, "# seed: {seed}")?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

fn parse_field<T: FromStr>(field: Option<&str>, what: &str, line: usize) -> Result<T, ParseError> {
    let raw = field.ok_or_else(|| ParseError {
        line,
        message: format!("missing {what}"),
    })?;
    raw.parse().map_err(|_| ParseError {
        line,
        message: format!("invalid {what} `{raw}`"),
    })
}

impl FromStr for WorkloadScript {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut script = WorkloadScript::default();
        let mut inserts = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let (body, comment) = match raw.split_once('#') {
                Some((b, c)) => (b, Some(c)),
                None => (raw, None),
            };
            if let Some(seed) = comment.and_then(|c| c.trim().strip_prefix("seed:")) {
                script.seed = Some(parse_field(Some(seed.trim()), "seed", line)?);
            }
            let mut fields = body.split_whitespace();
            let Some(tag) = fields.next() else {
                continue;
            };
            let handle = |h: usize| {
                if h < inserts {
                    Ok(h)
                } else {
                    Err(ParseError {
                        line,
                        message: format!("handle {h} refers to an insert that has not happened"),
                    })
                }
            };
            let op = match tag {
                "i" => {
                    inserts += 1;
                    WorkloadOp::Insert(parse_field(fields.next(), "key", line)?)
                }
                "dm" => WorkloadOp::DeleteMin,
                "fm" => WorkloadOp::FindMin,
                "dk" => WorkloadOp::DecreaseKey {
                    handle: handle(parse_field(fields.next(), "handle", line)?)?,
                    key: parse_field(fields.next(), "key", line)?,
                },
                "del" => WorkloadOp::Delete(handle(parse_field(fields.next(), "handle", line)?)?),
                "meld-split" => {
                    let x: f64 = parse_field(fields.next(), "fraction", line)?;
                    if !(0.0..=1.0).contains(&x) {
                        return Err(ParseError {
                            line,
                            message: format!("fraction {x} outside [0, 1]"),
                        });
                    }
                    WorkloadOp::MeldSplit(x)
                }
                other => {
                    return Err(ParseError {
                        line,
                        message: format!("unknown operation `{other}`"),
                    })
                }
            };
            if let Some(extra) = fields.next() {
                return Err(ParseError {
                    line,
                    message: format!("unexpected trailing field `{extra}`"),
                });
            }
            script.ops.push(op);
        }
        Ok(script)
    }
}

/// Operation mix for generated workloads, in percent:
/// insert, delete-min, find-min, decrease-key, delete, meld-split.
pub const OP_WEIGHTS: [u32; 6] = [40, 25, 15, 10, 5, 5];

/// Chance that an insert reuses a key already seen, to exercise ties.
pub const KEY_REUSE: f64 = 0.10;

/// Most elements a generated `meld-split` moves. Without a cap the split
/// is linear in the queue size and long workloads become quadratic.
pub const MELD_SPLIT_MAX: usize = 64;

/// Random mixed workload of `ops` operations. Keys are 32-bit values; every
/// handle-taking op names a live handle under the oracle's semantics, and
/// operations that need elements are replaced by inserts while the queue is
/// empty.
pub fn generate(ops: usize, seed: u64) -> WorkloadScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = WeightedIndex::new(OP_WEIGHTS).expect("weights are positive");
    let mut model = OracleQueue::new();
    let mut seen: Vec<i64> = Vec::new();
    let mut script = WorkloadScript {
        seed: Some(seed),
        ops: Vec::with_capacity(ops),
    };

    for _ in 0..ops {
        let choice = if model.is_empty() {
            0
        } else {
            mix.sample(&mut rng)
        };
        let op = match choice {
            1 => WorkloadOp::DeleteMin,
            2 => WorkloadOp::FindMin,
            3 => {
                let handle = model.random_live(&mut rng).expect("nonempty");
                let current = model.key_of(handle).expect("live");
                WorkloadOp::DecreaseKey {
                    handle,
                    key: rng.gen_range(0..=current),
                }
            }
            4 => WorkloadOp::Delete(model.random_live(&mut rng).expect("nonempty")),
            5 => {
                // Pick how many to move, then express it as a fraction of
                // the live odd handles, rounded to four places.
                let m = model.live_odd();
                let k = rng.gen_range(0..=m.min(MELD_SPLIT_MAX));
                let f = if m == 0 {
                    0.0
                } else {
                    (k as f64 / m as f64 * 1e4).round() / 1e4
                };
                WorkloadOp::MeldSplit(f)
            }
            _ => {
                let key = if !seen.is_empty() && rng.gen_bool(KEY_REUSE) {
                    seen[rng.gen_range(0..seen.len())]
                } else {
                    i64::from(rng.gen::<u32>())
                };
                seen.push(key);
                WorkloadOp::Insert(key)
            }
        };
        model.apply(&op);
        script.ops.push(op);
    }
    script
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_op() {
        let text =
            "# seed: 9\ni 5\ni -3 # trailing comment\ndm\nfm\ndk 1 -4\ndel 0\nmeld-split 0.25\n\n";
        let s: WorkloadScript = text.parse().unwrap();
        assert_eq!(s.seed, Some(9));
        assert_eq!(
            s.ops,
            vec![
                WorkloadOp::Insert(5),
                WorkloadOp::Insert(-3),
                WorkloadOp::DeleteMin,
                WorkloadOp::FindMin,
                WorkloadOp::DecreaseKey { handle: 1, key: -4 },
                WorkloadOp::Delete(0),
                WorkloadOp::MeldSplit(0.25),
            ]
        );
    }

    #[test]
    fn rejects_bad_lines() {
        for (text, line) in [
            ("i\n", 1),
            ("i x\n", 1),
            ("i 1\ndk 1 0\n", 2),
            ("del 0\n", 1),
            ("meld-split 1.5\n", 1),
            ("push 3\n", 1),
            ("dm 3\n", 1),
        ] {
            let err = text.parse::<WorkloadScript>().unwrap_err();
            assert_eq!(err.line, line, "{text:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        let s = generate(500, 3);
        let back: WorkloadScript = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn generator_is_deterministic_and_mixed() {
        let a = generate(2_000, 11);
        assert_eq!(a, generate(2_000, 11));
        assert_ne!(a, generate(2_000, 12));
        for name in [
            "insert",
            "delete-min",
            "find-min",
            "decrease-key",
            "delete",
            "meld-split",
        ] {
            assert!(a.ops.iter().any(|op| op.name() == name), "{name} missing");
        }
        let mut keys: Vec<i64> = a
            .ops
            .iter()
            .filter_map(|op| match op {
                WorkloadOp::Insert(k) => Some(*k),
                _ => None,
            })
            .collect();
        let total = keys.len();
        keys.sort();
        keys.dedup();
        assert!(keys.len() < total, "no duplicate keys generated");
    }
}
