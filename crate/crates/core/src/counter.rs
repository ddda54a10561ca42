//! The digit system behind the forest, simulated without keys or trees.
//!
//! Digit `h` counts trees of height `h`; place values are `2^(h+1) - 1`. An
//! increment adds one to digit 0. A carry at position `h` removes three
//! from it, adds one at `h + 1`, and adds two at `h - 1` when `h >= 1`. The
//! carry schedule mirrors the queue's fix policy (lowest overflowing
//! position first), so for insert-only workloads the digits and carry count
//! must match the real forest exactly.

use std::io::{self, Write};

use crate::forest::{FixMode, FixPolicy};
use crate::stats::{write_aligned, Format};

#[derive(Debug, Clone)]
pub struct DigitCounter {
    digits: Vec<usize>,
    carries: u64,
    policy: FixPolicy,
}

/// State after one increment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterStep {
    pub step: u64,
    pub digits: Vec<usize>,
    /// Cumulative carries.
    pub carries: u64,
}

impl CounterStep {
    pub fn value(&self) -> u128 {
        digit_value(&self.digits)
    }
}

/// Σ digit(h) · (2^(h+1) − 1).
pub fn digit_value(digits: &[usize]) -> u128 {
    digits
        .iter()
        .enumerate()
        .map(|(h, &d)| d as u128 * ((1u128 << (h + 1)) - 1))
        .sum()
}

impl DigitCounter {
    pub fn new(policy: FixPolicy) -> Self {
        Self {
            digits: Vec::new(),
            carries: 0,
            policy,
        }
    }

    /// Digits from position 0 to the highest nonzero one.
    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn carries(&self) -> u64 {
        self.carries
    }

    pub fn value(&self) -> u128 {
        digit_value(&self.digits)
    }

    pub fn max_digit(&self) -> usize {
        self.digits.iter().copied().max().unwrap_or(0)
    }

    fn lowest_at_least(&self, count: usize) -> Option<usize> {
        self.digits.iter().position(|&d| d >= count)
    }

    fn carry(&mut self, h: usize) {
        self.digits[h] -= 3;
        if self.digits.len() == h + 1 {
            self.digits.push(0);
        }
        self.digits[h + 1] += 1;
        if h > 0 {
            self.digits[h - 1] += 2;
        }
        self.carries += 1;
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
    }

    /// Adds one and carries per the policy. Returns carries made.
    pub fn increment(&mut self) -> u64 {
        let before = self.carries;
        if self.digits.is_empty() {
            self.digits.push(0);
        }
        self.digits[0] += 1;
        match self.policy.mode() {
            FixMode::Eager => {
                while let Some(h) = self.lowest_at_least(3) {
                    self.carry(h);
                }
            }
            FixMode::Relaxed => {
                for _ in 0..self.policy.relaxed_budget() {
                    match self.lowest_at_least(3) {
                        Some(h) => self.carry(h),
                        None => break,
                    }
                }
                while let Some(h) = self.lowest_at_least(5) {
                    self.carry(h);
                }
            }
        }
        self.carries - before
    }
}

/// Runs `count` increments and returns the state after each.
pub fn run_counter(count: u64, policy: FixPolicy) -> Vec<CounterStep> {
    let mut counter = DigitCounter::new(policy);
    (1..=count)
        .map(|step| {
            counter.increment();
            CounterStep {
                step,
                digits: counter.digits().to_vec(),
                carries: counter.carries(),
            }
        })
        .collect()
}

pub const TRACE_COLUMNS: [&str; 4] = ["step", "digits", "carries", "value"];

/// Writes one row per step. Digits are listed from position 0 upward,
/// separated by spaces.
pub fn write_trace<W: Write>(out: W, steps: &[CounterStep], format: Format) -> io::Result<()> {
    let rows: Vec<Vec<String>> = steps
        .iter()
        .map(|s| {
            let digits: Vec<String> = s.digits.iter().map(usize::to_string).collect();
            vec![
                s.step.to_string(),
                digits.join(" "),
                s.carries.to_string(),
                s.value().to_string(),
            ]
        })
        .collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(TRACE_COLUMNS)?;
            for row in &rows {
                w.write_record(row)?;
            }
            w.flush()
        }
        Format::Table => write_aligned(out, &TRACE_COLUMNS, &rows, &[1]),
    }
}
