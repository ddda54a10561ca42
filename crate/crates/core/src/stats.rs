//! Per-operation statistics rows, written as CSV or an aligned table.

use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::compare::KeyOrder;
use crate::heap::Queue;

pub const COLUMNS: [&str; 8] = [
    "op_index",
    "op",
    "n",
    "phi",
    "rearrangements",
    "comparisons",
    "max_digit",
    "tree_count",
];

/// Queue state after an operation. Counters are cumulative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsRecord {
    pub op_index: usize,
    pub op: &'static str,
    pub n: usize,
    pub phi: u64,
    pub rearrangements: u64,
    pub comparisons: u64,
    pub max_digit: usize,
    pub tree_count: usize,
    #[serde(skip)]
    pub digits: Vec<usize>,
}

impl StatsRecord {
    pub fn capture<K, V, C: KeyOrder<K>>(
        op_index: usize,
        op: &'static str,
        q: &Queue<K, V, C>,
    ) -> Self {
        Self {
            op_index,
            op,
            n: q.len(),
            phi: q.phi(),
            rearrangements: q.ledger().rearrangements(),
            comparisons: q.comparisons(),
            max_digit: q.forest().max_digit(),
            tree_count: q.tree_count(),
            digits: q.digits(),
        }
    }

    fn cells(&self) -> [String; 8] {
        [
            self.op_index.to_string(),
            self.op.to_string(),
            self.n.to_string(),
            self.phi.to_string(),
            self.rearrangements.to_string(),
            self.comparisons.to_string(),
            self.max_digit.to_string(),
            self.tree_count.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Table,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format `{other}` (expected csv or table)")),
        }
    }
}

/// Writes `records` with a header line.
pub fn write_records<W: Write>(out: W, records: &[StatsRecord], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, records),
        Format::Table => write_table(out, records),
    }
}

fn write_csv<W: Write>(out: W, records: &[StatsRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}

fn write_table<W: Write>(out: W, records: &[StatsRecord]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = records.iter().map(|r| r.cells().to_vec()).collect();
    write_aligned(out, &COLUMNS, &rows, &[1])
}

/// Writes `rows` under `header` in space-separated columns. Columns listed
/// in `left` are left-aligned; the rest are right-aligned.
pub(crate) fn write_aligned<W: Write>(
    mut out: W,
    header: &[&str],
    rows: &[Vec<String>],
    left: &[usize],
) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut line = |cells: &mut dyn Iterator<Item = &str>| -> io::Result<()> {
        let mut text = String::new();
        for (i, (cell, &w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                text.push_str("  ");
            }
            if left.contains(&i) {
                text.push_str(&format!("{cell:<w$}"));
            } else {
                text.push_str(&format!("{cell:>w$}"));
            }
        }
        writeln!(out, "{}", text.trim_end())
    };
    line(&mut header.iter().copied())?;
    for row in rows {
        line(&mut row.iter().map(String::as_str))?;
    }
    Ok(())
}
