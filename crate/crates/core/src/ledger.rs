//! Potential-function accounting.
//!
//! The potential is the sum of tree heights in the forest. The ledger keeps
//! a running value of it, fed by two kinds of events:
//!
//! * structural changes made by a public operation before fixing (a new
//!   singleton, the subtrees left by a removed root, ...), and
//! * rearrangement steps performed while fixing.
//!
//! Every delta is the observed change in the height sum, never an assumed
//! constant. A rearrangement on height `h >= 1` lowers the sum by exactly
//! one; on height 0 there are no subtrees to hand back, so the sum rises by
//! one (three singletons become one height-1 tree).
//!
//! With one rearrangement counted as one unit of actual work, the amortized
//! cost of an operation is `rearrangements + Δφ`. Summed from an empty queue,
//! `R = Σ amortized − φ_final`, and since `φ_final >= 0` the amortized total
//! bounds the real work from above. [`PotentialLedger::audit`] checks these
//! identities exactly against an independently recomputed potential.

use thiserror::Error;

/// Public operation kinds tracked by the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Insert,
    DeleteMin,
    Meld,
    DecreaseKey,
    Delete,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Insert => "insert",
            OpKind::DeleteMin => "delete-min",
            OpKind::Meld => "meld",
            OpKind::DecreaseKey => "decrease-key",
            OpKind::Delete => "delete",
        }
    }
}

/// Accounting for one public operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpRecord {
    pub op: OpKind,
    /// Height-sum change from the operation itself, before fixing.
    pub structural_delta: i64,
    /// Rearrangement steps performed by the fix that followed.
    pub rearrangements: u64,
    /// Height-sum change caused by those steps.
    pub rearrangement_delta: i64,
    pub comparisons: u64,
}

impl OpRecord {
    /// Actual work (rearrangements) plus the total potential change.
    pub fn amortized(&self) -> i64 {
        self.rearrangements as i64 + self.structural_delta + self.rearrangement_delta
    }

    pub fn phi_delta(&self) -> i64 {
        self.structural_delta + self.rearrangement_delta
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("potential would drop below zero (phi = {phi}, delta = {delta})")]
    Underflow { phi: u64, delta: i64 },
    #[error("rearrangement on height {height} changed the height sum by {observed}, expected {expected}")]
    StepDelta {
        height: u32,
        observed: i64,
        expected: i64,
    },
    #[error("no open operation record")]
    NoOpenRecord,
}

/// Running potential plus counters.
#[derive(Debug, Clone, Default)]
pub struct PotentialLedger {
    phi: u64,
    rearrangements: u64,
    /// Steps whose inputs had height 0.
    singleton_steps: u64,
    /// Steps on height >= 1 that lowered the height sum by exactly one.
    unit_drops: u64,
    comparisons: u64,
    structural_total: i64,
    rearrangement_delta_total: i64,
    amortized_total: i64,
    records: Vec<OpRecord>,
    open: bool,
}

/// The height-sum change a rearrangement on height `h` must produce:
/// `(h+1) + 2(h-1) - 3h` when leftovers exist, `1 - 0` otherwise.
pub fn expected_step_delta(height: u32) -> i64 {
    if height == 0 {
        1
    } else {
        -1
    }
}

impl PotentialLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// Total rearrangement steps, `R`.
    pub fn rearrangements(&self) -> u64 {
        self.rearrangements
    }

    pub fn singleton_steps(&self) -> u64 {
        self.singleton_steps
    }

    /// Rearrangements whose inputs had height >= 1.
    pub fn tall_steps(&self) -> u64 {
        self.rearrangements - self.singleton_steps
    }

    /// Tall steps that lowered the potential by exactly one.
    pub fn unit_drops(&self) -> u64 {
        self.unit_drops
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn structural_total(&self) -> i64 {
        self.structural_total
    }

    pub fn amortized_total(&self) -> i64 {
        self.amortized_total
    }

    pub fn records(&self) -> &[OpRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&OpRecord> {
        self.records.last()
    }

    fn apply(&mut self, delta: i64) -> Result<(), LedgerError> {
        let next = self.phi as i64 + delta;
        if next < 0 {
            return Err(LedgerError::Underflow {
                phi: self.phi,
                delta,
            });
        }
        self.phi = next as u64;
        Ok(())
    }

    /// Opens a record for a public operation and applies its structural delta.
    pub fn record_structural(&mut self, op: OpKind, delta: i64) -> Result<(), LedgerError> {
        self.apply(delta)?;
        self.structural_total += delta;
        self.records.push(OpRecord {
            op,
            structural_delta: delta,
            rearrangements: 0,
            rearrangement_delta: 0,
            comparisons: 0,
        });
        self.open = true;
        Ok(())
    }

    /// Records one rearrangement on inputs of the given height whose observed
    /// effect on the forest's height sum was `observed_delta`.
    pub fn record_rearrangement(
        &mut self,
        input_height: u32,
        observed_delta: i64,
    ) -> Result<(), LedgerError> {
        let expected = expected_step_delta(input_height);
        if observed_delta != expected {
            return Err(LedgerError::StepDelta {
                height: input_height,
                observed: observed_delta,
                expected,
            });
        }
        self.apply(observed_delta)?;
        self.rearrangements += 1;
        self.rearrangement_delta_total += observed_delta;
        if input_height == 0 {
            self.singleton_steps += 1;
        } else if observed_delta == -1 {
            self.unit_drops += 1;
        }
        if let Some(rec) = self.records.last_mut().filter(|_| self.open) {
            rec.rearrangements += 1;
            rec.rearrangement_delta += observed_delta;
        }
        Ok(())
    }

    /// Closes the open record, charging it `comparisons`.
    pub fn close_op(&mut self, comparisons: u64) -> Result<(), LedgerError> {
        if !self.open {
            return Err(LedgerError::NoOpenRecord);
        }
        self.open = false;
        let rec = self.records.last_mut().expect("open record exists");
        rec.comparisons = comparisons;
        self.comparisons += comparisons;
        self.amortized_total += rec.amortized();
        Ok(())
    }

    /// Folds another queue's ledger into this one (meld). Both must be closed.
    pub(crate) fn absorb(&mut self, other: PotentialLedger) {
        debug_assert!(!self.open && !other.open);
        self.phi += other.phi;
        self.rearrangements += other.rearrangements;
        self.singleton_steps += other.singleton_steps;
        self.unit_drops += other.unit_drops;
        self.comparisons += other.comparisons;
        self.structural_total += other.structural_total;
        self.rearrangement_delta_total += other.rearrangement_delta_total;
        self.amortized_total += other.amortized_total;
        self.records.extend(other.records);
    }

    /// Checks the ledger against `recomputed_phi`, the height sum measured
    /// directly from the forest.
    pub fn audit(&self, recomputed_phi: u64) -> AuditReport {
        let mut failures = Vec::new();
        let phi = self.phi as i64;
        if recomputed_phi != self.phi {
            failures.push(AuditFailure::PhiMismatch {
                ledger: self.phi,
                recomputed: recomputed_phi,
            });
        }
        if self.structural_total + self.rearrangement_delta_total != phi {
            failures.push(AuditFailure::DeltaSum {
                structural: self.structural_total,
                rearrangement: self.rearrangement_delta_total,
                phi: self.phi,
            });
        }
        let step_sum = self.singleton_steps as i64 - self.tall_steps() as i64;
        if step_sum != self.rearrangement_delta_total {
            failures.push(AuditFailure::StepSum {
                expected: step_sum,
                recorded: self.rearrangement_delta_total,
            });
        }
        if self.unit_drops != self.tall_steps() {
            failures.push(AuditFailure::UnitDrop {
                tall_steps: self.tall_steps(),
                unit_drops: self.unit_drops,
            });
        }
        let amortized: i64 = self.records.iter().map(OpRecord::amortized).sum();
        let record_steps: u64 = self.records.iter().map(|r| r.rearrangements).sum();
        if amortized != self.amortized_total || record_steps != self.rearrangements {
            failures.push(AuditFailure::Records {
                amortized_sum: amortized,
                amortized_total: self.amortized_total,
                record_steps,
                rearrangements: self.rearrangements,
            });
        }
        if self.rearrangements as i64 != amortized - recomputed_phi as i64 {
            failures.push(AuditFailure::AmortizedIdentity {
                rearrangements: self.rearrangements,
                amortized,
                phi: recomputed_phi,
            });
        }
        AuditReport {
            phi: self.phi,
            recomputed_phi,
            rearrangements: self.rearrangements,
            amortized_total: amortized,
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditFailure {
    PhiMismatch {
        ledger: u64,
        recomputed: u64,
    },
    /// Structural plus rearrangement deltas do not add up to φ.
    DeltaSum {
        structural: i64,
        rearrangement: i64,
        phi: u64,
    },
    /// Rearrangement deltas disagree with +1 per singleton step, −1 per tall step.
    StepSum {
        expected: i64,
        recorded: i64,
    },
    UnitDrop {
        tall_steps: u64,
        unit_drops: u64,
    },
    Records {
        amortized_sum: i64,
        amortized_total: i64,
        record_steps: u64,
        rearrangements: u64,
    },
    /// `R != Σ amortized − φ_final`.
    AmortizedIdentity {
        rearrangements: u64,
        amortized: i64,
        phi: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub phi: u64,
    pub recomputed_phi: u64,
    pub rearrangements: u64,
    pub amortized_total: i64,
    pub failures: Vec<AuditFailure>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}
