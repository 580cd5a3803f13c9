//! Track the seeker's stage across a dialogue and flag process
//! suggestions the compatibility table marks as unusual for that stage.
//! The table is a heuristic, so everything here is a warning.

use super::{CompatibilityMatrix, Family};
use crate::corpus::{Dialogue, Role};
use serde::Serialize;
use std::fmt;

/// A process-of-change span that the matrix marks incompatible with the
/// seeker's stage current at that turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintWarning {
    pub turn: usize,
    pub poc: String,
    pub soc: String,
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "turn {}: `{}` is not commonly used while the seeker is in `{}`",
            self.turn, self.poc, self.soc
        )
    }
}

/// The seeker's stage declarations in turn order.
///
/// One entry per seeker turn containing at least one SOC span; the entry
/// carries the widest SOC span's label (ties broken by the earliest
/// span). The stage current at any turn is the most recent entry at or
/// before it.
pub fn track_soc(dialogue: &Dialogue) -> Vec<(usize, String)> {
    let mut entries = Vec::new();
    for (turn_idx, turn) in dialogue.turns.iter().enumerate() {
        if turn.role != Role::Seeker {
            continue;
        }
        // Widest SOC span in the turn; sentences scanned left to right, so
        // the first span of maximal width wins ties.
        let mut best: Option<(usize, &str)> = None;
        for sentence in &turn.sentences {
            for span in sentence.spans() {
                if span.family != Family::Soc {
                    continue;
                }
                if best.is_none_or(|(w, _)| span.width() > w) {
                    best = Some((span.width(), &span.label));
                }
            }
        }
        if let Some((_, label)) = best {
            entries.push((turn_idx, label.to_string()));
        }
    }
    entries
}

/// Warn about every POC span (either role) occurring strictly after the
/// seeker's stage is first known, when the matrix marks the (stage,
/// process) pair incompatible. The stage used for a turn is the latest
/// entry from a strictly earlier turn.
pub fn lint_dialogue(dialogue: &Dialogue, matrix: &CompatibilityMatrix) -> Vec<LintWarning> {
    let entries = track_soc(dialogue);
    let mut warnings = Vec::new();
    for (turn_idx, turn) in dialogue.turns.iter().enumerate() {
        let current = entries
            .iter()
            .take_while(|(t, _)| *t < turn_idx)
            .last()
            .map(|(_, soc)| soc.as_str());
        let Some(soc) = current else { continue };
        for sentence in &turn.sentences {
            for span in sentence.spans() {
                if span.family == Family::Poc && !matrix.compatible(soc, &span.label) {
                    warnings.push(LintWarning {
                        turn: turn_idx,
                        poc: span.label.clone(),
                        soc: soc.to_string(),
                    });
                }
            }
        }
    }
    warnings
}
