//! The counterexample-list cache: candidates synthesized since the positive
//! set last grew, each with the negatives it gave rise to.

use std::collections::BTreeSet;

use crate::lang::{EvalError, Machine, Predicate, Value};

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub candidate: Predicate,
    pub negatives: BTreeSet<Value>,
}

/// The negatives to resume from after `new_positives` join the positive
/// set: those attached to the longest prefix of `trace` whose candidates
/// all accept every new positive. Returns them with the trimmed trace.
pub fn cex_list_filter(
    m: &mut Machine<'_>,
    trace: &[TraceEntry],
    new_positives: &BTreeSet<Value>,
) -> Result<(BTreeSet<Value>, Vec<TraceEntry>), EvalError> {
    let mut resume = BTreeSet::new();
    let mut kept = Vec::new();
    'entries: for entry in trace {
        for v in new_positives {
            m.refuel();
            if !entry.candidate.test(m, v)? {
                break 'entries;
            }
        }
        resume.extend(entry.negatives.iter().cloned());
        kept.push(entry.clone());
    }
    Ok((resume, kept))
}
