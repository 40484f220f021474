//! Example-directed synthesis of predicates over the concrete type.

mod enumerative;
mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

pub use enumerative::{EnumerativeSynth, SynthConfig};
pub use table::TableSynth;

use crate::lang::{Predicate, Program, Type, TypeTable, Value};
use crate::stats::RunStats;

/// Positive and negative examples of the concrete type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExampleSet {
    pub pos: BTreeSet<Value>,
    pub neg: BTreeSet<Value>,
}

impl ExampleSet {
    pub fn new(pos: impl IntoIterator<Item = Value>, neg: impl IntoIterator<Item = Value>) -> Self {
        ExampleSet { pos: pos.into_iter().collect(), neg: neg.into_iter().collect() }
    }

    pub fn is_disjoint(&self) -> bool {
        self.pos.is_disjoint(&self.neg)
    }

    /// Example labels, for looking up recursive calls during search.
    pub fn labels(&self) -> BTreeMap<Value, bool> {
        self.pos
            .iter()
            .map(|v| (v.clone(), true))
            .chain(self.neg.iter().map(|v| (v.clone(), false)))
            .collect()
    }

    /// Does `p` accept every positive and reject every negative?
    pub fn admits(&self, program: &Program, p: &Predicate) -> bool {
        let mut m = program.machine();
        self.pos.iter().all(|v| matches!(p.test(&mut m, v), Ok(true)))
            && self.neg.iter().all(|v| matches!(p.test(&mut m, v), Ok(false)))
    }
}

/// Strict subvalues of `v` at type `target`, found by following the
/// declared field types.
pub fn subvalues_at(types: &TypeTable, v: &Value, ty: &Type, target: &Type, out: &mut Vec<Value>) {
    fn walk(types: &TypeTable, v: &Value, ty: &Type, target: &Type, top: bool, out: &mut Vec<Value>) {
        if !top && ty == target {
            out.push(v.clone());
        }
        match (v, ty) {
            (Value::Ctor(c), Type::Named(_)) => {
                if let Some((_, decl)) = types.ctor(&c.name) {
                    for (a, ft) in c.args.iter().zip(&decl.fields) {
                        walk(types, a, ft, target, false, out);
                    }
                }
            }
            (Value::Pair(p), Type::Product(a, b)) => {
                walk(types, &p.left, a, target, false, out);
                walk(types, &p.right, b, target, false, out);
            }
            _ => {}
        }
    }
    walk(types, v, ty, target, true, out);
}

/// Adds every unlabeled strict subvalue (at the concrete type) of an
/// example to the negatives.
pub fn trace_complete(types: &TypeTable, concrete: &Type, ex: &ExampleSet) -> ExampleSet {
    let mut out = ex.clone();
    let mut subs = Vec::new();
    for v in ex.pos.iter().chain(&ex.neg) {
        subvalues_at(types, v, concrete, concrete, &mut subs);
    }
    for s in subs {
        if !out.pos.contains(&s) {
            out.neg.insert(s);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum SynthResult {
    /// Separating predicates, smallest first.
    Success(Vec<Predicate>),
    Failure(String),
}

pub trait Synthesizer {
    fn synthesize(&self, program: &Program, ex: &ExampleSet) -> SynthResult;
}

/// Predicates from earlier synthesis calls in the same run.
#[derive(Clone, Debug, Default)]
pub struct CandidateCache {
    preds: Vec<Predicate>,
}

impl CandidateCache {
    pub fn new() -> Self {
        CandidateCache::default()
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn clear(&mut self) {
        self.preds.clear();
    }

    pub fn extend(&mut self, preds: impl IntoIterator<Item = Predicate>) {
        for p in preds {
            if !self.preds.contains(&p) {
                self.preds.push(p);
            }
        }
    }

    /// The first cached predicate that separates `ex`.
    pub fn lookup(&self, program: &Program, ex: &ExampleSet) -> Option<Predicate> {
        self.preds.iter().find(|p| ex.admits(program, p)).cloned()
    }
}

/// Outcome of [`synth_cached`]: which predicate to try next and whether it
/// came from the cache.
#[derive(Clone, Debug)]
pub enum Synthesized {
    Cached(Predicate),
    Fresh(Predicate),
    Failed(String),
}

/// Tries the cache first (if given), then the synthesizer. Only real
/// synthesizer calls are counted in `stats`.
pub fn synth_cached(
    synth: &dyn Synthesizer,
    program: &Program,
    ex: &ExampleSet,
    cache: Option<&mut CandidateCache>,
    stats: &mut RunStats,
) -> Synthesized {
    if let Some(c) = &cache {
        if let Some(p) = c.lookup(program, ex) {
            return Synthesized::Cached(p);
        }
    }
    let start = Instant::now();
    let result = synth.synthesize(program, ex);
    stats.record_synth(start.elapsed());
    match result {
        SynthResult::Success(preds) => {
            debug_assert!(preds.iter().all(|p| ex.admits(program, p)));
            let first = preds[0].clone();
            if let Some(c) = cache {
                c.extend(preds);
            }
            Synthesized::Fresh(first)
        }
        SynthResult::Failure(msg) => Synthesized::Failed(msg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{AdtDecl, CtorDecl};

    fn list_types() -> TypeTable {
        let mut tt = TypeTable::new();
        tt.declare(AdtDecl {
            name: "list".into(),
            ctors: vec![
                CtorDecl { name: "Nil".into(), fields: vec![] },
                CtorDecl { name: "Cons".into(), fields: vec![Type::nat(), Type::named("list")] },
            ],
        })
        .unwrap();
        tt
    }

    #[test]
    fn trace_completion_adds_tails() {
        let tt = list_types();
        let list = Type::named("list");
        let ex = ExampleSet::new([Value::nat_list(&[1, 0])], []);
        let done = trace_complete(&tt, &list, &ex);
        assert_eq!(done.pos, ex.pos);
        assert_eq!(done.neg, BTreeSet::from([Value::nat_list(&[0]), Value::nat_list(&[])]));
        assert_eq!(trace_complete(&tt, &list, &done), done);
    }

    #[test]
    fn trace_completion_leaves_leaves_alone() {
        let tt = list_types();
        let list = Type::named("list");
        let ex = ExampleSet::new([Value::nat_list(&[])], []);
        assert_eq!(trace_complete(&tt, &list, &ex), ex);
        let ex = ExampleSet::new([Value::nat_list(&[1])], [Value::nat_list(&[])]);
        assert_eq!(trace_complete(&tt, &list, &ex), ex);
    }
}
