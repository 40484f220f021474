//! The comparison strategies: conjunctive strengthening, per-operation
//! constraint solving and one-shot learning.

use std::collections::BTreeSet;
use std::time::Instant;

use super::{CegisError, Engine, Outcome, State};
use crate::induct::CexReport;
use crate::lang::{EvalError, Expr, Predicate, Relation, Type, Value};
use crate::synth::{ExampleSet, SynthResult, Synthesized};
use crate::verify::{default_budget, verify};

impl Engine<'_> {
    fn conjoin(&self, a: &Predicate, b: &Predicate) -> Predicate {
        let x = "x";
        let body = Expr::and(
            Expr::app(a.expr().clone(), Expr::var(x)),
            Expr::app(b.expr().clone(), Expr::var(x)),
        );
        self.program
            .predicate(Expr::lam(x, self.program.concrete().clone(), body))
            .expect("conjunction of predicates is a predicate")
    }

    /// Synthesizes a sufficient candidate, then conjoins strengthenings
    /// until it is inductive. A positive counterexample restarts from
    /// scratch with the enlarged positive set.
    pub(super) fn conj_str(&mut self, st: &mut State) -> Result<Outcome, EvalError> {
        'restart: loop {
            st.neg.clear();
            st.trace.clear();
            st.cache.clear();
            let base = loop {
                if self.timed_out() {
                    return Ok(Outcome::Timeout);
                }
                let i = match self.synthesize(st) {
                    Synthesized::Failed(msg) => return Ok(Outcome::SynthFailure(msg)),
                    Synthesized::Cached(p) | Synthesized::Fresh(p) => p,
                };
                match self.sufficiency(&i)? {
                    None => break i,
                    Some(n) => {
                        let fresh: BTreeSet<Value> = n.difference(&st.pos).cloned().collect();
                        if fresh.is_empty() {
                            return Ok(self.violation(st, n));
                        }
                        st.neg.extend(fresh);
                    }
                }
            };
            let mut conj = base;
            loop {
                if self.timed_out() {
                    return Ok(Outcome::Timeout);
                }
                let rel = Relation::Pred(conj.clone());
                let c = match self.cond_inductive(&rel, &rel)? {
                    CexReport::Valid => return Ok(Outcome::Invariant { invariant: conj, bounded: true }),
                    CexReport::Counterexample(c) => c,
                };
                if c.s.is_subset(&st.pos) {
                    st.add_positives(&c.v, c.call.as_ref());
                    continue 'restart;
                }
                st.neg = c.s.difference(&st.pos).cloned().collect();
                loop {
                    if self.timed_out() {
                        return Ok(Outcome::Timeout);
                    }
                    let extra = match self.synthesize(st) {
                        Synthesized::Failed(msg) => return Ok(Outcome::SynthFailure(msg)),
                        Synthesized::Cached(p) | Synthesized::Fresh(p) => p,
                    };
                    let cand = self.conjoin(&conj, &extra);
                    match self.cond_inductive(&Relation::Pred(cand.clone()), &rel)? {
                        CexReport::Valid => {
                            conj = cand;
                            break;
                        }
                        CexReport::Counterexample(c2) => {
                            if c2.s.is_subset(&st.pos) {
                                st.add_positives(&c2.v, c2.call.as_ref());
                                continue 'restart;
                            }
                            st.neg.extend(c2.s.difference(&st.pos).cloned());
                        }
                    }
                }
            }
        }
    }

    /// Checks one operation at a time against full inductiveness only. A
    /// counterexample whose inputs are all known positives is used to
    /// weaken; any other one strengthens.
    pub(super) fn la(&mut self, st: &mut State) -> Result<Outcome, EvalError> {
        let ops = self.program.module.ops.clone();
        let mut focus = 0;
        loop {
            if self.timed_out() {
                return Ok(Outcome::Timeout);
            }
            let i = match self.synthesize(st) {
                Synthesized::Failed(msg) => return Ok(Outcome::SynthFailure(msg)),
                Synthesized::Cached(p) | Synthesized::Fresh(p) => p,
            };
            if let Some(n) = self.sufficiency(&i)? {
                let fresh: BTreeSet<Value> = n.difference(&st.pos).cloned().collect();
                if fresh.is_empty() {
                    return Ok(self.violation(st, n));
                }
                st.neg.extend(fresh);
                continue;
            }
            let rel = Relation::Pred(i.clone());
            let mut valid = 0;
            while valid < ops.len() {
                let start = Instant::now();
                let r = self.checker.check_op(&ops[focus], &rel, &rel);
                self.stats.record_verify(start.elapsed());
                match r? {
                    CexReport::Valid => {
                        valid += 1;
                        focus = (focus + 1) % ops.len();
                    }
                    CexReport::Counterexample(c) => {
                        if c.s.is_subset(&st.pos) {
                            st.add_positives(&c.v, c.call.as_ref());
                            st.neg.retain(|v| !c.v.contains(v));
                        } else {
                            st.neg.extend(c.s.difference(&st.pos).cloned());
                        }
                        break;
                    }
                }
            }
            if valid == ops.len() {
                return Ok(Outcome::Invariant { invariant: i, bounded: true });
            }
        }
    }

    /// Labels the 30 smallest concrete values by the spec and synthesizes
    /// once.
    pub(super) fn one_shot(&mut self, st: &mut State) -> Result<Outcome, CegisError> {
        let program = self.program;
        let quants = &program.spec.quantifiers;
        let abstract_at: Vec<usize> =
            quants.iter().enumerate().filter(|(_, (_, t))| t.contains_abstract()).map(|(k, _)| k).collect();
        let [at] = abstract_at[..] else {
            return Err(CegisError::UnsupportedMode(format!(
                "one-shot learning needs exactly one quantifier over t, the spec has {}",
                abstract_at.len()
            )));
        };
        if quants[at].1 != Type::Abstract {
            return Err(CegisError::UnsupportedMode(format!(
                "one-shot learning needs a quantifier of type t, found {}",
                quants[at].1
            )));
        }
        let others: Vec<Type> = program
            .concrete_quantifiers()
            .into_iter()
            .enumerate()
            .filter(|(k, _)| *k != at)
            .map(|(_, t)| t)
            .collect();
        let start = Instant::now();
        let en = self.checker.enumerator();
        let smallest: Vec<Value> = en.values(program.concrete(), 30, 30).collect();
        let mut ex = ExampleSet::default();
        let mut m = program.machine();
        let mut scratch = crate::stats::RunStats::default();
        for v in smallest {
            let holds = if others.is_empty() {
                m.refuel();
                program.spec_holds(&mut m, std::slice::from_ref(&v))?
            } else {
                let budget = default_budget(others.len());
                verify(en, &others, &budget, &mut scratch, |rest| {
                    let mut args = rest.to_vec();
                    args.insert(at, v.clone());
                    m.refuel();
                    program.spec_holds(&mut m, &args)
                })?
                .is_valid()
            };
            if holds {
                ex.pos.insert(v);
            } else {
                ex.neg.insert(v);
            }
        }
        self.stats.record_verify(start.elapsed());
        st.pos = ex.pos.clone();
        st.neg = ex.neg.clone();
        st.iterations = 1;
        let start = Instant::now();
        let result = self.synth.synthesize(program, &ex);
        self.stats.record_synth(start.elapsed());
        Ok(match result {
            SynthResult::Success(preds) => Outcome::Unchecked(preds[0].clone()),
            SynthResult::Failure(msg) => Outcome::SynthFailure(msg),
        })
    }
}
