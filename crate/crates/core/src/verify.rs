//! Size-bounded enumerative checking of universally quantified predicates.
//! Validity here only means no counterexample was found within the budget.

use std::ops::ControlFlow;
use std::time::Instant;

use crate::enumerate::Enumerator;
use crate::lang::{EvalError, Type, Value};
use crate::stats::RunStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifBudget {
    /// Largest value, in nodes, tried for any quantifier.
    pub max_nodes: usize,
    /// Values tried per quantifier.
    pub per_quantifier: usize,
    /// Tuples evaluated in total.
    pub total: usize,
}

pub fn default_budget(num_quantifiers: usize) -> VerifBudget {
    assert!(num_quantifiers >= 1, "a query needs at least one quantifier");
    if num_quantifiers == 1 {
        VerifBudget { max_nodes: 30, per_quantifier: 3000, total: 3000 }
    } else {
        VerifBudget { max_nodes: 15, per_quantifier: 3000, total: 30000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    CounterExample(Vec<Value>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifOutcome {
    pub verdict: Verdict,
    /// Tuples on which the body was evaluated.
    pub tuples: usize,
    /// Always true: the check covered only a finite slice of the inputs.
    pub bounded: bool,
}

impl VerifOutcome {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn counterexample(&self) -> Option<&[Value]> {
        match &self.verdict {
            Verdict::CounterExample(vs) => Some(vs),
            Verdict::Valid => None,
        }
    }
}

/// Checks `body` on tuples of values of `quantifiers`, smallest total size
/// first, ties broken by the leftmost quantifier's position in its stream.
/// Returns the first tuple on which `body` is false.
pub fn verify<F>(
    en: &Enumerator<'_>,
    quantifiers: &[Type],
    budget: &VerifBudget,
    stats: &mut RunStats,
    mut body: F,
) -> Result<VerifOutcome, EvalError>
where
    F: FnMut(&[Value]) -> Result<bool, EvalError>,
{
    assert!(!quantifiers.is_empty(), "a query needs at least one quantifier");
    let start = Instant::now();
    let result = search(en, quantifiers, budget, &mut body);
    stats.record_verify(start.elapsed());
    let outcome = result?;
    if let Verdict::CounterExample(vs) = &outcome.verdict {
        assert!(!body(vs)?, "verifier counterexample does not refute the query");
    }
    Ok(outcome)
}

fn search<F>(
    en: &Enumerator<'_>,
    quantifiers: &[Type],
    budget: &VerifBudget,
    body: &mut F,
) -> Result<VerifOutcome, EvalError>
where
    F: FnMut(&[Value]) -> Result<bool, EvalError>,
{
    // per quantifier: values grouped by size, each group in stream order
    let mut buckets: Vec<Vec<Vec<Value>>> = Vec::with_capacity(quantifiers.len());
    for q in quantifiers {
        let mut by_size: Vec<Vec<Value>> = vec![Vec::new(); budget.max_nodes + 1];
        for v in en.values(q, budget.max_nodes, budget.per_quantifier) {
            let s = v.size().expect("enumerated values are first order");
            by_size[s].push(v);
        }
        buckets.push(by_size);
    }
    let max_total = budget.max_nodes * quantifiers.len();
    let mut walk = Walk { buckets: &buckets, limit: budget.total, tuples: 0, current: Vec::new(), body };
    for total in quantifiers.len()..=max_total {
        match walk.visit(0, total)? {
            ControlFlow::Break(Some(cex)) => {
                return Ok(VerifOutcome { verdict: Verdict::CounterExample(cex), tuples: walk.tuples, bounded: true })
            }
            ControlFlow::Break(None) => break,
            ControlFlow::Continue(()) => {}
        }
    }
    Ok(VerifOutcome { verdict: Verdict::Valid, tuples: walk.tuples, bounded: true })
}

struct Walk<'b, F> {
    buckets: &'b [Vec<Vec<Value>>],
    limit: usize,
    tuples: usize,
    current: Vec<Value>,
    body: &'b mut F,
}

impl<F> Walk<'_, F>
where
    F: FnMut(&[Value]) -> Result<bool, EvalError>,
{
    /// Break(Some) on a counterexample, Break(None) when the tuple budget
    /// runs out.
    fn visit(&mut self, q: usize, remaining: usize) -> Result<ControlFlow<Option<Vec<Value>>>, EvalError> {
        let last = q + 1 == self.buckets.len();
        let rest = self.buckets.len() - q - 1;
        let sizes = &self.buckets[q];
        for s in 1..sizes.len() {
            if s + rest > remaining {
                break;
            }
            if last && s != remaining {
                continue;
            }
            for v in &sizes[s] {
                self.current.push(v.clone());
                let flow = if last {
                    if self.tuples >= self.limit {
                        self.current.pop();
                        return Ok(ControlFlow::Break(None));
                    }
                    self.tuples += 1;
                    if (self.body)(&self.current)? {
                        ControlFlow::Continue(())
                    } else {
                        ControlFlow::Break(Some(self.current.clone()))
                    }
                } else {
                    self.visit(q + 1, remaining - s)?
                };
                self.current.pop();
                if flow.is_break() {
                    return Ok(flow);
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::TypeTable;

    #[test]
    fn default_budgets() {
        assert_eq!(default_budget(1), VerifBudget { max_nodes: 30, per_quantifier: 3000, total: 3000 });
        assert_eq!(default_budget(2), VerifBudget { max_nodes: 15, per_quantifier: 3000, total: 30000 });
        assert_eq!(default_budget(3), default_budget(2));
    }

    #[test]
    fn reflexivity_is_valid() {
        let tt = TypeTable::new();
        let en = Enumerator::new(&tt);
        let mut stats = RunStats::default();
        let out = verify(&en, &[Type::nat()], &default_budget(1), &mut stats, |vs| Ok(vs[0] == vs[0])).unwrap();
        assert!(out.is_valid());
        assert!(out.bounded);
        assert_eq!(out.tuples, 30);
        assert_eq!(stats.verify_calls, 1);
    }

    #[test]
    fn first_counterexample_is_smallest() {
        let tt = TypeTable::new();
        let en = Enumerator::new(&tt);
        let mut stats = RunStats::default();
        let out = verify(&en, &[Type::nat(), Type::nat()], &default_budget(2), &mut stats, |vs| {
            Ok(vs[0].size().unwrap() + vs[1].size().unwrap() < 5 || vs[0] == vs[1])
        })
        .unwrap();
        assert_eq!(out.counterexample().unwrap(), &[Value::nat(0), Value::nat(3)]);
    }

    #[test]
    fn diagonal_order_three_quantifiers() {
        let tt = TypeTable::new();
        let en = Enumerator::new(&tt);
        let mut seen = Vec::new();
        let budget = VerifBudget { max_nodes: 3, per_quantifier: 3, total: 100 };
        verify(&en, &[Type::nat(), Type::nat(), Type::nat()], &budget, &mut RunStats::default(), |vs| {
            seen.push(vs.iter().map(|v| v.as_nat().unwrap()).collect::<Vec<_>>());
            Ok(true)
        })
        .unwrap();
        assert_eq!(seen.len(), 27);
        assert_eq!(&seen[..4], &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let sums: Vec<u64> = seen.iter().map(|t| t.iter().sum()).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn tuple_cap_is_respected() {
        let tt = TypeTable::new();
        let en = Enumerator::new(&tt);
        let budget = VerifBudget { max_nodes: 15, per_quantifier: 3000, total: 100 };
        let mut calls = 0;
        let out = verify(&en, &[Type::nat(), Type::nat()], &budget, &mut RunStats::default(), |_| {
            calls += 1;
            Ok(true)
        })
        .unwrap();
        assert_eq!(calls, 100);
        assert_eq!(out.tuples, 100);
    }
}
