//! Conditional inductiveness: checking that module operations map inputs
//! satisfying P to outputs satisfying Q, and extracting counterexamples
//! when they do not.

mod contract;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

pub use contract::{contract_display, wrap_contract};

use crate::enumerate::{enum_curried, Enumerator, FnGrammar};
use crate::lang::{Crossing, EvalError, Machine, Name, Op, Program, Relation, Type, Value};

/// The rule that decided a judgment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Base,
    Abs,
    Prod,
    Fun,
    AbsCex,
    ProdCex1,
    ProdCex2,
    FunCex,
    /// Found by running the operation under a higher-order contract.
    ContractCex,
}

/// An application of a module operation, kept so counterexamples can be
/// replayed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Call {
    pub op: Name,
    pub args: Vec<Value>,
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.op)?;
        for a in &self.args {
            if a.is_function() {
                write!(f, " ({a})")?;
            } else {
                write!(f, " {a}")?;
            }
        }
        Ok(())
    }
}

/// Inputs `s` satisfying P from which the module produced outputs `v`
/// falsifying Q.
#[derive(Clone, Debug)]
pub struct Cex {
    pub s: BTreeSet<Value>,
    pub v: BTreeSet<Value>,
    pub rule: Rule,
    /// The operation application that exhibited the failure, when the
    /// judgment went through a function rule.
    pub call: Option<Call>,
    /// Boundary crossings, for counterexamples found by contracts.
    pub log: Vec<Crossing>,
}

#[derive(Clone, Debug)]
pub enum CexReport {
    Valid,
    Counterexample(Cex),
}

impl CexReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, CexReport::Valid)
    }

    pub fn cex(&self) -> Option<&Cex> {
        match self {
            CexReport::Counterexample(c) => Some(c),
            CexReport::Valid => None,
        }
    }
}

/// Values at abstract positions of `v`, read at type `sigma`.
pub fn collect_v(sigma: &Type, v: &Value) -> BTreeSet<Value> {
    let mut out = BTreeSet::new();
    collect_into(sigma, v, &mut out);
    out
}

fn collect_into(sigma: &Type, v: &Value, out: &mut BTreeSet<Value>) {
    match (sigma, v) {
        (Type::Abstract, _) => {
            out.insert(v.clone());
        }
        (Type::Product(a, b), Value::Pair(p)) => {
            collect_into(a, &p.left, out);
            collect_into(b, &p.right, out);
        }
        _ => {}
    }
}

/// Enumeration limits for argument slots.
#[derive(Clone, Debug)]
pub struct InductBudget {
    /// Node cap for abstract slots when an operation has one of them.
    pub abstract_nodes_single: usize,
    /// Node cap for abstract slots when an operation has several.
    pub abstract_nodes_multi: usize,
    /// Values drawn from the enumeration for an abstract slot governed by
    /// a predicate, before filtering.
    pub abstract_count: usize,
    pub base_nodes: usize,
    pub base_count: usize,
    /// Applications per operation.
    pub total: usize,
    pub functions: FnGrammar,
}

impl Default for InductBudget {
    fn default() -> Self {
        InductBudget {
            abstract_nodes_single: 30,
            abstract_nodes_multi: 15,
            abstract_count: 3000,
            base_nodes: 15,
            base_count: 3000,
            total: 30000,
            functions: FnGrammar::default(),
        }
    }
}

/// How operations are exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// Direct rules for first-order operations, contracts for the rest.
    #[default]
    Auto,
    /// Contracts for every operation.
    Contracts,
}

/// Candidate values for one argument slot.
enum Slot {
    Outer(Vec<Value>),
    Inner(Vec<Value>),
}

pub struct Checker<'p> {
    pub program: &'p Program,
    pub budget: InductBudget,
    pub mode: CheckMode,
    en: Enumerator<'p>,
}

impl<'p> Checker<'p> {
    pub fn new(program: &'p Program) -> Self {
        Checker::with_budget(program, InductBudget::default())
    }

    pub fn with_budget(program: &'p Program, budget: InductBudget) -> Self {
        Checker { program, budget, mode: CheckMode::Auto, en: Enumerator::new(&program.types) }
    }

    pub fn enumerator(&self) -> &Enumerator<'p> {
        &self.en
    }

    fn machine(&self) -> Machine<'p> {
        self.program.machine()
    }

    /// Checks every operation in declaration order; the first failing one
    /// decides the counterexample.
    pub fn cond_inductive(&self, p: &Relation, q: &Relation) -> Result<CexReport, EvalError> {
        for op in &self.program.module.ops {
            let report = self.check_op(op, p, q)?;
            if !report.is_valid() {
                return Ok(report);
            }
        }
        Ok(CexReport::Valid)
    }

    pub fn check_op(&self, op: &Op, p: &Relation, q: &Relation) -> Result<CexReport, EvalError> {
        let mut report = if self.mode == CheckMode::Contracts || !op.sig.is_first_order() {
            self.check_op_contract(op, p, q)?
        } else {
            let (report, _) = self.judge_named(&op.name, p, q, self.program.op_value(op), &op.sig)?;
            report
        };
        if let CexReport::Counterexample(c) = &mut report {
            self.assert_well_formed(p, q, c)?;
            c.call.get_or_insert_with(|| Call { op: op.name.clone(), args: Vec::new() });
        }
        Ok(report)
    }

    /// S satisfies P, V falsifies Q and is nonempty.
    fn assert_well_formed(&self, p: &Relation, q: &Relation, c: &Cex) -> Result<(), EvalError> {
        let mut m = self.machine();
        assert!(!c.v.is_empty(), "counterexample with empty V");
        for s in &c.s {
            m.refuel();
            assert!(m.holds(p, s)?, "counterexample input {s} does not satisfy P");
        }
        for v in &c.v {
            m.refuel();
            assert!(!m.holds(q, v)?, "counterexample output {v} satisfies Q");
        }
        Ok(())
    }

    /// The judgment for an arbitrary value at a type over `α`.
    pub fn judge(&self, p: &Relation, q: &Relation, v: &Value, ty: &Type) -> Result<(CexReport, Rule), EvalError> {
        self.judge_named(&"_".into(), p, q, v, ty)
    }

    fn judge_named(
        &self,
        name: &Name,
        p: &Relation,
        q: &Relation,
        v: &Value,
        ty: &Type,
    ) -> Result<(CexReport, Rule), EvalError> {
        match ty {
            Type::Named(_) => Ok((CexReport::Valid, Rule::Base)),
            Type::Abstract => {
                let mut m = self.machine();
                if m.holds(q, v)? {
                    Ok((CexReport::Valid, Rule::Abs))
                } else {
                    let cex = Cex {
                        s: BTreeSet::new(),
                        v: BTreeSet::from([v.clone()]),
                        rule: Rule::AbsCex,
                        call: None,
                        log: Vec::new(),
                    };
                    Ok((CexReport::Counterexample(cex), Rule::AbsCex))
                }
            }
            Type::Product(a, b) => {
                let Value::Pair(pair) = v else {
                    return Err(EvalError::TypeConfusion("expected a pair at a product type"));
                };
                if let (CexReport::Counterexample(mut c), _) = self.judge_named(name, p, q, &pair.left, a)? {
                    c.rule = Rule::ProdCex1;
                    return Ok((CexReport::Counterexample(c), Rule::ProdCex1));
                }
                if let (CexReport::Counterexample(mut c), _) = self.judge_named(name, p, q, &pair.right, b)? {
                    c.rule = Rule::ProdCex2;
                    return Ok((CexReport::Counterexample(c), Rule::ProdCex2));
                }
                Ok((CexReport::Valid, Rule::Prod))
            }
            Type::Arrow(..) => {
                let (params, result) = ty.uncurry();
                if params.iter().any(|t| t.contains_arrow()) {
                    return Err(EvalError::TypeConfusion("function arguments need contract checking"));
                }
                let params: Vec<Type> = params.into_iter().cloned().collect();
                let slots = self.slots(&params, p)?;
                let mut m = self.machine();
                let mut found = None;
                self.for_each_input(&slots, |args| {
                    m.refuel();
                    let out = m.apply_all(v, args.iter().cloned())?;
                    let (report, _) = self.judge_named(name, p, q, &out, result)?;
                    if let CexReport::Counterexample(c) = report {
                        let mut s = c.s;
                        for (sigma, a) in params.iter().zip(args) {
                            s.extend(collect_v(sigma, a));
                        }
                        found = Some(Cex {
                            s,
                            v: c.v,
                            rule: Rule::FunCex,
                            call: Some(Call { op: name.clone(), args: args.to_vec() }),
                            log: Vec::new(),
                        });
                        return Ok(ControlFlow::Break(()));
                    }
                    Ok(ControlFlow::Continue(()))
                })?;
                Ok(match found {
                    Some(c) => (CexReport::Counterexample(c), Rule::FunCex),
                    None => (CexReport::Valid, Rule::Fun),
                })
            }
        }
    }

    /// Argument candidates. Slots mentioning `α` (and function slots) draw
    /// values satisfying P and are iterated outermost.
    fn slots(&self, params: &[Type], p: &Relation) -> Result<Vec<Slot>, EvalError> {
        let concrete = self.program.concrete();
        let outer_count = params.iter().filter(|t| t.contains_abstract() || t.contains_arrow()).count();
        let nodes = if outer_count > 1 { self.budget.abstract_nodes_multi } else { self.budget.abstract_nodes_single };
        let mut m = self.machine();
        let mut slots = Vec::with_capacity(params.len());
        for sigma in params {
            if sigma.contains_arrow() {
                let conc = sigma.substitute_abstract(concrete);
                let (args, res) = conc.uncurry();
                let args: Vec<Type> = args.into_iter().cloned().collect();
                if args.iter().any(Type::contains_arrow) || res.contains_arrow() {
                    return Err(EvalError::TypeConfusion("only first-order function arguments are enumerated"));
                }
                let fs = enum_curried(&self.program.types, &args, res, &self.budget.functions);
                slots.push(Slot::Outer(fs.into_iter().map(|f| f.value).collect()));
            } else if *sigma == Type::Abstract {
                let vals = match p {
                    Relation::Set(s) => s.iter().cloned().collect(),
                    Relation::Pred(_) => {
                        let mut keep = Vec::new();
                        for v in self.en.values(concrete, nodes, self.budget.abstract_count) {
                            m.refuel();
                            if m.holds(p, &v)? {
                                keep.push(v);
                            }
                        }
                        keep
                    }
                };
                slots.push(Slot::Outer(vals));
            } else if sigma.contains_abstract() {
                let conc = sigma.substitute_abstract(concrete);
                let mut keep = Vec::new();
                for v in self.en.values(&conc, nodes, self.budget.abstract_count) {
                    let mut ok = true;
                    for x in collect_v(sigma, &v) {
                        m.refuel();
                        if !m.holds(p, &x)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        keep.push(v);
                    }
                }
                slots.push(Slot::Outer(keep));
            } else {
                let vals = self.en.values(sigma, self.budget.base_nodes, self.budget.base_count).collect();
                slots.push(Slot::Inner(vals));
            }
        }
        Ok(slots)
    }

    /// Visits argument tuples: outer slots in diagonal order, and for each
    /// of those all inner tuples in diagonal order, up to the total budget.
    fn for_each_input<F>(&self, slots: &[Slot], mut visit: F) -> Result<(), EvalError>
    where
        F: FnMut(&[Value]) -> Result<ControlFlow<()>, EvalError>,
    {
        let mut outer_pos = Vec::new();
        let mut inner_pos = Vec::new();
        let mut outer_lens = Vec::new();
        let mut inner_lens = Vec::new();
        for (i, s) in slots.iter().enumerate() {
            match s {
                Slot::Outer(v) => {
                    outer_pos.push(i);
                    outer_lens.push(v.len());
                }
                Slot::Inner(v) => {
                    inner_pos.push(i);
                    inner_lens.push(v.len());
                }
            }
        }
        let vals = |s: &Slot, i: usize| -> Value {
            match s {
                Slot::Outer(v) | Slot::Inner(v) => v[i].clone(),
            }
        };
        let mut count = 0usize;
        let mut args: Vec<Value> = Vec::with_capacity(slots.len());
        let mut err = None;
        let _ = diagonal(&outer_lens, &mut |oi| {
            diagonal(&inner_lens, &mut |ii| {
                if count >= self.budget.total {
                    return ControlFlow::Break(());
                }
                count += 1;
                args.clear();
                let (mut o, mut n) = (0, 0);
                for (k, s) in slots.iter().enumerate() {
                    if outer_pos.get(o) == Some(&k) {
                        args.push(vals(s, oi[o]));
                        o += 1;
                    } else {
                        args.push(vals(s, ii[n]));
                        n += 1;
                    }
                }
                match visit(&args) {
                    Ok(f) => f,
                    Err(e) => {
                        err = Some(e);
                        ControlFlow::Break(())
                    }
                }
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Index tuples over `lens`, by increasing index sum, ties broken
/// lexicographically. An empty `lens` yields one empty tuple.
fn diagonal(lens: &[usize], visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
    if lens.contains(&0) {
        return ControlFlow::Continue(());
    }
    let max_sum: usize = lens.iter().map(|l| l - 1).sum();
    let mut cur = Vec::with_capacity(lens.len());
    for sum in 0..=max_sum {
        diag_rec(lens, sum, &mut cur, visit)?;
    }
    ControlFlow::Continue(())
}

fn diag_rec(
    lens: &[usize],
    remaining: usize,
    cur: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let k = cur.len();
    if k == lens.len() {
        return if remaining == 0 { visit(cur) } else { ControlFlow::Continue(()) };
    }
    let rest_max: usize = lens[k + 1..].iter().map(|l| l - 1).sum();
    let lo = remaining.saturating_sub(rest_max);
    let hi = remaining.min(lens[k] - 1);
    for i in lo..=hi {
        cur.push(i);
        let f = diag_rec(lens, remaining - i, cur, visit);
        cur.pop();
        f?;
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_order() {
        let mut seen = Vec::new();
        let _ = diagonal(&[2, 3], &mut |t| {
            seen.push(t.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![1, 2]]);
        let mut n = 0;
        let _ = diagonal(&[], &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(n, 1);
    }

    #[test]
    fn collect_v_rules() {
        let w = Value::nat(3);
        assert!(collect_v(&Type::nat(), &w).is_empty());
        let l = Value::nat_list(&[1, 2]);
        assert_eq!(collect_v(&Type::Abstract, &l), BTreeSet::from([l.clone()]));
        let pair = Value::pair(l.clone(), Value::nat(3));
        assert_eq!(collect_v(&Type::product(Type::Abstract, Type::nat()), &pair), BTreeSet::from([l]));
    }
}
