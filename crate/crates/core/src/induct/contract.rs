//! Checking operations by running them under contracts, so that values
//! handed to and returned by client functions are checked as they cross.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::{Call, Cex, CexReport, Checker, Rule};
use crate::lang::{
    ContractState, Direction, EvalError, Machine, Op, Party, Relation, RelationTag, Type, Value,
};

/// `v` wrapped in the contract for `ty`, as seen by a client: abstract
/// inputs are checked against P and abstract outputs against Q.
pub fn wrap_contract(m: &mut Machine<'_>, v: Value, ty: &Type) -> Result<Value, EvalError> {
    m.guard(v, ty, true)
}

/// Renders the contract enforced for an operation type, e.g.
/// `(any_nat -> Q -> P) -> P -> P -> Q` for a fold.
pub fn contract_display(ty: &Type) -> String {
    fn go(ty: &Type, positive: bool, out: &mut String) {
        match ty {
            Type::Abstract => out.push(if positive { 'Q' } else { 'P' }),
            Type::Named(n) => {
                out.push_str("any_");
                out.push_str(n);
            }
            _ if !ty.contains_abstract() => out.push_str("any"),
            Type::Product(a, b) => {
                out.push('(');
                go(a, positive, out);
                out.push_str(" * ");
                go(b, positive, out);
                out.push(')');
            }
            Type::Arrow(d, c) => {
                if matches!(**d, Type::Arrow(..)) && d.contains_abstract() {
                    out.push('(');
                    go(d, !positive, out);
                    out.push(')');
                } else {
                    go(d, !positive, out);
                }
                out.push_str(" -> ");
                go(c, positive, out);
            }
        }
    }
    let mut out = String::new();
    go(ty, true, &mut out);
    out
}

impl Checker<'_> {
    pub(super) fn check_op_contract(&self, op: &Op, p: &Relation, q: &Relation) -> Result<CexReport, EvalError> {
        let raw = self.program.op_value(op).clone();
        let (params, _) = op.sig.uncurry();
        let params: Vec<Type> = params.into_iter().cloned().collect();
        let slots = self.slots(&params, p)?;
        let mut found = None;
        let run = |args: &[Value]| -> Result<ControlFlow<()>, EvalError> {
            let state = ContractState::new(p.clone(), q.clone());
            let mut m = Machine::with_contract(&self.program.values, self.program.fuel, state);
            let outcome = wrap_contract(&mut m, raw.clone(), &op.sig)
                .and_then(|f| m.apply_all(&f, args.iter().cloned()));
            let log = m.take_contract().map(|s| s.log).unwrap_or_default();
            match outcome {
                Ok(_) | Err(EvalError::Blame(Party::Client)) => Ok(ControlFlow::Continue(())),
                Err(EvalError::Blame(Party::Module)) => {
                    let last = log.last().expect("module blame without a logged crossing");
                    debug_assert!(last.relation == RelationTag::Q && !last.verdict);
                    let s: BTreeSet<Value> = log
                        .iter()
                        .filter(|c| c.direction == Direction::ClientToModule && c.verdict)
                        .map(|c| c.value.clone())
                        .collect();
                    found = Some(Cex {
                        s,
                        v: BTreeSet::from([last.value.clone()]),
                        rule: Rule::ContractCex,
                        call: Some(Call { op: op.name.clone(), args: args.to_vec() }),
                        log,
                    });
                    Ok(ControlFlow::Break(()))
                }
                Err(e) => Err(e),
            }
        };
        self.for_each_input(&slots, run)?;
        Ok(match found {
            Some(c) => CexReport::Counterexample(c),
            None => CexReport::Valid,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Type {
        Type::Abstract
    }

    #[test]
    fn contract_rendering() {
        let fold = Type::arrow(
            Type::arrow(Type::nat(), Type::arrow(t(), t())),
            Type::arrow(t(), Type::arrow(t(), t())),
        );
        assert_eq!(contract_display(&fold), "(any_nat -> Q -> P) -> P -> P -> Q");
        let insert = Type::arrow(t(), Type::arrow(Type::nat(), t()));
        assert_eq!(contract_display(&insert), "P -> any_nat -> Q");
        let map = Type::arrow(Type::arrow(Type::nat(), Type::nat()), Type::arrow(t(), t()));
        assert_eq!(contract_display(&map), "any -> P -> Q");
    }
}
