//! An exhaustive synthesizer for finite concrete types: it always returns
//! the weakest separator, membership in the complement of the negatives.

use super::enumerative::value_expr;
use super::{ExampleSet, SynthResult, Synthesizer};
use crate::lang::{Expr, Program};

#[derive(Clone, Copy, Debug, Default)]
pub struct TableSynth;

impl Synthesizer for TableSynth {
    fn synthesize(&self, program: &Program, ex: &ExampleSet) -> SynthResult {
        if !ex.is_disjoint() {
            return SynthResult::Failure("positive and negative examples overlap".into());
        }
        let x = Expr::var("x");
        let body = ex
            .neg
            .iter()
            .rev()
            .map(|v| Expr::eq(x.clone(), value_expr(v)))
            .reduce(|acc, e| Expr::or(e, acc))
            .map_or_else(|| Expr::bool_lit(true), Expr::not);
        let e = Expr::lam("x", program.concrete().clone(), body);
        match program.predicate(e) {
            Ok(p) => SynthResult::Success(vec![p]),
            Err(err) => SynthResult::Failure(err.to_string()),
        }
    }
}
