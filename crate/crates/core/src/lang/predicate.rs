use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::eval::{EvalError, Machine};
use super::expr::Expr;
use super::pretty;
use super::value::Value;

/// A closed object-language function `τc -> bool` together with the
/// closure it evaluates to. Two predicates are equal when they print the
/// same.
#[derive(Clone)]
pub struct Predicate {
    inner: Arc<Inner>,
}

struct Inner {
    expr: Expr,
    closure: Value,
    size: usize,
    text: String,
}

impl Predicate {
    pub fn new(expr: Expr, closure: Value) -> Self {
        let size = expr.size();
        let text = pretty::expr(&expr);
        Predicate { inner: Arc::new(Inner { expr, closure, size, text }) }
    }

    pub fn expr(&self) -> &Expr {
        &self.inner.expr
    }

    pub fn closure(&self) -> &Value {
        &self.inner.closure
    }

    /// AST node count of the predicate's source.
    pub fn size(&self) -> usize {
        self.inner.size
    }

    pub fn text(&self) -> &str {
        &self.inner.text
    }

    pub fn test(&self, m: &mut Machine<'_>, v: &Value) -> Result<bool, EvalError> {
        m.apply_bool(self.closure(), v.clone())
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.text == other.inner.text
    }
}

impl Eq for Predicate {}

impl Hash for Predicate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.text.hash(state);
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.text)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.text)
    }
}
