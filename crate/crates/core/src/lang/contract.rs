//! State for higher-order contract monitoring. The machine consults the
//! installed [`ContractState`] whenever an abstract-typed value crosses a
//! monitored boundary.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::predicate::Predicate;
use super::value::Value;

/// The P or Q of a conditional-inductiveness check: either membership in a
/// finite set of concrete values or a predicate run by the evaluator.
#[derive(Clone)]
pub enum Relation {
    Set(Arc<BTreeSet<Value>>),
    Pred(Predicate),
}

impl Relation {
    pub fn set(values: impl IntoIterator<Item = Value>) -> Relation {
        Relation::Set(Arc::new(values.into_iter().collect()))
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Relation::Set(s) => Some(s),
            Relation::Pred(_) => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Set(s) => {
                write!(f, "{{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
            Relation::Pred(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ClientToModule,
    ModuleToClient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationTag {
    P,
    Q,
}

/// One logged boundary crossing.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub direction: Direction,
    pub value: Value,
    pub relation: RelationTag,
    pub verdict: bool,
}

/// The relations being enforced plus the append-only crossing log.
#[derive(Debug, Clone)]
pub struct ContractState {
    pub p: Relation,
    pub q: Relation,
    pub log: Vec<Crossing>,
}

impl ContractState {
    pub fn new(p: Relation, q: Relation) -> Self {
        ContractState { p, q, log: Vec::new() }
    }
}
