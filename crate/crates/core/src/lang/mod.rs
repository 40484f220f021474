//! The object language: types, expressions, values, type checking and a
//! fuel-bounded call-by-value evaluator.

pub mod contract;
pub mod eval;
pub mod expr;
pub mod predicate;
pub mod pretty;
pub mod program;
pub mod typeck;
pub mod types;
pub mod value;

pub use contract::{ContractState, Crossing, Direction, Relation, RelationTag};
pub use eval::{EvalError, Machine, Party, DEFAULT_FUEL};
pub use expr::{Arm, Expr, ExprKind, FnDef, Pattern, Span};
pub use predicate::Predicate;
pub use program::{AlphaPositions, Global, GlobalDef, Module, Op, Program, ProgramError, Spec};
pub use typeck::{typecheck, TypeError, TypeErrorKind};
pub use types::{AdtDecl, CtorDecl, Name, Type, TypeTable};
pub use value::{SizeOfClosure, Value};
