//! Call-by-value evaluation over a de Bruijn-indexed form of [`Expr`].
//!
//! Surface expressions are compiled once against a global table (prelude
//! functions and module operations) and then run on a [`Machine`] with a
//! step budget. Every application and every match consumes one unit of
//! fuel.

use std::collections::HashMap;
use std::sync::Arc;

use super::contract::{ContractState, Crossing, Direction, Relation, RelationTag};
use super::expr::{Expr, ExprKind, Pattern};
use super::types::{Name, Type, TypeTable};
use super::value::{Closure, Monitored, Value};

pub const DEFAULT_FUEL: u64 = 100_000;
const MAX_DEPTH: u32 = 20_000;

#[derive(Debug)]
pub enum Code {
    Local(u32),
    Global(u32),
    Ctor { name: Name, tag: u32, args: Vec<Code> },
    Lam(Arc<Code>),
    /// A recursive function literal; its body sees the argument at index 0
    /// and the function itself at index 1.
    RecLam(Arc<Code>),
    App(Box<Code>, Box<Code>),
    Pair(Box<Code>, Box<Code>),
    Proj(u8, Box<Code>),
    /// `table` maps constructor tags to arm indices; `default` is the first
    /// wildcard arm, if any.
    Match { scrutinee: Box<Code>, arms: Vec<ArmCode>, table: Vec<u32>, default: u32 },
    Let(Box<Code>, Box<Code>),
    If(Box<Code>, Box<Code>, Box<Code>),
    Eq(Box<Code>, Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Not(Box<Code>),
}

#[derive(Debug)]
pub struct ArmCode {
    /// Number of constructor fields pushed onto the environment.
    pub binds: u32,
    pub body: Code,
}

const NO_ARM: u32 = u32::MAX;

/// Persistent environment of local values, innermost binding first.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<EnvNode>>);

struct EnvNode {
    value: Value,
    next: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn push(&self, value: Value) -> Env {
        Env(Some(Arc::new(EnvNode { value, next: self.clone() })))
    }

    fn get(&self, mut index: u32) -> Option<&Value> {
        let mut cur = self.0.as_deref()?;
        while index > 0 {
            cur = cur.next.0.as_deref()?;
            index -= 1;
        }
        Some(&cur.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    /// The client supplied an abstract value outside P.
    Client,
    /// The module produced an abstract value outside Q.
    Module,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation ran out of fuel after {0} steps (possible divergence)")]
    FuelExhausted(u64),
    #[error("evaluation exceeded the maximum call depth of {0}")]
    StackExhausted(u32),
    #[error("no match arm for constructor {0}")]
    MatchFailure(Name),
    #[error("equality is not defined on functions")]
    ClosureEquality,
    #[error("runtime type confusion: {0}")]
    TypeConfusion(&'static str),
    #[error("unbound identifier `{0}` at compile time")]
    Unbound(Name),
    #[error("unknown constructor `{0}`")]
    UnknownCtor(Name),
    #[error("contract violated by the {0:?}")]
    Blame(Party),
}

/// Resolves names and constructor tags.
pub struct Compiler<'a> {
    pub types: &'a TypeTable,
    pub globals: &'a HashMap<Name, u32>,
}

/// Arguments of a constructor application after accounting for a single
/// product-typed field written as a tuple.
pub fn ctor_args(arity: usize, args: &[Expr], tupled: bool) -> Vec<Expr> {
    if arity == 1 && args.len() > 1 && tupled {
        let mut it = args.iter().rev();
        let last = it.next().cloned().expect("nonempty");
        let pair = it.fold(last, |acc, e| {
            Expr::at(ExprKind::Pair(Box::new(e.clone()), Box::new(acc)), e.span)
        });
        vec![pair]
    } else {
        args.to_vec()
    }
}

impl<'a> Compiler<'a> {
    pub fn new(types: &'a TypeTable, globals: &'a HashMap<Name, u32>) -> Self {
        Compiler { types, globals }
    }

    pub fn compile(&self, e: &Expr) -> Result<Code, EvalError> {
        self.go(e, &mut Vec::new())
    }

    /// Compiles a function with curried parameters. When `self_name` is set
    /// the function is recursive and can refer to itself by that name.
    pub fn compile_fn(
        &self,
        self_name: Option<&Name>,
        params: &[Name],
        body: &Expr,
        scope: &mut Vec<Name>,
    ) -> Result<Code, EvalError> {
        let base = scope.len();
        let mut layers = Vec::new();
        for (i, p) in params.iter().enumerate() {
            if i == 0 {
                if let Some(f) = self_name {
                    scope.push(f.clone());
                    layers.push(true);
                } else {
                    layers.push(false);
                }
            } else {
                layers.push(false);
            }
            scope.push(p.clone());
        }
        let mut code = self.go(body, scope)?;
        scope.truncate(base);
        for rec in layers.into_iter().rev() {
            code = if rec { Code::RecLam(Arc::new(code)) } else { Code::Lam(Arc::new(code)) };
        }
        Ok(code)
    }

    fn go(&self, e: &Expr, scope: &mut Vec<Name>) -> Result<Code, EvalError> {
        Ok(match &e.kind {
            ExprKind::Var(n) => {
                if let Some(pos) = scope.iter().rposition(|s| s == n) {
                    Code::Local((scope.len() - 1 - pos) as u32)
                } else if let Some(&g) = self.globals.get(n) {
                    Code::Global(g)
                } else {
                    return Err(EvalError::Unbound(n.clone()));
                }
            }
            ExprKind::Ctor { name, args, tupled } => {
                let (r, decl) = self
                    .types
                    .ctor(name)
                    .ok_or_else(|| EvalError::UnknownCtor(name.clone()))?;
                let args = ctor_args(decl.fields.len(), args, *tupled);
                Code::Ctor {
                    name: decl.name.clone(),
                    tag: r.tag,
                    args: args.iter().map(|a| self.go(a, scope)).collect::<Result<_, _>>()?,
                }
            }
            ExprKind::Lam { param, body, .. } => {
                scope.push(param.clone());
                let b = self.go(body, scope);
                scope.pop();
                Code::Lam(Arc::new(b?))
            }
            ExprKind::App(f, a) => Code::App(Box::new(self.go(f, scope)?), Box::new(self.go(a, scope)?)),
            ExprKind::Pair(a, b) => Code::Pair(Box::new(self.go(a, scope)?), Box::new(self.go(b, scope)?)),
            ExprKind::Proj(i, a) => Code::Proj(*i, Box::new(self.go(a, scope)?)),
            ExprKind::Match { scrutinee, arms } => {
                let scrut = self.go(scrutinee, scope)?;
                let mut table: Vec<u32> = Vec::new();
                let mut default = NO_ARM;
                let mut codes = Vec::with_capacity(arms.len());
                for (i, arm) in arms.iter().enumerate() {
                    match &arm.pattern {
                        Pattern::Ctor { name, binds } => {
                            let (r, _) = self
                                .types
                                .ctor(name)
                                .ok_or_else(|| EvalError::UnknownCtor(name.clone()))?;
                            let tag = r.tag as usize;
                            if table.len() <= tag {
                                table.resize(tag + 1, NO_ARM);
                            }
                            if table[tag] == NO_ARM && default == NO_ARM {
                                table[tag] = i as u32;
                            }
                            let base = scope.len();
                            scope.extend(binds.iter().cloned());
                            let body = self.go(&arm.body, scope);
                            scope.truncate(base);
                            codes.push(ArmCode { binds: binds.len() as u32, body: body? });
                        }
                        Pattern::Wildcard => {
                            let body = self.go(&arm.body, scope)?;
                            codes.push(ArmCode { binds: 0, body });
                            if default == NO_ARM {
                                default = i as u32;
                            }
                        }
                    }
                }
                Code::Match { scrutinee: Box::new(scrut), arms: codes, table, default }
            }
            ExprKind::LetRec { def, body } => {
                let params: Vec<Name> = def.params.iter().map(|(n, _)| n.clone()).collect();
                let f = self.compile_fn(Some(&def.name), &params, &def.body, scope)?;
                scope.push(def.name.clone());
                let b = self.go(body, scope);
                scope.pop();
                Code::Let(Box::new(f), Box::new(b?))
            }
            ExprKind::Let { name, value, body } => {
                let v = self.go(value, scope)?;
                scope.push(name.clone());
                let b = self.go(body, scope);
                scope.pop();
                Code::Let(Box::new(v), Box::new(b?))
            }
            ExprKind::If { cond, then, els } => Code::If(
                Box::new(self.go(cond, scope)?),
                Box::new(self.go(then, scope)?),
                Box::new(self.go(els, scope)?),
            ),
            ExprKind::Eq(a, b) => Code::Eq(Box::new(self.go(a, scope)?), Box::new(self.go(b, scope)?)),
            ExprKind::And(a, b) => Code::And(Box::new(self.go(a, scope)?), Box::new(self.go(b, scope)?)),
            ExprKind::Or(a, b) => Code::Or(Box::new(self.go(a, scope)?), Box::new(self.go(b, scope)?)),
            ExprKind::Not(a) => Code::Not(Box::new(self.go(a, scope)?)),
        })
    }
}

fn select_arm(table: &[u32], default: u32, tag: u32) -> Option<usize> {
    match table.get(tag as usize) {
        Some(&slot) if slot != NO_ARM => Some(slot as usize),
        _ if default != NO_ARM => Some(default as usize),
        _ => None,
    }
}

/// An evaluator with a step budget and an optional contract monitor.
pub struct Machine<'g> {
    globals: &'g [Value],
    fuel: u64,
    budget: u64,
    depth: u32,
    contract: Option<Box<ContractState>>,
}

impl<'g> Machine<'g> {
    pub fn new(globals: &'g [Value], fuel: u64) -> Self {
        Machine { globals, fuel, budget: fuel, depth: 0, contract: None }
    }

    pub fn with_contract(globals: &'g [Value], fuel: u64, state: ContractState) -> Self {
        Machine { globals, fuel, budget: fuel, depth: 0, contract: Some(Box::new(state)) }
    }

    pub fn take_contract(&mut self) -> Option<ContractState> {
        self.contract.take().map(|b| *b)
    }

    pub fn contract(&self) -> Option<&ContractState> {
        self.contract.as_deref()
    }

    pub fn remaining_fuel(&self) -> u64 {
        self.fuel
    }

    /// Restores the full step budget; used between independent top-level
    /// evaluations that share a machine.
    pub fn refuel(&mut self) {
        self.fuel = self.budget;
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted(self.budget));
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval(&mut self, code: &Code, env: &Env) -> Result<Value, EvalError> {
        match code {
            Code::Local(i) => env
                .get(*i)
                .cloned()
                .ok_or(EvalError::TypeConfusion("unbound local")),
            Code::Global(g) => self
                .globals
                .get(*g as usize)
                .cloned()
                .ok_or(EvalError::TypeConfusion("global used before definition")),
            Code::Ctor { name, tag, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env)?);
                }
                Ok(Value::ctor(name.clone(), *tag, vals))
            }
            Code::Lam(body) => Ok(Value::Closure(Arc::new(Closure {
                body: body.clone(),
                env: env.clone(),
                recursive: false,
                source: None,
            }))),
            Code::RecLam(body) => Ok(Value::Closure(Arc::new(Closure {
                body: body.clone(),
                env: env.clone(),
                recursive: true,
                source: None,
            }))),
            Code::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)
            }
            Code::Pair(a, b) => {
                let l = self.eval(a, env)?;
                let r = self.eval(b, env)?;
                Ok(Value::pair(l, r))
            }
            Code::Proj(i, a) => match self.eval(a, env)? {
                Value::Pair(p) => Ok(if *i == 1 { p.left.clone() } else { p.right.clone() }),
                _ => Err(EvalError::TypeConfusion("projection of a non-pair")),
            },
            Code::Match { scrutinee, arms, table, default } => {
                self.tick()?;
                let v = self.eval(scrutinee, env)?;
                let c = match &v {
                    Value::Ctor(c) => c,
                    _ => return Err(EvalError::TypeConfusion("match on a non-constructor")),
                };
                let arm = select_arm(table, *default, c.tag).ok_or_else(|| EvalError::MatchFailure(c.name.clone()))?;
                let arm = &arms[arm];
                if arm.binds == 0 {
                    self.eval(&arm.body, env)
                } else {
                    let mut e = env.clone();
                    for f in &c.args {
                        e = e.push(f.clone());
                    }
                    self.eval(&arm.body, &e)
                }
            }
            Code::Let(v, body) => {
                let x = self.eval(v, env)?;
                self.eval(body, &env.push(x))
            }
            Code::If(c, t, e) => {
                if self.eval_bool(c, env)? {
                    self.eval(t, env)
                } else {
                    self.eval(e, env)
                }
            }
            Code::Eq(a, b) => {
                let x = self.eval(a, env)?;
                let y = self.eval(b, env)?;
                x.structural_eq(&y)
                    .map(Value::bool)
                    .ok_or(EvalError::ClosureEquality)
            }
            Code::And(a, b) => {
                if self.eval_bool(a, env)? {
                    self.eval(b, env)
                } else {
                    Ok(Value::bool(false))
                }
            }
            Code::Or(a, b) => {
                if self.eval_bool(a, env)? {
                    Ok(Value::bool(true))
                } else {
                    self.eval(b, env)
                }
            }
            Code::Not(a) => Ok(Value::bool(!self.eval_bool(a, env)?)),
        }
    }

    fn eval_bool(&mut self, code: &Code, env: &Env) -> Result<bool, EvalError> {
        self.eval(code, env)?
            .as_bool()
            .ok_or(EvalError::TypeConfusion("expected a boolean"))
    }

    pub fn apply(&mut self, f: &Value, arg: Value) -> Result<Value, EvalError> {
        match f {
            Value::Closure(c) => {
                self.tick()?;
                if self.depth >= MAX_DEPTH {
                    return Err(EvalError::StackExhausted(MAX_DEPTH));
                }
                let env = if c.recursive {
                    c.env.push(f.clone()).push(arg)
                } else {
                    c.env.push(arg)
                };
                self.depth += 1;
                let r = self.eval(&c.body, &env);
                self.depth -= 1;
                r
            }
            Value::Monitored(m) => {
                let a = self.guard(arg, &m.domain, !m.positive)?;
                let r = self.apply(&m.inner, a)?;
                self.guard(r, &m.codomain, m.positive)
            }
            _ => Err(EvalError::TypeConfusion("application of a non-function")),
        }
    }

    pub fn apply_all(&mut self, f: &Value, args: impl IntoIterator<Item = Value>) -> Result<Value, EvalError> {
        let mut cur = f.clone();
        for a in args {
            cur = self.apply(&cur, a)?;
        }
        Ok(cur)
    }

    pub fn apply_bool(&mut self, f: &Value, arg: Value) -> Result<bool, EvalError> {
        self.apply(f, arg)?
            .as_bool()
            .ok_or(EvalError::TypeConfusion("predicate returned a non-boolean"))
    }

    /// Wraps `v` in the contract for `ty`. Positive positions are values the
    /// module hands to the client; negative positions flow the other way.
    pub fn guard(&mut self, v: Value, ty: &Type, positive: bool) -> Result<Value, EvalError> {
        if !ty.contains_abstract() {
            return Ok(v);
        }
        match ty {
            Type::Abstract => {
                self.cross(&v, positive)?;
                Ok(v)
            }
            Type::Product(a, b) => match &v {
                Value::Pair(p) => {
                    let l = self.guard(p.left.clone(), a, positive)?;
                    let r = self.guard(p.right.clone(), b, positive)?;
                    Ok(Value::pair(l, r))
                }
                _ => Err(EvalError::TypeConfusion("expected a pair at a product type")),
            },
            Type::Arrow(d, c) => Ok(Value::Monitored(Arc::new(Monitored {
                inner: v,
                domain: (**d).clone(),
                codomain: (**c).clone(),
                positive,
            }))),
            Type::Named(_) => Ok(v),
        }
    }

    fn cross(&mut self, v: &Value, positive: bool) -> Result<(), EvalError> {
        let Some(state) = self.contract.take() else {
            return Ok(());
        };
        let rel = if positive { &state.q } else { &state.p };
        let verdict = self.holds(rel, v);
        let mut state = state;
        let verdict = match verdict {
            Ok(b) => b,
            Err(e) => {
                self.contract = Some(state);
                return Err(e);
            }
        };
        state.log.push(Crossing {
            direction: if positive { Direction::ModuleToClient } else { Direction::ClientToModule },
            value: v.clone(),
            relation: if positive { RelationTag::Q } else { RelationTag::P },
            verdict,
        });
        self.contract = Some(state);
        if verdict {
            Ok(())
        } else {
            Err(EvalError::Blame(if positive { Party::Module } else { Party::Client }))
        }
    }

    /// Decides membership of `v` in a relation.
    pub fn holds(&mut self, rel: &Relation, v: &Value) -> Result<bool, EvalError> {
        match rel {
            Relation::Set(s) => Ok(s.contains(v)),
            Relation::Pred(p) => self.apply_bool(p.closure(), v.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::types::Type;

    fn run(e: &Expr) -> Result<Value, EvalError> {
        let types = TypeTable::new();
        let globals = HashMap::new();
        let code = Compiler::new(&types, &globals).compile(e)?;
        Machine::new(&[], 10).eval(&code, &Env::empty())
    }

    #[test]
    fn identity_application() {
        let id = Expr::lam("x", Type::nat(), Expr::var("x"));
        let v = run(&Expr::app(id, Expr::nat_lit(2))).unwrap();
        assert_eq!(v, Value::nat(2));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        // (let rec f (x : nat) : nat = f x in f) 0
        let def = crate::lang::expr::FnDef {
            name: "f".into(),
            params: vec![("x".into(), Type::nat())],
            ret: Type::nat(),
            body: Box::new(Expr::app(Expr::var("f"), Expr::var("x"))),
        };
        let e = Expr::app(
            Expr::new(ExprKind::LetRec { def, body: Box::new(Expr::var("f")) }),
            Expr::nat_lit(0),
        );
        assert_eq!(run(&e), Err(EvalError::FuelExhausted(10)));
    }

    #[test]
    fn closure_equality_is_an_error() {
        let id = Expr::lam("x", Type::nat(), Expr::var("x"));
        assert_eq!(run(&Expr::eq(id.clone(), id)), Err(EvalError::ClosureEquality));
    }
}
