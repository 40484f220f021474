//! Simple type checking for the object language.
//!
//! The checker is monomorphic. `Type::Abstract` is treated as an opaque
//! base type: it can be passed around but not matched on or compared.

use std::collections::HashMap;
use std::fmt;

use super::eval::ctor_args;
use super::expr::{Expr, ExprKind, Pattern, Span};
use super::types::{Name, Type, TypeTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeErrorKind {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(Name),
    #[error("unknown type `{0}`")]
    UnknownType(Name),
    #[error("constructor `{ctor}` expects {expected} argument(s) but was given {found}")]
    ConstructorArityMismatch { ctor: Name, expected: usize, found: usize },
    #[error("non-exhaustive match, missing {}", join(.0))]
    NonExhaustiveMatch(Vec<Name>),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: Type },
    #[error("equality is not defined at type {0}")]
    NoEquality(Type),
}

fn join(names: &[Name]) -> String {
    names.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.kind)
    }
}

impl std::error::Error for TypeError {}

fn err<T>(kind: TypeErrorKind, span: Span) -> Result<T, TypeError> {
    Err(TypeError { kind, span })
}

fn mismatch<T>(expected: impl fmt::Display, found: &Type, span: Span) -> Result<T, TypeError> {
    err(
        TypeErrorKind::TypeMismatch { expected: expected.to_string(), found: found.clone() },
        span,
    )
}

/// Typing context: the data type table, global bindings and a stack of
/// local bindings (innermost last).
pub struct Ctx<'a> {
    pub types: &'a TypeTable,
    pub globals: &'a HashMap<Name, Type>,
    locals: Vec<(Name, Type)>,
}

impl<'a> Ctx<'a> {
    pub fn new(types: &'a TypeTable, globals: &'a HashMap<Name, Type>) -> Self {
        Ctx { types, globals, locals: Vec::new() }
    }

    pub fn with_locals(mut self, locals: impl IntoIterator<Item = (Name, Type)>) -> Self {
        self.locals.extend(locals);
        self
    }

    fn lookup(&self, n: &Name) -> Option<&Type> {
        self.locals
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, t)| t)
            .or_else(|| self.globals.get(n))
    }

    pub fn check_type(&self, t: &Type, span: Span) -> Result<(), TypeError> {
        self.types
            .resolves(t)
            .or_else(|n| err(TypeErrorKind::UnknownType(n), span))
    }

    /// Checks `e` and returns its type.
    pub fn infer(&mut self, e: &Expr) -> Result<Type, TypeError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Var(n) => self
                .lookup(n)
                .cloned()
                .ok_or_else(|| TypeError { kind: TypeErrorKind::UnboundVariable(n.clone()), span }),
            ExprKind::Ctor { name, args, tupled } => {
                let (r, decl) = match self.types.ctor(name) {
                    Some(c) => c,
                    None => return err(TypeErrorKind::UnknownConstructor(name.clone()), span),
                };
                let args = ctor_args(decl.fields.len(), args, *tupled);
                if args.len() != decl.fields.len() {
                    return err(
                        TypeErrorKind::ConstructorArityMismatch {
                            ctor: name.clone(),
                            expected: decl.fields.len(),
                            found: args.len(),
                        },
                        span,
                    );
                }
                let fields = decl.fields.clone();
                for (a, f) in args.iter().zip(&fields) {
                    self.expect(a, f)?;
                }
                Ok(Type::Named(self.types.adt_at(r.adt).name.clone()))
            }
            ExprKind::Lam { param, ty, body } => {
                self.check_type(ty, span)?;
                self.locals.push((param.clone(), ty.clone()));
                let b = self.infer(body);
                self.locals.pop();
                Ok(Type::arrow(ty.clone(), b?))
            }
            ExprKind::App(f, a) => {
                let ft = self.infer(f)?;
                match ft {
                    Type::Arrow(d, c) => {
                        self.expect(a, &d)?;
                        Ok(*c)
                    }
                    other => mismatch("a function", &other, f.span),
                }
            }
            ExprKind::Pair(a, b) => Ok(Type::product(self.infer(a)?, self.infer(b)?)),
            ExprKind::Proj(i, a) => match self.infer(a)? {
                Type::Product(l, r) => Ok(if *i == 1 { *l } else { *r }),
                other => mismatch("a pair", &other, a.span),
            },
            ExprKind::Match { scrutinee, arms } => {
                let st = self.infer(scrutinee)?;
                let adt_name = match &st {
                    Type::Named(n) => n.clone(),
                    other => return mismatch("a data type", other, scrutinee.span),
                };
                let adt = self.types.adt(&adt_name).expect("resolved").clone();
                let mut covered = vec![false; adt.ctors.len()];
                let mut wildcard = false;
                let mut result: Option<Type> = None;
                for arm in arms {
                    let base = self.locals.len();
                    match &arm.pattern {
                        Pattern::Ctor { name, binds } => {
                            let (r, decl) = match self.types.ctor(name) {
                                Some(c) => c,
                                None => {
                                    return err(TypeErrorKind::UnknownConstructor(name.clone()), arm.body.span)
                                }
                            };
                            if *self.types.adt_at(r.adt).name != *adt_name {
                                return mismatch(
                                    format!("a constructor of {adt_name}"),
                                    &Type::Named(self.types.adt_at(r.adt).name.clone()),
                                    arm.body.span,
                                );
                            }
                            if binds.len() != decl.fields.len() {
                                return err(
                                    TypeErrorKind::ConstructorArityMismatch {
                                        ctor: name.clone(),
                                        expected: decl.fields.len(),
                                        found: binds.len(),
                                    },
                                    arm.body.span,
                                );
                            }
                            covered[r.tag as usize] = true;
                            let fields = decl.fields.clone();
                            self.locals.extend(binds.iter().cloned().zip(fields));
                        }
                        Pattern::Wildcard => wildcard = true,
                    }
                    let t = self.infer(&arm.body);
                    self.locals.truncate(base);
                    let t = t?;
                    match &result {
                        None => result = Some(t),
                        Some(r) if *r == t => {}
                        Some(r) => return mismatch(r, &t, arm.body.span),
                    }
                }
                if !wildcard {
                    let missing: Vec<Name> = adt
                        .ctors
                        .iter()
                        .zip(&covered)
                        .filter(|(_, c)| !**c)
                        .map(|(c, _)| c.name.clone())
                        .collect();
                    if !missing.is_empty() {
                        return err(TypeErrorKind::NonExhaustiveMatch(missing), span);
                    }
                }
                result.ok_or_else(|| TypeError {
                    kind: TypeErrorKind::NonExhaustiveMatch(adt.ctors.iter().map(|c| c.name.clone()).collect()),
                    span,
                })
            }
            ExprKind::LetRec { def, body } => {
                for (_, t) in &def.params {
                    self.check_type(t, span)?;
                }
                self.check_type(&def.ret, span)?;
                let base = self.locals.len();
                self.locals.push((def.name.clone(), def.ty()));
                self.locals.extend(def.params.iter().cloned());
                let r = self.expect(&def.body, &def.ret);
                self.locals.truncate(base + 1);
                let b = r.and_then(|_| self.infer(body));
                self.locals.truncate(base);
                b
            }
            ExprKind::Let { name, value, body } => {
                let vt = self.infer(value)?;
                self.locals.push((name.clone(), vt));
                let b = self.infer(body);
                self.locals.pop();
                b
            }
            ExprKind::If { cond, then, els } => {
                self.expect(cond, &Type::bool())?;
                let t = self.infer(then)?;
                self.expect(els, &t)?;
                Ok(t)
            }
            ExprKind::Eq(a, b) => {
                let t = self.infer(a)?;
                if t.contains_arrow() || t.contains_abstract() {
                    return err(TypeErrorKind::NoEquality(t), span);
                }
                self.expect(b, &t)?;
                Ok(Type::bool())
            }
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                self.expect(a, &Type::bool())?;
                self.expect(b, &Type::bool())?;
                Ok(Type::bool())
            }
            ExprKind::Not(a) => {
                self.expect(a, &Type::bool())?;
                Ok(Type::bool())
            }
        }
    }

    pub fn expect(&mut self, e: &Expr, t: &Type) -> Result<(), TypeError> {
        let found = self.infer(e)?;
        if found == *t {
            Ok(())
        } else {
            mismatch(t, &found, e.span)
        }
    }
}

/// Checks a closed expression against an empty local context.
pub fn typecheck(types: &TypeTable, globals: &HashMap<Name, Type>, e: &Expr) -> Result<Type, TypeError> {
    Ctx::new(types, globals).infer(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::expr::{Arm, FnDef};

    fn list_table() -> TypeTable {
        let mut tt = TypeTable::new();
        tt.declare(crate::lang::types::AdtDecl {
            name: "list".into(),
            ctors: vec![
                crate::lang::types::CtorDecl { name: "Nil".into(), fields: vec![] },
                crate::lang::types::CtorDecl {
                    name: "Cons".into(),
                    fields: vec![Type::nat(), Type::named("list")],
                },
            ],
        })
        .unwrap();
        tt
    }

    #[test]
    fn identity_has_arrow_type() {
        let tt = TypeTable::new();
        let e = Expr::lam("x", Type::nat(), Expr::var("x"));
        assert_eq!(typecheck(&tt, &HashMap::new(), &e), Ok(Type::arrow(Type::nat(), Type::nat())));
    }

    #[test]
    fn projection_of_constructor_is_rejected() {
        let tt = list_table();
        let e = Expr::new(ExprKind::Proj(1, Box::new(Expr::ctor("Nil", vec![]))));
        let got = typecheck(&tt, &HashMap::new(), &e).unwrap_err();
        assert!(matches!(got.kind, TypeErrorKind::TypeMismatch { .. }), "{got}");
    }

    #[test]
    fn missing_arm_is_reported() {
        let tt = list_table();
        let m = Expr::new(ExprKind::Match {
            scrutinee: Box::new(Expr::var("l")),
            arms: vec![Arm {
                pattern: Pattern::Ctor { name: "Nil".into(), binds: vec![] },
                body: Expr::bool_lit(true),
            }],
        });
        let e = Expr::lam("l", Type::named("list"), m);
        let got = typecheck(&tt, &HashMap::new(), &e).unwrap_err();
        assert_eq!(got.kind, TypeErrorKind::NonExhaustiveMatch(vec!["Cons".into()]));
    }

    #[test]
    fn arity_and_unbound() {
        let tt = list_table();
        let e = Expr::ctor("Cons", vec![Expr::nat_lit(1)]);
        assert!(matches!(
            typecheck(&tt, &HashMap::new(), &e).unwrap_err().kind,
            TypeErrorKind::ConstructorArityMismatch { expected: 2, found: 1, .. }
        ));
        assert_eq!(
            typecheck(&tt, &HashMap::new(), &Expr::var("y")).unwrap_err().kind,
            TypeErrorKind::UnboundVariable("y".into())
        );
    }

    #[test]
    fn recursive_definition() {
        let tt = list_table();
        let list = Type::named("list");
        // let rec len (l : list) : nat = match l with Nil -> 0 | Cons (h, t) -> S (len t) in len
        let body = Expr::new(ExprKind::Match {
            scrutinee: Box::new(Expr::var("l")),
            arms: vec![
                Arm { pattern: Pattern::Ctor { name: "Nil".into(), binds: vec![] }, body: Expr::nat_lit(0) },
                Arm {
                    pattern: Pattern::Ctor { name: "Cons".into(), binds: vec!["h".into(), "t".into()] },
                    body: Expr::ctor("S", vec![Expr::app(Expr::var("len"), Expr::var("t"))]),
                },
            ],
        });
        let def = FnDef { name: "len".into(), params: vec![("l".into(), list.clone())], ret: Type::nat(), body: Box::new(body) };
        let e = Expr::new(ExprKind::LetRec { def, body: Box::new(Expr::var("len")) });
        assert_eq!(typecheck(&tt, &HashMap::new(), &e), Ok(Type::arrow(list, Type::nat())));
    }

    #[test]
    fn equality_on_functions_is_rejected() {
        let tt = TypeTable::new();
        let id = Expr::lam("x", Type::nat(), Expr::var("x"));
        let got = typecheck(&tt, &HashMap::new(), &Expr::eq(id.clone(), id)).unwrap_err();
        assert!(matches!(got.kind, TypeErrorKind::NoEquality(_)));
    }
}
