//! Turns a parsed file into an executable [`Program`]: resolves data types,
//! type checks every definition, checks the module against its interface
//! and compiles everything.

use std::collections::HashMap;

use super::ast::{Interface, Item, LetDecl, ParsedProgram};
use super::diagnostic::{Code, Diagnostic, Diagnostics};
use super::parser::parse_program;
use crate::lang::typeck::Ctx;
use crate::lang::{
    AdtDecl, AlphaPositions, CtorDecl, Expr, ExprKind, FnDef, Global, GlobalDef, Module, Name, Op, Program,
    Span, Spec, Type, TypeErrorKind, TypeTable,
};

#[derive(Clone, Debug, Default)]
pub struct ElabOptions {
    /// Accept operations whose types fall outside the first-order grammar.
    pub ho: bool,
    /// Check the module against this interface instead of its own
    /// declarations. Definitions not in the interface stay private.
    pub interface: Option<Interface>,
}

fn type_diag(e: crate::lang::TypeError) -> Diagnostic {
    Diagnostic::error(Code::Type(e.kind.clone()), e.span, e.kind.to_string())
}

fn resolve(types: &TypeTable, t: &Type, span: Span) -> Result<(), Diagnostic> {
    types.resolves(t).map_err(|n| {
        let kind = TypeErrorKind::UnknownType(n);
        Diagnostic::error(Code::Type(kind.clone()), span, kind.to_string())
    })
}

/// Replaces `t` by the concrete type in every annotation inside `e`.
fn concretize(e: &Expr, c: &Type) -> Expr {
    let kind = match &e.kind {
        ExprKind::Var(_) => e.kind.clone(),
        ExprKind::Ctor { name, args, tupled } => ExprKind::Ctor {
            name: name.clone(),
            args: args.iter().map(|a| concretize(a, c)).collect(),
            tupled: *tupled,
        },
        ExprKind::Lam { param, ty, body } => ExprKind::Lam {
            param: param.clone(),
            ty: ty.substitute_abstract(c),
            body: Box::new(concretize(body, c)),
        },
        ExprKind::App(a, b) => ExprKind::App(Box::new(concretize(a, c)), Box::new(concretize(b, c))),
        ExprKind::Pair(a, b) => ExprKind::Pair(Box::new(concretize(a, c)), Box::new(concretize(b, c))),
        ExprKind::Proj(i, a) => ExprKind::Proj(*i, Box::new(concretize(a, c))),
        ExprKind::Match { scrutinee, arms } => ExprKind::Match {
            scrutinee: Box::new(concretize(scrutinee, c)),
            arms: arms
                .iter()
                .map(|a| crate::lang::Arm { pattern: a.pattern.clone(), body: concretize(&a.body, c) })
                .collect(),
        },
        ExprKind::LetRec { def, body } => ExprKind::LetRec {
            def: concretize_def(def, c),
            body: Box::new(concretize(body, c)),
        },
        ExprKind::Let { name, value, body } => ExprKind::Let {
            name: name.clone(),
            value: Box::new(concretize(value, c)),
            body: Box::new(concretize(body, c)),
        },
        ExprKind::If { cond, then, els } => ExprKind::If {
            cond: Box::new(concretize(cond, c)),
            then: Box::new(concretize(then, c)),
            els: Box::new(concretize(els, c)),
        },
        ExprKind::Eq(a, b) => ExprKind::Eq(Box::new(concretize(a, c)), Box::new(concretize(b, c))),
        ExprKind::And(a, b) => ExprKind::And(Box::new(concretize(a, c)), Box::new(concretize(b, c))),
        ExprKind::Or(a, b) => ExprKind::Or(Box::new(concretize(a, c)), Box::new(concretize(b, c))),
        ExprKind::Not(a) => ExprKind::Not(Box::new(concretize(a, c))),
    };
    Expr::at(kind, e.span)
}

fn concretize_def(def: &FnDef, c: &Type) -> FnDef {
    FnDef {
        name: def.name.clone(),
        params: def.params.iter().map(|(n, t)| (n.clone(), t.substitute_abstract(c))).collect(),
        ret: def.ret.substitute_abstract(c),
        body: Box::new(concretize(&def.body, c)),
    }
}

/// Type checks one top-level definition and returns its global entry.
fn check_let(types: &TypeTable, env: &HashMap<Name, Type>, l: &LetDecl) -> Result<Global, Diagnostic> {
    let def = &l.def;
    for (_, t) in &def.params {
        resolve(types, t, l.span)?;
    }
    resolve(types, &def.ret, l.span)?;
    let mut ctx = Ctx::new(types, env);
    if l.rec {
        ctx = ctx.with_locals([(def.name.clone(), def.ty())]);
    }
    let mut ctx = ctx.with_locals(def.params.iter().cloned());
    ctx.expect(&def.body, &def.ret).map_err(type_diag)?;
    let def_kind = if def.params.is_empty() {
        GlobalDef::Const((*def.body).clone())
    } else {
        GlobalDef::Fn { def: def.clone(), rec: l.rec }
    };
    Ok(Global { name: def.name.clone(), ty: def.ty(), def: def_kind })
}

pub fn elaborate(p: &ParsedProgram, opts: &ElabOptions) -> Result<Program, Diagnostics> {
    elaborate_inner(p, opts).map_err(Diagnostics::from)
}

/// Parses and elaborates in one step.
pub fn load(src: &str, opts: &ElabOptions) -> Result<Program, Diagnostics> {
    let parsed = parse_program(src)?;
    elaborate(&parsed, opts)
}

fn elaborate_inner(p: &ParsedProgram, opts: &ElabOptions) -> Result<Program, Diagnostic> {
    // data types: declare all, then check field types
    let mut types = TypeTable::new();
    let mut user_types = Vec::new();
    for item in &p.items {
        if let Item::Type(td) = item {
            let decl = AdtDecl {
                name: td.name.clone(),
                ctors: td
                    .ctors
                    .iter()
                    .map(|(n, fields)| CtorDecl { name: n.clone(), fields: fields.clone() })
                    .collect(),
            };
            let idx = types.declare(decl).map_err(|n| {
                Diagnostic::error(Code::Duplicate, td.span, format!("`{n}` is declared more than once"))
            })?;
            user_types.push(idx);
        }
    }
    for item in &p.items {
        if let Item::Type(td) = item {
            for (_, fields) in &td.ctors {
                for f in fields {
                    resolve(&types, f, td.span)?;
                    if f.contains_abstract() {
                        return Err(Diagnostic::error(
                            Code::Syntax,
                            td.span,
                            "the abstract type `t` cannot appear in a data type declaration",
                        ));
                    }
                }
            }
        }
    }

    let mut env: HashMap<Name, Type> = HashMap::new();
    let mut globals: Vec<Global> = Vec::new();
    let declare = |env: &mut HashMap<Name, Type>, g: &Global, span: Span| {
        if env.insert(g.name.clone(), g.ty.clone()).is_some() {
            return Err(Diagnostic::error(
                Code::Duplicate,
                span,
                format!("`{}` is defined more than once", g.name),
            ));
        }
        Ok(())
    };
    for item in &p.items {
        if let Item::Let(l) = item {
            let g = check_let(&types, &env, l)?;
            declare(&mut env, &g, l.span)?;
            globals.push(g);
        }
    }
    let prelude_len = globals.len();
    let prelude_env = env.clone();

    // module
    let m = &p.module;
    let concrete = m.concrete.clone();
    resolve(&types, &concrete, m.span)?;
    if concrete.contains_abstract() || concrete.contains_arrow() {
        return Err(Diagnostic::error(
            Code::Syntax,
            m.span,
            "the concrete type must be a first-order data type",
        ));
    }
    let mut sigs: HashMap<Name, (Type, u32, Span)> = HashMap::new();
    for l in &m.lets {
        let concrete_let = LetDecl { rec: l.rec, def: concretize_def(&l.def, &concrete), span: l.span };
        let g = check_let(&types, &env, &concrete_let)?;
        declare(&mut env, &g, l.span)?;
        sigs.insert(l.def.name.clone(), (l.def.ty(), globals.len() as u32, l.span));
        globals.push(g);
    }

    let interface = opts.interface.clone().unwrap_or_else(|| Interface::of_module(m));
    let mut ops = Vec::new();
    for (name, sig) in &interface.members {
        let Some((declared, global, span)) = sigs.get(name) else {
            return Err(Diagnostic::error(
                Code::InterfaceMismatch,
                m.span,
                format!("module `{}` does not implement `{name} : {sig}`", m.name),
            ));
        };
        if declared != sig {
            return Err(Diagnostic::error(
                Code::InterfaceMismatch,
                *span,
                format!("`{name}` has type {declared} but the interface expects {sig}"),
            ));
        }
        if !opts.ho && !sig.is_first_order() {
            return Err(Diagnostic::error(
                Code::InterfaceMismatch,
                *span,
                format!("operation `{name} : {sig}` is higher-order"),
            )
            .with_hint("enable higher-order mode (--ho)"));
        }
        ops.push(Op { name: name.clone(), sig: sig.clone(), global: *global, alpha: AlphaPositions::of(sig) });
    }
    if !ops.iter().any(|op| op.alpha.result) {
        return Err(Diagnostic::error(
            Code::InterfaceMismatch,
            m.span,
            format!("module `{}` has no operation producing a value of type t", m.name),
        ));
    }

    // spec: prelude plus operations at their interface types
    let mut spec_env = prelude_env;
    for op in &ops {
        spec_env.insert(op.name.clone(), op.sig.clone());
    }
    for (_, t) in &p.spec.quantifiers {
        resolve(&types, t, p.spec.span)?;
        if t.contains_arrow() {
            return Err(Diagnostic::error(
                Code::Syntax,
                p.spec.span,
                format!("spec quantifiers range over first-order types, found {t}"),
            ));
        }
    }
    let mut ctx = Ctx::new(&types, &spec_env).with_locals(p.spec.quantifiers.iter().cloned());
    ctx.expect(&p.spec.body, &Type::bool()).map_err(|e| match &e.kind {
        TypeErrorKind::UnboundVariable(n) => Diagnostic::error(
            Code::UnboundOperation,
            e.span,
            format!("unbound operation `{n}` in spec"),
        ),
        _ => type_diag(e),
    })?;

    let module = Module { name: m.name.clone(), concrete: concrete.clone(), ops };
    let spec = Spec { quantifiers: p.spec.quantifiers.clone(), body: p.spec.body.clone() };
    Program::assemble(types, user_types, globals, prelude_len, module, spec)
        .map_err(|e| Diagnostic::error(Code::Eval, m.span, format!("while evaluating definitions: {e}")))
}

/// Parses `text` as a predicate over the module's concrete type, e.g.
/// `fun (l : list) -> lookup l 1`.
pub fn parse_predicate(program: &Program, text: &str) -> Result<crate::lang::Predicate, Diagnostic> {
    let e = super::parser::parse_expr(text, &program.types)?;
    let span = e.span;
    program.predicate(e).map_err(|err| match err {
        crate::lang::ProgramError::Type(t) => type_diag(t),
        other => Diagnostic::error(Code::Eval, span, other.to_string()),
    })
}
