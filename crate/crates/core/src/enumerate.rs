//! Size-ordered enumeration of closed values, and of small functions for
//! higher-order arguments.
//!
//! Values come out in [`Value`]'s total order: by node count, then
//! constructor declaration index, then children left to right.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::lang::eval::{Compiler, Env};
use crate::lang::value::Closure;
use crate::lang::{pretty, Arm, Expr, ExprKind, FnDef, Machine, Name, Pattern, Type, TypeTable, Value};

/// Memoized size classes for one type table. Cheap to create; share one per
/// inference run so classes are built once.
pub struct Enumerator<'t> {
    types: &'t TypeTable,
    min_sizes: Vec<Option<usize>>,
    classes: RefCell<HashMap<(Type, usize), Arc<Vec<Value>>>>,
}

type Tuples<'a> = Box<dyn Iterator<Item = Vec<Value>> + 'a>;

impl<'t> Enumerator<'t> {
    pub fn new(types: &'t TypeTable) -> Self {
        Enumerator { types, min_sizes: types.adt_min_sizes(), classes: RefCell::new(HashMap::new()) }
    }

    pub fn types(&self) -> &'t TypeTable {
        self.types
    }

    fn min_size(&self, t: &Type) -> Option<usize> {
        match t {
            Type::Named(n) => {
                let idx = self.types.adts().iter().position(|a| &a.name == n)?;
                self.min_sizes[idx]
            }
            Type::Product(a, b) => Some(1 + self.min_size(a)? + self.min_size(b)?),
            Type::Abstract | Type::Arrow(..) => None,
        }
    }

    /// All values of `t` with exactly `size` nodes, in order.
    pub fn class(&self, t: &Type, size: usize) -> Arc<Vec<Value>> {
        let key = (t.clone(), size);
        if let Some(c) = self.classes.borrow().get(&key) {
            return c.clone();
        }
        let vals: Vec<Value> = self.class_iter(t, size).collect();
        let vals = Arc::new(vals);
        self.classes.borrow_mut().insert(key, vals.clone());
        vals
    }

    fn class_iter<'a>(&'a self, t: &Type, size: usize) -> Box<dyn Iterator<Item = Value> + 'a> {
        if size == 0 || self.min_size(t).is_none_or(|m| m > size) {
            return Box::new(std::iter::empty());
        }
        match t {
            Type::Named(n) => {
                let Some(adt) = self.types.adt(n) else { return Box::new(std::iter::empty()) };
                let ctors: Vec<(Name, u32, Vec<Type>)> = adt
                    .ctors
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.name.clone(), i as u32, c.fields.clone()))
                    .collect();
                Box::new(ctors.into_iter().flat_map(move |(name, tag, fields)| {
                    let it: Box<dyn Iterator<Item = Value> + 'a> = if fields.is_empty() {
                        if size == 1 {
                            Box::new(std::iter::once(Value::ctor(name, tag, vec![])))
                        } else {
                            Box::new(std::iter::empty())
                        }
                    } else {
                        Box::new(
                            self.tuples(Arc::new(fields), 0, size - 1)
                                .map(move |args| Value::ctor(name.clone(), tag, args)),
                        )
                    };
                    it
                }))
            }
            Type::Product(a, b) => {
                let fields = Arc::new(vec![(**a).clone(), (**b).clone()]);
                Box::new(self.tuples(fields, 0, size - 1).map(|mut v| {
                    let r = v.pop().expect("two fields");
                    let l = v.pop().expect("two fields");
                    Value::pair(l, r)
                }))
            }
            Type::Abstract | Type::Arrow(..) => Box::new(std::iter::empty()),
        }
    }

    /// Tuples for `fields[from..]` whose sizes sum to `total`, ordered by
    /// the first field's size, then its value, then the rest.
    fn tuples<'a>(&'a self, fields: Arc<Vec<Type>>, from: usize, total: usize) -> Tuples<'a> {
        let rest_min: Option<usize> = fields[from + 1..].iter().map(|f| self.min_size(f)).sum();
        let (Some(first_min), Some(rest_min)) = (self.min_size(&fields[from]), rest_min) else {
            return Box::new(std::iter::empty());
        };
        if from + 1 == fields.len() {
            let class = self.class(&fields[from], total);
            return Box::new((0..class.len()).map(move |i| vec![class[i].clone()]));
        }
        if first_min + rest_min > total {
            return Box::new(std::iter::empty());
        }
        Box::new((first_min..=total - rest_min).flat_map(move |s| {
            let class = self.class(&fields[from], s);
            let fields = fields.clone();
            (0..class.len()).flat_map(move |i| {
                let head = class[i].clone();
                self.tuples(fields.clone(), from + 1, total - s).map(move |mut rest| {
                    rest.insert(0, head.clone());
                    rest
                })
            })
        }))
    }

    /// Values of `t` with at most `max_nodes` nodes, at most `max_count` of
    /// them, smallest first.
    pub fn values<'a>(&'a self, t: &Type, max_nodes: usize, max_count: usize) -> ValueStream<'a> {
        let t = t.clone();
        let inner = (1..=max_nodes).flat_map(move |s| self.class_iter(&t, s));
        ValueStream { inner: Box::new(inner.take(max_count)) }
    }
}

/// A deterministic, duplicate-free stream of values in nondecreasing size.
pub struct ValueStream<'a> {
    inner: Box<dyn Iterator<Item = Value> + 'a>,
}

impl Iterator for ValueStream<'_> {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        self.inner.next()
    }
}

/// Collects the first values of `t` with a fresh enumerator.
pub fn enum_values(types: &TypeTable, t: &Type, max_nodes: usize, max_count: usize) -> Vec<Value> {
    Enumerator::new(types).values(t, max_nodes, max_count).collect()
}

/// Shape of the enumerated function bodies.
#[derive(Clone, Debug)]
pub struct FnGrammar {
    /// Largest term allowed in a body or match arm, in AST nodes.
    pub depth: usize,
    /// Allow one match on an argument.
    pub matches: bool,
    /// Allow a structurally recursive call on a field of the matched
    /// argument.
    pub recursion: bool,
    pub max_count: usize,
}

impl Default for FnGrammar {
    fn default() -> Self {
        FnGrammar { depth: 3, matches: true, recursion: true, max_count: 200 }
    }
}

impl FnGrammar {
    pub fn depth(depth: usize) -> Self {
        FnGrammar { depth, ..FnGrammar::default() }
    }
}

/// An enumerated function: its source and its runtime closure.
#[derive(Clone)]
pub struct FnValue {
    pub expr: Expr,
    pub value: Value,
}

impl std::fmt::Debug for FnValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&pretty::expr(&self.expr))
    }
}

/// Functions of type `dom -> cod`.
pub fn enum_functions(types: &TypeTable, dom: &Type, cod: &Type, grammar: &FnGrammar) -> Vec<FnValue> {
    enum_curried(types, std::slice::from_ref(dom), cod, grammar)
}

/// Functions of type `p1 -> ... -> pn -> cod`. Parameters and the
/// codomain must be arrow-free.
pub fn enum_curried(types: &TypeTable, params: &[Type], cod: &Type, grammar: &FnGrammar) -> Vec<FnValue> {
    let gen = TermGen { types };
    let names: Vec<Name> = if params.len() == 1 {
        vec!["x".into()]
    } else {
        (0..params.len()).map(|i| Name::from(format!("x{i}"))).collect()
    };
    let env: Vec<(Expr, Type)> =
        names.iter().zip(params).map(|(n, t)| (Expr::var(n), t.clone())).collect();
    let mut bodies: Vec<(Expr, bool)> = Vec::new();
    let limit = grammar.max_count;

    for size in 1..=grammar.depth {
        for t in gen.terms(&env, cod, size) {
            bodies.push((t, false));
        }
    }
    if grammar.matches {
        for (pi, pty) in params.iter().enumerate() {
            if bodies.len() >= limit {
                break;
            }
            let Type::Named(adt_name) = pty else { continue };
            let Some(adt) = types.adt(adt_name) else { continue };
            if adt.ctors.len() < 2 {
                continue;
            }
            let rec_options: &[bool] = if grammar.recursion { &[false, true] } else { &[false] };
            for &rec in rec_options {
                let mut arm_choices: Vec<(Pattern, Vec<Expr>)> = Vec::new();
                let mut any_rec_field = false;
                for c in &adt.ctors {
                    let binds: Vec<Name> =
                        (0..c.fields.len()).map(|i| Name::from(format!("y{i}"))).collect();
                    let mut arm_env = env.clone();
                    for (b, ft) in binds.iter().zip(&c.fields) {
                        arm_env.push((Expr::var(b), ft.clone()));
                        if rec && ft == pty {
                            any_rec_field = true;
                            let args = names.iter().enumerate().map(|(j, n)| {
                                if j == pi {
                                    Expr::var(b)
                                } else {
                                    Expr::var(n)
                                }
                            });
                            arm_env.push((Expr::apps(Expr::var("f"), args), cod.clone()));
                        }
                    }
                    let mut terms = Vec::new();
                    for size in 1..=grammar.depth {
                        terms.extend(gen.terms(&arm_env, cod, size));
                    }
                    arm_choices.push((Pattern::Ctor { name: c.name.clone(), binds }, terms));
                }
                if rec && !any_rec_field {
                    continue;
                }
                let mut idx = vec![0usize; arm_choices.len()];
                if arm_choices.iter().any(|(_, ts)| ts.is_empty()) {
                    continue;
                }
                'odometer: loop {
                    let arms: Vec<Arm> = arm_choices
                        .iter()
                        .zip(&idx)
                        .map(|((p, ts), &i)| Arm { pattern: p.clone(), body: ts[i].clone() })
                        .collect();
                    let uses_rec = arms.iter().any(|a| a.body.mentions("f"));
                    let distinct = arms.windows(2).any(|w| pretty::expr(&w[0].body) != pretty::expr(&w[1].body));
                    if rec == uses_rec && distinct {
                        let scrut = Expr::var(&names[pi]);
                        bodies.push((Expr::new(ExprKind::Match { scrutinee: Box::new(scrut), arms }), rec));
                        if bodies.len() >= limit {
                            break 'odometer;
                        }
                    }
                    let mut k = idx.len();
                    loop {
                        if k == 0 {
                            break 'odometer;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < arm_choices[k].1.len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
        }
    }
    bodies.truncate(limit);

    let globals = HashMap::new();
    let compiler = Compiler::new(types, &globals);
    bodies
        .into_iter()
        .map(|(body, rec)| {
            let expr = if rec {
                let def = FnDef {
                    name: "f".into(),
                    params: names.iter().cloned().zip(params.iter().cloned()).collect(),
                    ret: cod.clone(),
                    body: Box::new(body),
                };
                Expr::new(ExprKind::LetRec { def, body: Box::new(Expr::var("f")) })
            } else {
                names
                    .iter()
                    .zip(params)
                    .rev()
                    .fold(body, |acc, (n, t)| Expr::lam(n, t.clone(), acc))
            };
            let code = compiler.compile(&expr).expect("enumerated terms only use known constructors");
            let v = Machine::new(&[], 1).eval(&code, &Env::empty()).expect("a function literal evaluates");
            let value = match v {
                Value::Closure(c) => Value::Closure(Arc::new(Closure {
                    body: c.body.clone(),
                    env: c.env.clone(),
                    recursive: c.recursive,
                    source: Some(pretty::expr(&expr).into()),
                })),
                other => other,
            };
            FnValue { expr, value }
        })
        .collect()
}

struct TermGen<'t> {
    types: &'t TypeTable,
}

impl TermGen<'_> {
    /// Terms of type `t` with exactly `size` nodes built from the atoms in
    /// `env` (each counting as one node), projections and constructors.
    fn terms(&self, env: &[(Expr, Type)], t: &Type, size: usize) -> Vec<Expr> {
        let mut out = Vec::new();
        if size == 0 {
            return out;
        }
        if size == 1 {
            out.extend(env.iter().filter(|(_, ty)| ty == t).map(|(e, _)| e.clone()));
        }
        if size == 2 {
            for (e, ty) in env {
                if let Type::Product(a, b) = ty {
                    if **a == *t {
                        out.push(Expr::new(ExprKind::Proj(0, Box::new(e.clone()))));
                    }
                    if **b == *t {
                        out.push(Expr::new(ExprKind::Proj(1, Box::new(e.clone()))));
                    }
                }
            }
        }
        match t {
            Type::Named(n) => {
                let Some(adt) = self.types.adt(n) else { return out };
                for c in &adt.ctors {
                    if c.fields.is_empty() {
                        if size == 1 {
                            out.push(Expr::ctor(&c.name, vec![]));
                        }
                        continue;
                    }
                    for args in self.term_tuples(env, &c.fields, size - 1) {
                        out.push(Expr::new(ExprKind::Ctor { name: c.name.clone(), args, tupled: false }));
                    }
                }
            }
            Type::Product(a, b) => {
                for mut args in self.term_tuples(env, &[(**a).clone(), (**b).clone()], size - 1) {
                    let r = args.pop().expect("two");
                    let l = args.pop().expect("two");
                    out.push(Expr::new(ExprKind::Pair(Box::new(l), Box::new(r))));
                }
            }
            Type::Abstract | Type::Arrow(..) => {}
        }
        out
    }

    fn term_tuples(&self, env: &[(Expr, Type)], fields: &[Type], total: usize) -> Vec<Vec<Expr>> {
        if fields.is_empty() {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for s in 1..=total.saturating_sub(fields.len() - 1) {
            let heads = self.terms(env, &fields[0], s);
            if heads.is_empty() {
                continue;
            }
            let tails = self.term_tuples(env, &fields[1..], total - s);
            for h in &heads {
                for tl in &tails {
                    let mut v = Vec::with_capacity(fields.len());
                    v.push(h.clone());
                    v.extend(tl.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{typecheck, AdtDecl, CtorDecl};

    fn list_types() -> TypeTable {
        let mut tt = TypeTable::new();
        tt.declare(AdtDecl {
            name: "list".into(),
            ctors: vec![
                CtorDecl { name: "Nil".into(), fields: vec![] },
                CtorDecl { name: "Cons".into(), fields: vec![Type::nat(), Type::named("list")] },
            ],
        })
        .unwrap();
        tt
    }

    #[test]
    fn bools_in_declaration_order() {
        let tt = TypeTable::new();
        let vs = enum_values(&tt, &Type::bool(), 30, 3000);
        assert_eq!(vs, vec![Value::bool(false), Value::bool(true)]);
    }

    #[test]
    fn small_nats() {
        let tt = TypeTable::new();
        let vs = enum_values(&tt, &Type::nat(), 3, 3000);
        assert_eq!(vs, vec![Value::nat(0), Value::nat(1), Value::nat(2)]);
    }

    #[test]
    fn stream_is_sorted_and_respects_caps() {
        let tt = list_types();
        let vs = enum_values(&tt, &Type::named("list"), 30, 3000);
        assert_eq!(vs.len(), 3000);
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
        assert!(vs.iter().all(|v| v.size().unwrap() <= 30));
    }

    #[test]
    fn pairs() {
        let tt = TypeTable::new();
        let t = Type::product(Type::bool(), Type::nat());
        let vs = enum_values(&tt, &t, 4, 100);
        assert_eq!(vs.len(), 2 + 2);
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn uninhabited_type_is_empty() {
        let mut tt = TypeTable::new();
        tt.declare(AdtDecl {
            name: "never".into(),
            ctors: vec![CtorDecl { name: "Loop".into(), fields: vec![Type::named("never")] }],
        })
        .unwrap();
        assert!(enum_values(&tt, &Type::named("never"), 10, 10).is_empty());
    }

    fn sources(fs: &[FnValue]) -> Vec<String> {
        fs.iter().map(|f| pretty::expr(&f.expr)).collect()
    }

    #[test]
    fn constant_functions() {
        let tt = TypeTable::new();
        let src = sources(&enum_functions(&tt, &Type::nat(), &Type::bool(), &FnGrammar::depth(1)));
        assert!(src.contains(&"fun (x : nat) -> true".to_string()));
        assert!(src.contains(&"fun (x : nat) -> false".to_string()));
    }

    #[test]
    fn identity_and_successor() {
        let tt = TypeTable::new();
        let fs = enum_functions(&tt, &Type::nat(), &Type::nat(), &FnGrammar::depth(2));
        let src = sources(&fs);
        assert!(src.contains(&"fun (x : nat) -> x".to_string()));
        assert!(src.contains(&"fun (x : nat) -> S x".to_string()));
        let succ = fs.iter().find(|f| pretty::expr(&f.expr) == "fun (x : nat) -> S x").unwrap();
        let mut m = Machine::new(&[], 100);
        assert_eq!(m.apply(&succ.value, Value::nat(3)).unwrap(), Value::nat(4));
    }

    #[test]
    fn fieldless_domain_gives_constants_only() {
        let mut tt = TypeTable::new();
        tt.declare(AdtDecl { name: "unit".into(), ctors: vec![CtorDecl { name: "U".into(), fields: vec![] }] })
            .unwrap();
        let fs = enum_functions(&tt, &Type::named("unit"), &Type::bool(), &FnGrammar::depth(3));
        assert_eq!(sources(&fs), ["fun (x : unit) -> false", "fun (x : unit) -> true"]);
    }

    #[test]
    fn enumerated_functions_typecheck_and_terminate() {
        let tt = list_types();
        let list = Type::named("list");
        let fs = enum_curried(&tt, &[Type::nat(), list.clone()], &list, &FnGrammar::default());
        assert!(!fs.is_empty());
        let want = Type::curried([Type::nat(), list.clone()], list.clone());
        let inputs = enum_values(&tt, &list, 8, 50);
        for f in &fs {
            assert_eq!(typecheck(&tt, &HashMap::new(), &f.expr).unwrap(), want, "{f:?}");
            for l in &inputs {
                let mut m = Machine::new(&[], 10_000);
                m.apply_all(&f.value, vec![Value::nat(1), l.clone()]).unwrap();
            }
        }
        let src = sources(&fs);
        assert!(src.iter().any(|s| s.contains("Cons (x0, x1)")), "{src:?}");
    }

    #[test]
    fn recursive_functions_are_generated() {
        let tt = list_types();
        let list = Type::named("list");
        let fs = enum_functions(&tt, &list, &Type::nat(), &FnGrammar { max_count: 5000, ..FnGrammar::default() });
        let len = fs
            .iter()
            .find(|f| {
                let mut m = Machine::new(&[], 1000);
                (0..4).all(|n| {
                    let l = Value::nat_list(&vec![7; n]);
                    m.apply(&f.value, l).unwrap() == Value::nat(n as u64)
                })
            })
            .expect("length is in the grammar");
        assert!(matches!(len.expr.kind, ExprKind::LetRec { .. }));
    }
}
