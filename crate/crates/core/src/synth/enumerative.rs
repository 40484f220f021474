//! Bottom-up enumerative synthesis of boolean predicates.
//!
//! A candidate is either a boolean formula over atoms about the argument,
//! or one match on the argument with a formula per constructor. Atoms are
//! boolean variables, calls to boolean helpers from the program, equalities
//! between variables or with small constants, and recursive calls on
//! fields of the concrete type. Recursive calls are read off the example
//! labels, which is why examples are made trace complete first.

use std::collections::{BTreeMap, HashSet};

use super::{trace_complete, ExampleSet, SynthResult, Synthesizer};
use crate::enumerate::Enumerator;
use crate::lang::{Arm, Expr, ExprKind, FnDef, Name, Pattern, Predicate, Program, Type, Value};

#[derive(Clone, Debug)]
pub struct SynthConfig {
    /// Term size budget, deepened from `start` in steps of `step`.
    pub max_size: usize,
    pub start: usize,
    pub step: usize,
    /// Candidates returned on success.
    pub candidates: usize,
    /// Largest constant, in nodes, used in equality tests.
    pub const_size: usize,
    /// Formula combinations tried per search before giving up.
    pub work_limit: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { max_size: 40, start: 5, step: 5, candidates: 8, const_size: 3, work_limit: 3_000_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumerativeSynth {
    pub config: SynthConfig,
}

impl EnumerativeSynth {
    pub fn new(config: SynthConfig) -> Self {
        EnumerativeSynth { config }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Bits {
        let mut b = Bits::new(n);
        for i in 0..n {
            if f(i) {
                b.0[i / 64] |= 1 << (i % 64);
            }
        }
        b
    }

    fn not(&self, n: usize) -> Bits {
        let mut b = Bits(self.0.iter().map(|w| !w).collect());
        if !n.is_multiple_of(64) {
            if let Some(last) = b.0.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
        b
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn or(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }
}

/// Smallest-first formula search against one target labelling.
struct Search {
    n: usize,
    target: Bits,
    atoms: Vec<Vec<(Expr, Bits)>>,
    by_size: Vec<Vec<(Expr, Bits)>>,
    seen: HashSet<Bits>,
    hits: Vec<(usize, Expr)>,
    work: usize,
    work_limit: usize,
}

impl Search {
    fn new(n: usize, target: Bits, atoms: Vec<(Expr, Bits)>, work_limit: usize) -> Search {
        let mut by_atom_size: Vec<Vec<(Expr, Bits)>> = vec![Vec::new(); 2];
        by_atom_size[1].push((Expr::bool_lit(true), Bits::from_fn(n, |_| true)));
        by_atom_size[1].push((Expr::bool_lit(false), Bits::new(n)));
        for (e, b) in atoms {
            let s = e.size();
            if by_atom_size.len() <= s {
                by_atom_size.resize(s + 1, Vec::new());
            }
            by_atom_size[s].push((e, b));
        }
        Search {
            n,
            target,
            atoms: by_atom_size,
            by_size: vec![Vec::new()],
            seen: HashSet::new(),
            hits: Vec::new(),
            work: 0,
            work_limit,
        }
    }

    fn exhausted(&self) -> bool {
        self.work >= self.work_limit
    }

    /// Fills in all sizes up to `max`, stopping early once `k` hits exist
    /// at some size.
    fn extend_to(&mut self, max: usize, k: usize) {
        while self.by_size.len() <= max && !self.exhausted() {
            if self.hits.len() >= k {
                return;
            }
            let s = self.by_size.len();
            let mut fresh: Vec<(Expr, Bits)> = Vec::new();
            if let Some(atoms) = self.atoms.get(s) {
                fresh.extend(atoms.iter().cloned());
            }
            for (e, b) in &self.by_size[s - 1] {
                if !matches!(e.kind, ExprKind::Not(_)) && !is_const(e) {
                    fresh.push((Expr::not(e.clone()), b.not(self.n)));
                }
            }
            for sa in 1..s.saturating_sub(1) {
                let sb = s - 1 - sa;
                if sb == 0 || sb >= self.by_size.len() {
                    continue;
                }
                for (ea, ba) in &self.by_size[sa] {
                    if is_const(ea) {
                        continue;
                    }
                    for (eb, bb) in &self.by_size[sb] {
                        if is_const(eb) || ba == bb {
                            continue;
                        }
                        self.work += 2;
                        fresh.push((Expr::and(ea.clone(), eb.clone()), ba.and(bb)));
                        fresh.push((Expr::or(ea.clone(), eb.clone()), ba.or(bb)));
                    }
                    if self.work >= self.work_limit {
                        break;
                    }
                }
            }
            let mut level = Vec::new();
            for (e, b) in fresh {
                if b == self.target && self.hits.len() < k {
                    self.hits.push((s, e.clone()));
                }
                if self.seen.insert(b.clone()) {
                    level.push((e, b));
                }
            }
            self.by_size.push(level);
        }
    }
}

fn is_const(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Ctor { args, .. } if args.is_empty())
}

/// A typed term with its value on every example.
#[derive(Clone)]
struct Term {
    expr: Expr,
    ty: Type,
    vals: Vec<Option<Value>>,
}

struct AtomBuilder<'p> {
    program: &'p Program,
    helpers: Vec<(Name, Vec<Type>, Value)>,
    consts: BTreeMap<Type, Vec<Value>>,
    const_size: usize,
}

impl<'p> AtomBuilder<'p> {
    fn new(program: &'p Program, const_size: usize) -> Self {
        let mut helpers = Vec::new();
        for (g, v) in program.globals.iter().zip(&program.values) {
            let (args, ret) = g.ty.uncurry();
            if ret.is_bool() && !args.is_empty() && args.iter().all(|a| a.is_zero_type()) {
                helpers.push((g.name.clone(), args.into_iter().cloned().collect(), v.clone()));
            }
        }
        AtomBuilder { program, helpers, consts: BTreeMap::new(), const_size }
    }

    fn consts(&mut self, t: &Type) -> Vec<Value> {
        if let Some(c) = self.consts.get(t) {
            return c.clone();
        }
        let en = Enumerator::new(&self.program.types);
        let vs: Vec<Value> = en.values(t, self.const_size, 8).collect();
        self.consts.insert(t.clone(), vs.clone());
        vs
    }

    /// Boolean atoms over `env`, each with its truth value on every
    /// example. Atoms undefined on some example are dropped.
    fn atoms(&mut self, env: &[Term], n: usize) -> Vec<(Expr, Bits)> {
        let mut out: Vec<(Expr, Vec<Option<bool>>)> = Vec::new();
        for t in env {
            if t.ty.is_bool() {
                out.push((t.expr.clone(), t.vals.iter().map(|v| v.as_ref().and_then(Value::as_bool)).collect()));
            }
        }
        for (i, a) in env.iter().enumerate() {
            if a.ty.is_bool() || !a.ty.is_zero_type() {
                continue;
            }
            for b in &env[i + 1..] {
                if b.ty == a.ty {
                    let vals = (0..n)
                        .map(|k| Some(a.vals[k].as_ref()? == b.vals[k].as_ref()?))
                        .collect();
                    out.push((Expr::eq(a.expr.clone(), b.expr.clone()), vals));
                }
            }
            for c in self.consts(&a.ty) {
                let vals = (0..n).map(|k| Some(*a.vals[k].as_ref()? == c)).collect();
                out.push((Expr::eq(a.expr.clone(), value_expr(&c)), vals));
            }
        }
        let mut m = self.program.machine();
        for (name, args, f) in &self.helpers {
            let choices: Vec<Vec<&Term>> =
                args.iter().map(|t| env.iter().filter(|e| &e.ty == t).collect()).collect();
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; args.len()];
            loop {
                let picked: Vec<&Term> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                let vals = (0..n)
                    .map(|k| {
                        let argv: Option<Vec<Value>> = picked.iter().map(|t| t.vals[k].clone()).collect();
                        m.refuel();
                        m.apply_all(f, argv?).ok()?.as_bool()
                    })
                    .collect();
                let call = Expr::apps(Expr::var(name), picked.iter().map(|t| t.expr.clone()));
                out.push((call, vals));
                let mut d = idx.len();
                loop {
                    if d == 0 {
                        break;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < choices[d].len() {
                        break;
                    }
                    idx[d] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        out.into_iter()
            .filter_map(|(e, vals)| {
                let vals: Option<Vec<bool>> = vals.into_iter().collect();
                let vals = vals?;
                Some((e, Bits::from_fn(n, |i| vals[i])))
            })
            .collect()
    }
}

/// Literal syntax for a small first-order value.
pub(crate) fn value_expr(v: &Value) -> Expr {
    match v {
        Value::Ctor(c) => {
            if let Some(n) = v.as_nat() {
                return Expr::nat_lit(n);
            }
            if let Some(b) = v.as_bool() {
                return Expr::bool_lit(b);
            }
            Expr::new(ExprKind::Ctor { name: c.name.clone(), args: c.args.iter().map(value_expr).collect(), tupled: false })
        }
        Value::Pair(p) => Expr::new(ExprKind::Pair(Box::new(value_expr(&p.left)), Box::new(value_expr(&p.right)))),
        Value::Closure(_) | Value::Monitored(_) => unreachable!("closures have no literal syntax"),
    }
}

/// Picks names for the argument, the recursive function and constructor
/// fields that do not clash with globals.
struct Names<'p> {
    program: &'p Program,
}

impl Names<'_> {
    fn fresh(&self, base: &str, taken: &[Name]) -> Name {
        let mut name = base.to_string();
        while self.program.index.contains_key(name.as_str()) || taken.iter().any(|t| **t == *name) {
            name.push('\'');
        }
        name.into()
    }

    fn fields(&self, fields: &[Type], concrete: &Type, taken: &[Name]) -> Vec<Name> {
        let rec = fields.iter().filter(|f| *f == concrete).count();
        let other = fields.len() - rec;
        let rec_names: &[&str] = match rec {
            1 => &["tl"],
            2 => &["l", "r"],
            _ => &[],
        };
        let other_names: &[&str] = match (other, rec) {
            (1, 1) => &["hd"],
            (1, _) => &["v"],
            _ => &[],
        };
        let (mut ri, mut oi) = (0, 0);
        let mut out: Vec<Name> = Vec::new();
        for f in fields {
            let base = if f == concrete {
                ri += 1;
                rec_names.get(ri - 1).map(|s| s.to_string()).unwrap_or(format!("t{}", ri - 1))
            } else {
                oi += 1;
                other_names.get(oi - 1).map(|s| s.to_string()).unwrap_or(format!("a{}", oi - 1))
            };
            let mut all = taken.to_vec();
            all.extend(out.iter().cloned());
            out.push(self.fresh(&base, &all));
        }
        out
    }
}

struct Branch {
    ctor: Name,
    binds: Vec<Name>,
    search: Search,
}

impl Synthesizer for EnumerativeSynth {
    fn synthesize(&self, program: &Program, raw: &ExampleSet) -> SynthResult {
        if !raw.is_disjoint() {
            return SynthResult::Failure("positive and negative examples overlap".into());
        }
        let concrete = program.concrete().clone();
        let ex = trace_complete(&program.types, &concrete, raw);
        if !ex.is_disjoint() {
            return SynthResult::Failure("trace completion made the examples overlap".into());
        }
        let labels = ex.labels();
        let examples: Vec<(Value, bool)> = labels.iter().map(|(v, &l)| (v.clone(), l)).collect();
        let cfg = &self.config;
        let names = Names { program };
        let x = names.fresh("x", &[]);
        let inv = names.fresh("inv", std::slice::from_ref(&x));
        let mut builder = AtomBuilder::new(program, cfg.const_size);

        // flat form
        let n = examples.len();
        let mut env = vec![Term {
            expr: Expr::var(&x),
            ty: concrete.clone(),
            vals: examples.iter().map(|(v, _)| Some(v.clone())).collect(),
        }];
        if let Type::Product(a, b) = &concrete {
            for (i, t) in [(0u8, a), (1u8, b)] {
                env.push(Term {
                    expr: Expr::new(ExprKind::Proj(i, Box::new(Expr::var(&x)))),
                    ty: (**t).clone(),
                    vals: examples
                        .iter()
                        .map(|(v, _)| match v {
                            Value::Pair(p) => Some(if i == 0 { p.left.clone() } else { p.right.clone() }),
                            _ => None,
                        })
                        .collect(),
                });
            }
        }
        let atoms = builder.atoms(&env, n);
        let target = Bits::from_fn(n, |i| examples[i].1);
        let mut flat = Search::new(n, target, atoms, cfg.work_limit);

        // match form
        let mut branches: Vec<Branch> = Vec::new();
        if let Type::Named(adt_name) = &concrete {
            if let Some(adt) = program.types.adt(adt_name) {
                if adt.ctors.len() >= 2 {
                    for (tag, c) in adt.ctors.iter().enumerate() {
                        let here: Vec<&(Value, bool)> = examples
                            .iter()
                            .filter(|(v, _)| matches!(v, Value::Ctor(cv) if cv.tag as usize == tag))
                            .collect();
                        let k = here.len();
                        let binds = names.fields(&c.fields, &concrete, &[x.clone(), inv.clone()]);
                        let mut env = vec![Term {
                            expr: Expr::var(&x),
                            ty: concrete.clone(),
                            vals: here.iter().map(|(v, _)| Some(v.clone())).collect(),
                        }];
                        for (fi, (b, ft)) in binds.iter().zip(&c.fields).enumerate() {
                            let vals: Vec<Option<Value>> = here
                                .iter()
                                .map(|(v, _)| match v {
                                    Value::Ctor(cv) => cv.args.get(fi).cloned(),
                                    _ => None,
                                })
                                .collect();
                            if *ft == concrete {
                                let rec = vals
                                    .iter()
                                    .map(|v| v.as_ref().and_then(|v| labels.get(v)).map(|&l| Value::bool(l)))
                                    .collect();
                                env.push(Term {
                                    expr: Expr::app(Expr::var(&inv), Expr::var(b)),
                                    ty: Type::bool(),
                                    vals: rec,
                                });
                            }
                            env.push(Term { expr: Expr::var(b), ty: ft.clone(), vals });
                        }
                        let atoms = builder.atoms(&env, k);
                        let target = Bits::from_fn(k, |i| here[i].1);
                        branches.push(Branch {
                            ctor: c.name.clone(),
                            binds,
                            search: Search::new(k, target, atoms, cfg.work_limit),
                        });
                    }
                }
            }
        }

        let mut cap = cfg.start.min(cfg.max_size);
        loop {
            let mut found: Vec<Expr> = Vec::new();
            flat.extend_to(cap, cfg.candidates);
            for (_, e) in &flat.hits {
                found.push(Expr::lam(&x, concrete.clone(), e.clone()));
            }
            if !branches.is_empty() {
                for b in &mut branches {
                    b.search.extend_to(cap, cfg.candidates);
                }
                if branches.iter().all(|b| !b.search.hits.is_empty()) {
                    found.extend(assemble(&branches, &x, &inv, &concrete, cfg.candidates));
                }
            }
            let mut sized: Vec<(usize, usize, Expr)> = found
                .into_iter()
                .enumerate()
                .map(|(i, e)| (e.size(), i, e))
                .filter(|(s, _, _)| *s <= cap)
                .collect();
            sized.sort_by_key(|(s, i, _)| (*s, *i));
            let mut preds: Vec<Predicate> = Vec::new();
            for (_, _, e) in sized {
                if preds.len() >= cfg.candidates {
                    break;
                }
                let Ok(p) = program.predicate(e) else { continue };
                if raw.admits(program, &p) && ex.admits(program, &p) && !preds.contains(&p) {
                    preds.push(p);
                }
            }
            if !preds.is_empty() {
                return SynthResult::Success(preds);
            }
            let stuck = flat.exhausted() && branches.iter().all(|b| b.search.exhausted());
            if cap >= cfg.max_size || stuck {
                return SynthResult::Failure(format!(
                    "no predicate of size at most {cap} separates {} positive and {} negative examples",
                    raw.pos.len(),
                    raw.neg.len()
                ));
            }
            cap = (cap + cfg.step).min(cfg.max_size);
        }
    }
}

/// Match-form candidates from per-branch hits, smallest first.
fn assemble(branches: &[Branch], x: &Name, inv: &Name, concrete: &Type, k: usize) -> Vec<Expr> {
    const PER_BRANCH: usize = 4;
    let mut combos: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    for b in branches {
        let mut next = Vec::new();
        for (s, idx) in &combos {
            for (i, (hs, _)) in b.search.hits.iter().enumerate().take(PER_BRANCH) {
                let mut idx = idx.clone();
                idx.push(i);
                next.push((s + hs, idx));
            }
        }
        next.sort();
        next.truncate(k * 4);
        combos = next;
    }
    combos
        .into_iter()
        .take(k)
        .map(|(_, idx)| {
            let arms: Vec<Arm> = branches
                .iter()
                .zip(&idx)
                .map(|(b, &i)| Arm {
                    pattern: Pattern::Ctor { name: b.ctor.clone(), binds: b.binds.clone() },
                    body: b.search.hits[i].1.clone(),
                })
                .collect();
            let recursive = arms.iter().any(|a| a.body.mentions(inv));
            let body = Expr::new(ExprKind::Match { scrutinee: Box::new(Expr::var(x)), arms });
            if recursive {
                let def = FnDef {
                    name: inv.clone(),
                    params: vec![(x.clone(), concrete.clone())],
                    ret: Type::bool(),
                    body: Box::new(body),
                };
                Expr::new(ExprKind::LetRec { def, body: Box::new(Expr::var(inv)) })
            } else {
                Expr::lam(x, concrete.clone(), body)
            }
        })
        .collect()
}
