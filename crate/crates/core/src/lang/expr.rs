use std::fmt;

use super::types::{Name, Type};

/// A half-open region of source text, 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: (u32, u32),
    pub end: (u32, u32),
}

impl Span {
    pub fn new(start: (u32, u32), end: (u32, u32)) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }

    pub fn is_synthetic(&self) -> bool {
        self.start == (0, 0)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.0, self.start.1, self.end.0, self.end.1
        )
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Var(Name),
    /// Constructor application. `tupled` records that the arguments were
    /// written as one parenthesised tuple, which matters when the
    /// constructor has a single product-typed field.
    Ctor { name: Name, args: Vec<Expr>, tupled: bool },
    Lam { param: Name, ty: Type, body: Box<Expr> },
    App(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    /// `fst` is index 1, `snd` is index 2.
    Proj(u8, Box<Expr>),
    Match { scrutinee: Box<Expr>, arms: Vec<Arm> },
    LetRec { def: FnDef, body: Box<Expr> },
    Let { name: Name, value: Box<Expr>, body: Box<Expr> },
    If { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
    Eq(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

#[derive(Clone, Debug)]
pub struct Arm {
    pub pattern: Pattern,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Ctor { name: Name, binds: Vec<Name> },
    Wildcard,
}

/// `let rec name (p1 : T1) ... : ret = body`
#[derive(Clone, Debug)]
pub struct FnDef {
    pub name: Name,
    pub params: Vec<(Name, Type)>,
    pub ret: Type,
    pub body: Box<Expr>,
}

impl FnDef {
    pub fn ty(&self) -> Type {
        Type::curried(self.params.iter().map(|(_, t)| t.clone()), self.ret.clone())
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn at(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn ctor(name: &str, args: Vec<Expr>) -> Self {
        let tupled = args.len() > 1;
        Expr::new(ExprKind::Ctor { name: name.into(), args, tupled })
    }

    pub fn bool_lit(b: bool) -> Self {
        Expr::ctor(if b { "True" } else { "False" }, vec![])
    }

    /// Peano literal.
    pub fn nat_lit(n: u64) -> Self {
        (0..n).fold(Expr::ctor("Z", vec![]), |acc, _| Expr::ctor("S", vec![acc]))
    }

    pub fn lam(param: &str, ty: Type, body: Expr) -> Self {
        Expr::new(ExprKind::Lam { param: param.into(), ty, body: Box::new(body) })
    }

    pub fn app(f: Expr, a: Expr) -> Self {
        Expr::new(ExprKind::App(Box::new(f), Box::new(a)))
    }

    pub fn apps(f: Expr, args: impl IntoIterator<Item = Expr>) -> Self {
        args.into_iter().fold(f, Expr::app)
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Eq(Box::new(a), Box::new(b)))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::And(Box::new(a), Box::new(b)))
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Or(Box::new(a), Box::new(b)))
    }

    pub fn not(a: Expr) -> Self {
        Expr::new(ExprKind::Not(Box::new(a)))
    }

    /// Number of AST nodes. Patterns count as one node each; type
    /// annotations are not counted.
    pub fn size(&self) -> usize {
        match &self.kind {
            ExprKind::Var(_) => 1,
            ExprKind::Ctor { args, .. } => 1 + args.iter().map(Expr::size).sum::<usize>(),
            ExprKind::Lam { body, .. } => 1 + body.size(),
            ExprKind::App(a, b)
            | ExprKind::Pair(a, b)
            | ExprKind::Eq(a, b)
            | ExprKind::And(a, b)
            | ExprKind::Or(a, b) => 1 + a.size() + b.size(),
            ExprKind::Proj(_, e) | ExprKind::Not(e) => 1 + e.size(),
            ExprKind::Match { scrutinee, arms } => {
                1 + scrutinee.size() + arms.iter().map(|a| 1 + a.body.size()).sum::<usize>()
            }
            ExprKind::LetRec { def, body } => 1 + def.body.size() + body.size(),
            ExprKind::Let { value, body, .. } => 1 + value.size() + body.size(),
            ExprKind::If { cond, then, els } => 1 + cond.size() + then.size() + els.size(),
        }
    }

    /// Does `name` occur free?
    pub fn mentions(&self, name: &str) -> bool {
        match &self.kind {
            ExprKind::Var(n) => &**n == name,
            ExprKind::Ctor { args, .. } => args.iter().any(|a| a.mentions(name)),
            ExprKind::Lam { param, body, .. } => &**param != name && body.mentions(name),
            ExprKind::App(a, b)
            | ExprKind::Pair(a, b)
            | ExprKind::Eq(a, b)
            | ExprKind::And(a, b)
            | ExprKind::Or(a, b) => a.mentions(name) || b.mentions(name),
            ExprKind::Proj(_, e) | ExprKind::Not(e) => e.mentions(name),
            ExprKind::Match { scrutinee, arms } => {
                scrutinee.mentions(name)
                    || arms.iter().any(|a| {
                        let bound = match &a.pattern {
                            Pattern::Ctor { binds, .. } => binds.iter().any(|b| &**b == name),
                            Pattern::Wildcard => false,
                        };
                        !bound && a.body.mentions(name)
                    })
            }
            ExprKind::LetRec { def, body } => {
                if &*def.name == name {
                    return false;
                }
                let in_fn = !def.params.iter().any(|(p, _)| &**p == name) && def.body.mentions(name);
                in_fn || body.mentions(name)
            }
            ExprKind::Let { name: n, value, body } => {
                value.mentions(name) || (&**n != name && body.mentions(name))
            }
            ExprKind::If { cond, then, els } => {
                cond.mentions(name) || then.mentions(name) || els.mentions(name)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_sizes() {
        assert_eq!(Expr::nat_lit(0).size(), 1);
        assert_eq!(Expr::nat_lit(3).size(), 4);
        let call = Expr::apps(Expr::var("lookup"), [Expr::var("tl"), Expr::var("hd")]);
        assert_eq!(call.size(), 5);
    }

    #[test]
    fn free_occurrence_respects_binders() {
        let e = Expr::lam("x", Type::nat(), Expr::app(Expr::var("f"), Expr::var("x")));
        assert!(e.mentions("f"));
        assert!(!e.mentions("x"));
    }
}
