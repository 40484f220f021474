//! Recursive-descent parser for benchmark files.

use std::collections::HashMap;

use super::ast::{Interface, Item, LetDecl, ModuleDecl, ParsedProgram, SpecDecl, TypeDecl};
use super::diagnostic::{Code, Diagnostic};
use super::lexer::{lex, Kw, Sym, Tok, Token};
use crate::lang::{Arm, Expr, ExprKind, FnDef, Name, Pattern, Span, Type, TypeTable};

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Constructor arities seen so far, used to decide whether a
    /// constructor takes an argument.
    arities: HashMap<String, usize>,
    /// Whether `t` denotes the abstract type.
    abstract_t: bool,
}

fn builtin_arities() -> HashMap<String, usize> {
    [("Z", 0), ("S", 1), ("True", 0), ("False", 0)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        let toks = lex(src).map_err(|e| Diagnostic::error(Code::Syntax, e.span, e.message))?;
        Ok(Parser { toks, pos: 0, arities: builtin_arities(), abstract_t: false })
    }

    /// A parser for standalone expressions over an existing set of types.
    pub fn for_types(src: &str, types: &TypeTable) -> PResult<Self> {
        let mut p = Parser::new(src)?;
        for adt in types.adts() {
            for c in &adt.ctors {
                p.arities.insert(c.name.to_string(), c.fields.len());
            }
        }
        Ok(p)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, k: Kw) -> bool {
        *self.peek() == Tok::Kw(k)
    }

    fn at_sym(&self, s: Sym) -> bool {
        *self.peek() == Tok::Sym(s)
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::error(
            Code::Syntax,
            self.span(),
            format!("expected {what}, found {}", self.peek()),
        ))
    }

    fn expect_kw(&mut self, k: Kw) -> PResult<()> {
        if self.at_kw(k) {
            self.advance();
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", format!("{k:?}").to_lowercase()))
        }
    }

    fn expect_sym(&mut self, s: Sym) -> PResult<()> {
        if self.at_sym(s) {
            self.advance();
            Ok(())
        } else {
            self.unexpected(&Tok::Sym(s).to_string())
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s.into())
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn binder(&mut self) -> PResult<Name> {
        if self.at_sym(Sym::Underscore) {
            self.advance();
            return Ok("_".into());
        }
        self.ident()
    }

    fn upper(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Upper(s) => {
                self.advance();
                Ok(s.into())
            }
            _ => self.unexpected("a capitalised name"),
        }
    }

    // ---- programs -------------------------------------------------------

    pub fn program(&mut self) -> PResult<ParsedProgram> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::Kw(Kw::Type) => items.push(Item::Type(self.type_decl()?)),
                Tok::Kw(Kw::Let) => items.push(Item::Let(self.let_decl()?)),
                Tok::Kw(Kw::Module) => break,
                Tok::Eof => {
                    return Err(Diagnostic::error(Code::MissingModule, self.span(), "missing module block")
                        .with_hint("a file needs `module Name = struct type t = ... end`"))
                }
                _ => return self.unexpected("`type`, `let` or `module`"),
            }
        }
        let module = self.module()?;
        if *self.peek() == Tok::Eof {
            return Err(Diagnostic::error(Code::MissingSpec, self.span(), "missing spec block")
                .with_hint("end the file with `spec forall (x : t) . <expr>`"));
        }
        let spec = self.spec()?;
        if *self.peek() != Tok::Eof {
            return self.unexpected("end of file after the spec block");
        }
        Ok(ParsedProgram { items, module, spec })
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let start = self.span();
        self.expect_kw(Kw::Type)?;
        let name = self.ident()?;
        self.expect_sym(Sym::Eq)?;
        if self.at_sym(Sym::Bar) {
            self.advance();
        }
        let mut ctors = Vec::new();
        loop {
            let c = self.upper()?;
            let mut fields = Vec::new();
            if self.at_kw(Kw::Of) {
                self.advance();
                fields.push(self.ty_atom()?);
                while self.at_sym(Sym::Star) {
                    self.advance();
                    fields.push(self.ty_atom()?);
                }
            }
            self.arities.insert(c.to_string(), fields.len());
            ctors.push((c, fields));
            if self.at_sym(Sym::Bar) {
                self.advance();
            } else {
                break;
            }
        }
        Ok(TypeDecl { name, ctors, span: start.to(self.prev_span()) })
    }

    fn params(&mut self) -> PResult<Vec<(Name, Type)>> {
        let mut params = Vec::new();
        while self.at_sym(Sym::LParen) {
            self.advance();
            let n = self.binder()?;
            self.expect_sym(Sym::Colon)?;
            let t = self.ty()?;
            self.expect_sym(Sym::RParen)?;
            params.push((n, t));
        }
        Ok(params)
    }

    fn let_decl(&mut self) -> PResult<LetDecl> {
        let start = self.span();
        self.expect_kw(Kw::Let)?;
        let rec = if self.at_kw(Kw::Rec) {
            self.advance();
            true
        } else {
            false
        };
        let name = self.ident()?;
        let params = self.params()?;
        if rec && params.is_empty() {
            return Err(Diagnostic::error(
                Code::Syntax,
                self.span(),
                "a recursive definition needs at least one parameter",
            ));
        }
        self.expect_sym(Sym::Colon)?;
        let ret = self.ty()?;
        self.expect_sym(Sym::Eq)?;
        let body = self.expr()?;
        Ok(LetDecl {
            rec,
            def: FnDef { name, params, ret, body: Box::new(body) },
            span: start.to(self.prev_span()),
        })
    }

    fn module(&mut self) -> PResult<ModuleDecl> {
        let start = self.span();
        self.expect_kw(Kw::Module)?;
        let name = self.upper()?;
        self.expect_sym(Sym::Eq)?;
        self.expect_kw(Kw::Struct)?;
        self.expect_kw(Kw::Type)?;
        match self.peek() {
            Tok::Ident(s) if s == "t" => {
                self.advance();
            }
            _ => return self.unexpected("`t`"),
        }
        self.expect_sym(Sym::Eq)?;
        let concrete = self.ty()?;
        self.abstract_t = true;
        let mut lets = Vec::new();
        while self.at_kw(Kw::Let) {
            lets.push(self.let_decl()?);
        }
        self.expect_kw(Kw::End)?;
        Ok(ModuleDecl { name, concrete, lets, span: start.to(self.prev_span()) })
    }

    fn spec(&mut self) -> PResult<SpecDecl> {
        let start = self.span();
        self.expect_kw(Kw::Spec)?;
        self.expect_kw(Kw::Forall)?;
        let quantifiers = self.params()?;
        if quantifiers.is_empty() {
            return self.unexpected("a quantifier `(x : type)`");
        }
        self.expect_sym(Sym::Dot)?;
        let body = self.expr()?;
        Ok(SpecDecl { quantifiers, body, span: start.to(self.prev_span()) })
    }

    /// `val name : type` lines, with `t` as the abstract type.
    pub fn interface(&mut self) -> PResult<Interface> {
        self.abstract_t = true;
        let mut members = Vec::new();
        while self.at_kw(Kw::Val) {
            self.advance();
            let n = self.ident()?;
            self.expect_sym(Sym::Colon)?;
            members.push((n, self.ty()?));
        }
        if *self.peek() != Tok::Eof {
            return self.unexpected("`val` or end of input");
        }
        Ok(Interface { members })
    }

    // ---- types ----------------------------------------------------------

    pub fn ty(&mut self) -> PResult<Type> {
        let mut parts = vec![self.ty_atom()?];
        while self.at_sym(Sym::Star) {
            self.advance();
            parts.push(self.ty_atom()?);
        }
        let last = parts.pop().expect("nonempty");
        let left = parts.into_iter().rev().fold(last, |acc, t| Type::product(t, acc));
        if self.at_sym(Sym::Arrow) {
            self.advance();
            Ok(Type::arrow(left, self.ty()?))
        } else {
            Ok(left)
        }
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                if s == "t" && self.abstract_t {
                    Ok(Type::Abstract)
                } else {
                    Ok(Type::named(&s))
                }
            }
            Tok::Sym(Sym::LParen) => {
                self.advance();
                let t = self.ty()?;
                self.expect_sym(Sym::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    // ---- expressions ----------------------------------------------------

    pub fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Tok::Kw(Kw::Fun) => {
                self.advance();
                let params = self.params()?;
                if params.is_empty() {
                    return self.unexpected("a parameter `(x : type)`");
                }
                self.expect_sym(Sym::Arrow)?;
                let body = self.expr()?;
                let span = start.to(self.prev_span());
                Ok(params.into_iter().rev().fold(body, |acc, (param, ty)| {
                    Expr::at(ExprKind::Lam { param, ty, body: Box::new(acc) }, span)
                }))
            }
            Tok::Kw(Kw::If) => {
                self.advance();
                let cond = self.expr()?;
                self.expect_kw(Kw::Then)?;
                let then = self.expr()?;
                self.expect_kw(Kw::Else)?;
                let els = self.expr()?;
                Ok(Expr::at(
                    ExprKind::If { cond: Box::new(cond), then: Box::new(then), els: Box::new(els) },
                    start.to(self.prev_span()),
                ))
            }
            Tok::Kw(Kw::Let) => {
                self.advance();
                if self.at_kw(Kw::Rec) {
                    self.advance();
                    let name = self.ident()?;
                    let params = self.params()?;
                    if params.is_empty() {
                        return self.unexpected("a parameter `(x : type)`");
                    }
                    self.expect_sym(Sym::Colon)?;
                    let ret = self.ty()?;
                    self.expect_sym(Sym::Eq)?;
                    let fbody = self.expr()?;
                    self.expect_kw(Kw::In)?;
                    let body = self.expr()?;
                    let def = FnDef { name, params, ret, body: Box::new(fbody) };
                    Ok(Expr::at(ExprKind::LetRec { def, body: Box::new(body) }, start.to(self.prev_span())))
                } else {
                    let name = self.binder()?;
                    self.expect_sym(Sym::Eq)?;
                    let value = self.expr()?;
                    self.expect_kw(Kw::In)?;
                    let body = self.expr()?;
                    Ok(Expr::at(
                        ExprKind::Let { name, value: Box::new(value), body: Box::new(body) },
                        start.to(self.prev_span()),
                    ))
                }
            }
            Tok::Kw(Kw::Match) => {
                self.advance();
                let scrutinee = self.expr()?;
                self.expect_kw(Kw::With)?;
                if self.at_sym(Sym::Bar) {
                    self.advance();
                }
                let mut arms = Vec::new();
                loop {
                    let pattern = self.pattern()?;
                    self.expect_sym(Sym::Arrow)?;
                    let body = self.expr()?;
                    arms.push(Arm { pattern, body });
                    if self.at_sym(Sym::Bar) {
                        self.advance();
                    } else {
                        break;
                    }
                }
                Ok(Expr::at(
                    ExprKind::Match { scrutinee: Box::new(scrutinee), arms },
                    start.to(self.prev_span()),
                ))
            }
            _ => self.or_expr(),
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        match self.peek().clone() {
            Tok::Sym(Sym::Underscore) => {
                self.advance();
                Ok(Pattern::Wildcard)
            }
            Tok::Kw(Kw::True) => {
                self.advance();
                Ok(Pattern::Ctor { name: "True".into(), binds: vec![] })
            }
            Tok::Kw(Kw::False) => {
                self.advance();
                Ok(Pattern::Ctor { name: "False".into(), binds: vec![] })
            }
            Tok::Int(0) => {
                self.advance();
                Ok(Pattern::Ctor { name: "Z".into(), binds: vec![] })
            }
            Tok::Upper(c) => {
                self.advance();
                let mut binds = Vec::new();
                if self.at_sym(Sym::LParen) {
                    self.advance();
                    binds.push(self.binder()?);
                    while self.at_sym(Sym::Comma) {
                        self.advance();
                        binds.push(self.binder()?);
                    }
                    self.expect_sym(Sym::RParen)?;
                } else if matches!(self.peek(), Tok::Ident(_) | Tok::Sym(Sym::Underscore)) {
                    binds.push(self.binder()?);
                }
                Ok(Pattern::Ctor { name: c.into(), binds })
            }
            _ => self.unexpected("a pattern"),
        }
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let l = self.and_expr()?;
        if self.at_sym(Sym::OrOr) {
            self.advance();
            let r = self.or_operand()?;
            return Ok(Expr::at(ExprKind::Or(Box::new(l), Box::new(r)), start.to(self.prev_span())));
        }
        Ok(l)
    }

    /// Right operands of binary operators may be open constructs such as
    /// `fun` or `if`, which then extend as far as possible.
    fn or_operand(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), Tok::Kw(Kw::Fun | Kw::If | Kw::Let | Kw::Match)) {
            self.expr()
        } else {
            self.or_expr()
        }
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let l = self.cmp_expr()?;
        if self.at_sym(Sym::AndAnd) {
            self.advance();
            let r = if matches!(self.peek(), Tok::Kw(Kw::Fun | Kw::If | Kw::Let | Kw::Match)) {
                self.expr()?
            } else {
                self.and_expr()?
            };
            return Ok(Expr::at(ExprKind::And(Box::new(l), Box::new(r)), start.to(self.prev_span())));
        }
        Ok(l)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let l = self.not_expr()?;
        let neg = match self.peek() {
            Tok::Sym(Sym::Eq) => false,
            Tok::Sym(Sym::Neq) => true,
            _ => return Ok(l),
        };
        self.advance();
        let r = self.not_expr()?;
        let span = start.to(self.prev_span());
        let eq = Expr::at(ExprKind::Eq(Box::new(l), Box::new(r)), span);
        Ok(if neg { Expr::at(ExprKind::Not(Box::new(eq)), span) } else { eq })
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.at_kw(Kw::Not) {
            self.advance();
            let e = self.not_expr()?;
            return Ok(Expr::at(ExprKind::Not(Box::new(e)), start.to(self.prev_span())));
        }
        self.app_expr()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Int(_) | Tok::Kw(Kw::True | Kw::False) | Tok::Sym(Sym::LParen) => true,
            Tok::Upper(c) => self.arities.get(c).copied().unwrap_or(0) == 0,
            _ => false,
        }
    }

    fn app_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let mut head = match self.peek().clone() {
            Tok::Kw(k @ (Kw::Fst | Kw::Snd)) => {
                self.advance();
                let a = self.atom()?;
                Expr::at(
                    ExprKind::Proj(if k == Kw::Fst { 1 } else { 2 }, Box::new(a.0)),
                    start.to(self.prev_span()),
                )
            }
            Tok::Upper(c) if self.arities.get(&c).copied().unwrap_or(0) > 0 => {
                self.advance();
                let arity = self.arities[&c];
                let (arg, tuple) = self.atom()?;
                let span = start.to(self.prev_span());
                let (args, tupled) = match tuple {
                    Some(items) if arity > 1 => (items, true),
                    _ => (vec![arg], false),
                };
                return Ok(Expr::at(ExprKind::Ctor { name: c.into(), args, tupled }, span));
            }
            _ => self.atom()?.0,
        };
        while self.starts_atom() {
            let (a, _) = self.atom()?;
            head = Expr::at(ExprKind::App(Box::new(head), Box::new(a)), start.to(self.prev_span()));
        }
        Ok(head)
    }

    /// Parses an atom. For a parenthesised tuple the components are
    /// returned as well.
    fn atom(&mut self) -> PResult<(Expr, Option<Vec<Expr>>)> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok((Expr::at(ExprKind::Var(s.into()), start), None))
            }
            Tok::Int(n) => {
                self.advance();
                let mut e = Expr::nat_lit(n);
                set_span(&mut e, start);
                Ok((e, None))
            }
            Tok::Kw(k @ (Kw::True | Kw::False)) => {
                self.advance();
                let mut e = Expr::bool_lit(k == Kw::True);
                e.span = start;
                Ok((e, None))
            }
            Tok::Upper(c) => {
                self.advance();
                Ok((
                    Expr::at(ExprKind::Ctor { name: c.into(), args: vec![], tupled: false }, start),
                    None,
                ))
            }
            Tok::Sym(Sym::LParen) => {
                self.advance();
                let mut items = vec![self.expr()?];
                while self.at_sym(Sym::Comma) {
                    self.advance();
                    items.push(self.expr()?);
                }
                self.expect_sym(Sym::RParen)?;
                let span = start.to(self.prev_span());
                if items.len() == 1 {
                    let mut e = items.pop().expect("one item");
                    e.span = span;
                    return Ok((e, None));
                }
                let mut it = items.clone().into_iter().rev();
                let last = it.next().expect("nonempty");
                let pair = it.fold(last, |acc, x| Expr::at(ExprKind::Pair(Box::new(x), Box::new(acc)), span));
                Ok((pair, Some(items)))
            }
            _ => self.unexpected("an expression"),
        }
    }
}

fn set_span(e: &mut Expr, span: Span) {
    e.span = span;
    if let ExprKind::Ctor { args, .. } = &mut e.kind {
        for a in args {
            set_span(a, span);
        }
    }
}

pub fn parse_program(src: &str) -> PResult<ParsedProgram> {
    Parser::new(src)?.program()
}

/// Parses a standalone expression whose constructors come from `types`.
pub fn parse_expr(src: &str, types: &TypeTable) -> PResult<Expr> {
    let mut p = Parser::for_types(src, types)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(e)
}

pub fn parse_interface(src: &str) -> PResult<Interface> {
    Parser::new(src)?.interface()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::pretty;

    fn roundtrip_expr(src: &str) -> String {
        let tt = TypeTable::new();
        pretty::expr(&parse_expr(src, &tt).unwrap())
    }

    #[test]
    fn precedence() {
        assert_eq!(roundtrip_expr("a || b && c = d"), "a || b && c = d");
        assert_eq!(roundtrip_expr("not f x && y"), "not (f x) && y");
        assert_eq!(roundtrip_expr("x <> 1"), "x <> 1");
        assert_eq!(roundtrip_expr("S (S n)"), "S (S n)");
        assert_eq!(roundtrip_expr("(1, true)"), "(1, true)");
    }

    #[test]
    fn literals_desugar_to_peano() {
        let tt = TypeTable::new();
        let e = parse_expr("2", &tt).unwrap();
        assert_eq!(e.size(), 3);
    }

    #[test]
    fn match_arms_and_nesting() {
        let src = "match b with | true -> (match b with | true -> 0 | _ -> 1) | _ -> 2";
        assert_eq!(roundtrip_expr(src), src);
    }

    #[test]
    fn empty_file_is_missing_module() {
        let d = parse_program("").unwrap_err();
        assert_eq!(d.code, Code::MissingModule);
        assert_eq!(d.message, "missing module block");
    }
}
