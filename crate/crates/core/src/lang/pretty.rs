//! Prints expressions in the surface syntax accepted by the parser.

use super::expr::{Expr, ExprKind, FnDef, Pattern};

const TOP: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const CMP: u8 = 3;
const NOT: u8 = 4;
const APP: u8 = 5;
const ATOM: u8 = 6;

pub fn expr(e: &Expr) -> String {
    let mut out = String::new();
    go(e, TOP, true, &mut out);
    out
}

/// `let rec name (p : T) ... : R = body` without a trailing `in`.
pub fn fn_def(def: &FnDef, rec: bool) -> String {
    let mut out = String::new();
    write_header(def, rec, &mut out);
    go(&def.body, TOP, true, &mut out);
    out
}

fn write_header(def: &FnDef, rec: bool, out: &mut String) {
    out.push_str(if rec { "let rec " } else { "let " });
    out.push_str(&def.name);
    for (p, t) in &def.params {
        out.push_str(&format!(" ({p} : {t})"));
    }
    out.push_str(&format!(" : {} = ", def.ret));
}

fn peano(e: &Expr) -> Option<u64> {
    let mut n = 0;
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Ctor { name, args, .. } if &**name == "Z" && args.is_empty() => return Some(n),
            ExprKind::Ctor { name, args, .. } if &**name == "S" && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            _ => return None,
        }
    }
}

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Var(_) | ExprKind::Pair(..) => ATOM,
        ExprKind::Ctor { args, .. } => {
            if args.is_empty() || peano(e).is_some() {
                ATOM
            } else {
                APP
            }
        }
        ExprKind::App(..) | ExprKind::Proj(..) => APP,
        ExprKind::Not(inner) if matches!(inner.kind, ExprKind::Eq(..)) => CMP,
        ExprKind::Not(_) => NOT,
        ExprKind::Eq(..) => CMP,
        ExprKind::And(..) => AND,
        ExprKind::Or(..) => OR,
        _ => TOP,
    }
}

/// `tail` is false when tokens that do not belong to `e` may follow it
/// (for instance a later match arm), in which case a trailing match must
/// be bracketed.
fn go(e: &Expr, prec: u8, tail: bool, out: &mut String) {
    let needs_parens = level(e) < prec || (matches!(e.kind, ExprKind::Match { .. }) && !tail);
    if needs_parens {
        out.push('(');
        body(e, true, out);
        out.push(')');
    } else {
        body(e, tail, out);
    }
}

fn body(e: &Expr, tail: bool, out: &mut String) {
    match &e.kind {
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Ctor { name, args, .. } => {
            if let Some(n) = peano(e) {
                out.push_str(&n.to_string());
            } else if args.is_empty() {
                match &**name {
                    "True" => out.push_str("true"),
                    "False" => out.push_str("false"),
                    _ => out.push_str(name),
                }
            } else if args.len() == 1 {
                out.push_str(name);
                out.push(' ');
                go(&args[0], ATOM, true, out);
            } else {
                out.push_str(name);
                out.push_str(" (");
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    go(a, TOP, true, out);
                }
                out.push(')');
            }
        }
        ExprKind::Lam { param, ty, body } => {
            out.push_str(&format!("fun ({param} : {ty}) -> "));
            go(body, TOP, tail, out);
        }
        ExprKind::App(f, a) => {
            go(f, APP, true, out);
            out.push(' ');
            go(a, ATOM, true, out);
        }
        ExprKind::Pair(a, b) => {
            out.push('(');
            go(a, TOP, true, out);
            out.push_str(", ");
            go(b, TOP, true, out);
            out.push(')');
        }
        ExprKind::Proj(i, a) => {
            out.push_str(if *i == 1 { "fst " } else { "snd " });
            go(a, ATOM, true, out);
        }
        ExprKind::Match { scrutinee, arms } => {
            out.push_str("match ");
            go(scrutinee, OR, true, out);
            out.push_str(" with");
            for (i, arm) in arms.iter().enumerate() {
                out.push_str(" | ");
                match &arm.pattern {
                    Pattern::Wildcard => out.push('_'),
                    Pattern::Ctor { name, binds } => {
                        match (&**name, binds.len()) {
                            ("True", 0) => out.push_str("true"),
                            ("False", 0) => out.push_str("false"),
                            ("Z", 0) => out.push('0'),
                            _ => out.push_str(name),
                        }
                        match binds.len() {
                            0 => {}
                            1 => {
                                out.push(' ');
                                out.push_str(&binds[0]);
                            }
                            _ => {
                                out.push_str(" (");
                                out.push_str(&binds.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "));
                                out.push(')');
                            }
                        }
                    }
                }
                out.push_str(" -> ");
                let last = i + 1 == arms.len();
                go(&arm.body, TOP, tail && last, out);
            }
        }
        ExprKind::LetRec { def, body } => {
            write_header(def, true, out);
            go(&def.body, TOP, true, out);
            out.push_str(" in ");
            go(body, TOP, tail, out);
        }
        ExprKind::Let { name, value, body } => {
            out.push_str(&format!("let {name} = "));
            go(value, TOP, true, out);
            out.push_str(" in ");
            go(body, TOP, tail, out);
        }
        ExprKind::If { cond, then, els } => {
            out.push_str("if ");
            go(cond, TOP, true, out);
            out.push_str(" then ");
            go(then, TOP, true, out);
            out.push_str(" else ");
            go(els, TOP, tail, out);
        }
        ExprKind::Eq(a, b) => {
            go(a, NOT, true, out);
            out.push_str(" = ");
            go(b, NOT, true, out);
        }
        ExprKind::Not(inner) => match &inner.kind {
            ExprKind::Eq(a, b) => {
                go(a, NOT, true, out);
                out.push_str(" <> ");
                go(b, NOT, true, out);
            }
            _ => {
                out.push_str("not ");
                go(inner, ATOM, true, out);
            }
        },
        ExprKind::And(a, b) => {
            go(a, CMP, true, out);
            out.push_str(" && ");
            go(b, AND, tail, out);
        }
        ExprKind::Or(a, b) => {
            go(a, AND, true, out);
            out.push_str(" || ");
            go(b, OR, tail, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::expr::Arm;
    use crate::lang::types::Type;

    #[test]
    fn literals_and_operators() {
        let e = Expr::and(
            Expr::not(Expr::apps(Expr::var("lookup"), [Expr::var("tl"), Expr::var("hd")])),
            Expr::not(Expr::eq(Expr::var("hd"), Expr::nat_lit(1))),
        );
        assert_eq!(expr(&e), "not (lookup tl hd) && hd <> 1");
        assert_eq!(expr(&Expr::ctor("S", vec![Expr::var("n")])), "S n");
    }

    #[test]
    fn nested_match_is_bracketed() {
        let inner = Expr::new(ExprKind::Match {
            scrutinee: Box::new(Expr::var("b")),
            arms: vec![
                Arm { pattern: Pattern::Ctor { name: "True".into(), binds: vec![] }, body: Expr::nat_lit(0) },
                Arm { pattern: Pattern::Wildcard, body: Expr::nat_lit(1) },
            ],
        });
        let outer = Expr::lam(
            "b",
            Type::bool(),
            Expr::new(ExprKind::Match {
                scrutinee: Box::new(Expr::var("b")),
                arms: vec![
                    Arm { pattern: Pattern::Ctor { name: "False".into(), binds: vec![] }, body: inner },
                    Arm { pattern: Pattern::Wildcard, body: Expr::nat_lit(2) },
                ],
            }),
        );
        assert_eq!(
            expr(&outer),
            "fun (b : bool) -> match b with | false -> (match b with | true -> 0 | _ -> 1) | _ -> 2"
        );
    }
}
