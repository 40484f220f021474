use crate::lang::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Upper(String),
    Int(u64),
    Kw(Kw),
    Sym(Sym),
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Type,
    Of,
    Let,
    Rec,
    In,
    Module,
    Struct,
    End,
    Spec,
    Forall,
    Match,
    With,
    Fun,
    If,
    Then,
    Else,
    True,
    False,
    Not,
    Fst,
    Snd,
    Val,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Eq,
    Neq,
    AndAnd,
    OrOr,
    Bar,
    Arrow,
    LParen,
    RParen,
    Comma,
    Colon,
    Star,
    Dot,
    Underscore,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Kw(k) => write!(f, "`{}`", format!("{k:?}").to_lowercase()),
            Tok::Sym(s) => write!(
                f,
                "`{}`",
                match s {
                    Sym::Eq => "=",
                    Sym::Neq => "<>",
                    Sym::AndAnd => "&&",
                    Sym::OrOr => "||",
                    Sym::Bar => "|",
                    Sym::Arrow => "->",
                    Sym::LParen => "(",
                    Sym::RParen => ")",
                    Sym::Comma => ",",
                    Sym::Colon => ":",
                    Sym::Star => "*",
                    Sym::Dot => ".",
                    Sym::Underscore => "_",
                }
            ),
            Tok::Eof => write!(f, "end of file"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "type" => Kw::Type,
        "of" => Kw::Of,
        "let" => Kw::Let,
        "rec" => Kw::Rec,
        "in" => Kw::In,
        "module" => Kw::Module,
        "struct" => Kw::Struct,
        "end" => Kw::End,
        "spec" => Kw::Spec,
        "forall" => Kw::Forall,
        "match" => Kw::Match,
        "with" => Kw::With,
        "fun" => Kw::Fun,
        "if" => Kw::If,
        "then" => Kw::Then,
        "else" => Kw::Else,
        "true" => Kw::True,
        "false" => Kw::False,
        "not" => Kw::Not,
        "fst" => Kw::Fst,
        "snd" => Kw::Snd,
        "val" => Kw::Val,
        _ => return None,
    })
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(LexError {
                        span: Span::new(start, (line, col)),
                        message: "unterminated comment".into(),
                    });
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    bump!();
                    bump!();
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    bump!();
                    bump!();
                    if depth == 0 {
                        break;
                    }
                } else {
                    bump!();
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || (c == '_' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric())) {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                s.push(chars[i]);
                bump!();
            }
            let tok = if let Some(k) = keyword(&s) {
                Tok::Kw(k)
            } else if s.starts_with(|c: char| c.is_ascii_uppercase()) {
                Tok::Upper(s)
            } else {
                Tok::Ident(s)
            };
            toks.push(Token { tok, span: Span::new(start, (line, col)) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i] as u64 - '0' as u64))
                    .ok_or_else(|| LexError {
                        span: Span::new(start, (line, col)),
                        message: "numeric literal too large".into(),
                    })?;
                bump!();
            }
            if n > 10_000 {
                return Err(LexError {
                    span: Span::new(start, (line, col)),
                    message: format!("literal {n} is too large for a Peano natural"),
                });
            }
            toks.push(Token { tok: Tok::Int(n), span: Span::new(start, (line, col)) });
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = match two.as_str() {
            "<>" => Some(Sym::Neq),
            "&&" => Some(Sym::AndAnd),
            "||" => Some(Sym::OrOr),
            "->" => Some(Sym::Arrow),
            _ => None,
        };
        if let Some(s) = sym {
            bump!();
            bump!();
            toks.push(Token { tok: Tok::Sym(s), span: Span::new(start, (line, col)) });
            continue;
        }
        let sym = match c {
            '=' => Sym::Eq,
            '|' => Sym::Bar,
            '(' => Sym::LParen,
            ')' => Sym::RParen,
            ',' => Sym::Comma,
            ':' => Sym::Colon,
            '*' => Sym::Star,
            '.' => Sym::Dot,
            '_' => Sym::Underscore,
            _ => {
                return Err(LexError {
                    span: Span::new(start, (line, col + 1)),
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        bump!();
        toks.push(Token { tok: Tok::Sym(sym), span: Span::new(start, (line, col)) });
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new((line, col), (line, col)) });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_comments() {
        let toks = lex("let (* c (* nested *) *) x <> 12 -> Cons").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Kw(Kw::Let),
                Tok::Ident("x".into()),
                Tok::Sym(Sym::Neq),
                Tok::Int(12),
                Tok::Sym(Sym::Arrow),
                Tok::Upper("Cons".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_are_one_based() {
        let toks = lex("\n  foo").unwrap();
        assert_eq!(toks[0].span, Span::new((2, 3), (2, 6)));
    }

    #[test]
    fn unterminated_comment() {
        assert!(lex("(* never closed").is_err());
    }
}
