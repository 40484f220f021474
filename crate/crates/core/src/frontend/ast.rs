//! Surface syntax of benchmark files, before elaboration.

use std::fmt;

use crate::lang::pretty;
use crate::lang::{Expr, FnDef, Name, Span, Type};

#[derive(Clone, Debug)]
pub struct TypeDecl {
    pub name: Name,
    pub ctors: Vec<(Name, Vec<Type>)>,
    pub span: Span,
}

/// `let [rec] name (p : T) ... : R = body`. Inside a module `t` is parsed
/// as `Type::Abstract`.
#[derive(Clone, Debug)]
pub struct LetDecl {
    pub rec: bool,
    pub def: FnDef,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum Item {
    Type(TypeDecl),
    Let(LetDecl),
}

#[derive(Clone, Debug)]
pub struct ModuleDecl {
    pub name: Name,
    pub concrete: Type,
    pub lets: Vec<LetDecl>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct SpecDecl {
    pub quantifiers: Vec<(Name, Type)>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct ParsedProgram {
    pub items: Vec<Item>,
    pub module: ModuleDecl,
    pub spec: SpecDecl,
}

/// A named list of operation signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interface {
    pub members: Vec<(Name, Type)>,
}

impl Interface {
    /// The implicit interface of a module: every definition with its
    /// declared type.
    pub fn of_module(m: &ModuleDecl) -> Interface {
        Interface {
            members: m.lets.iter().map(|l| (l.def.name.clone(), l.def.ty())).collect(),
        }
    }
}

impl fmt::Display for TypeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {} =", self.name)?;
        for (i, (c, fields)) in self.ctors.iter().enumerate() {
            write!(f, "{} {c}", if i == 0 { "" } else { " |" })?;
            if !fields.is_empty() {
                let fs: Vec<String> = fields
                    .iter()
                    .map(|t| match t {
                        Type::Product(..) | Type::Arrow(..) => format!("({t})"),
                        _ => t.to_string(),
                    })
                    .collect();
                write!(f, " of {}", fs.join(" * "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for LetDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty::fn_def(&self.def, self.rec))
    }
}

impl fmt::Display for ParsedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Type(t) => writeln!(f, "{t}\n")?,
                Item::Let(l) => writeln!(f, "{l}\n")?,
            }
        }
        writeln!(f, "module {} = struct", self.module.name)?;
        writeln!(f, "  type t = {}", self.module.concrete)?;
        for l in &self.module.lets {
            writeln!(f, "\n  {l}")?;
        }
        writeln!(f, "end\n")?;
        write!(f, "spec forall")?;
        for (n, t) in &self.spec.quantifiers {
            write!(f, " ({n} : {t})")?;
        }
        writeln!(f, " .\n  {}", pretty::expr(&self.spec.body))
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in &self.members {
            writeln!(f, "val {n} : {t}")?;
        }
        Ok(())
    }
}
