use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::eval::{Code, Env};
use super::types::{Name, Type};

/// Runtime values. First-order values (constructor trees and pairs) carry
/// their node count; closures and contract-monitored functions do not have
/// a size.
#[derive(Clone)]
pub enum Value {
    Ctor(Arc<CtorValue>),
    Pair(Arc<PairValue>),
    Closure(Arc<Closure>),
    Monitored(Arc<Monitored>),
}

pub struct CtorValue {
    pub name: Name,
    pub tag: u32,
    pub args: Vec<Value>,
    size: u32,
}

pub struct PairValue {
    pub left: Value,
    pub right: Value,
    size: u32,
}

pub struct Closure {
    pub body: Arc<Code>,
    pub env: Env,
    /// Recursive closures see themselves at de Bruijn index 1.
    pub recursive: bool,
    /// Source text, kept for printing counterexamples that contain functions.
    pub source: Option<Arc<str>>,
}

/// A function wrapped in a higher-order contract. `positive` is true when
/// the function was supplied by the module: its abstract-typed results are
/// then checked against Q and its abstract-typed arguments against P.
pub struct Monitored {
    pub inner: Value,
    pub domain: Type,
    pub codomain: Type,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("closures have no size")]
pub struct SizeOfClosure;

impl Value {
    pub fn ctor(name: Name, tag: u32, args: Vec<Value>) -> Value {
        let mut size = 1u32;
        for a in &args {
            size = size.saturating_add(a.raw_size());
        }
        Value::Ctor(Arc::new(CtorValue { name, tag, args, size }))
    }

    pub fn pair(left: Value, right: Value) -> Value {
        let size = 1u32
            .saturating_add(left.raw_size())
            .saturating_add(right.raw_size());
        Value::Pair(Arc::new(PairValue { left, right, size }))
    }

    pub fn bool(b: bool) -> Value {
        Value::ctor(if b { "True".into() } else { "False".into() }, b as u32, vec![])
    }

    pub fn nat(n: u64) -> Value {
        let z: Name = "Z".into();
        let s: Name = "S".into();
        (0..n).fold(Value::ctor(z, 0, vec![]), |acc, _| Value::ctor(s.clone(), 1, vec![acc]))
    }

    /// Builds a `Nil`/`Cons` list of naturals, head first.
    pub fn nat_list(items: &[u64]) -> Value {
        Value::list_of(items.iter().map(|&n| Value::nat(n)).collect())
    }

    pub fn list_of(items: Vec<Value>) -> Value {
        let nil = Value::ctor("Nil".into(), 0, vec![]);
        let cons: Name = "Cons".into();
        items
            .into_iter()
            .rev()
            .fold(nil, |acc, x| Value::ctor(cons.clone(), 1, vec![x, acc]))
    }

    fn raw_size(&self) -> u32 {
        match self {
            Value::Ctor(c) => c.size,
            Value::Pair(p) => p.size,
            Value::Closure(_) | Value::Monitored(_) => 0,
        }
    }

    /// Node count: one per constructor or pair node, summed over children.
    pub fn size(&self) -> Result<usize, SizeOfClosure> {
        if self.is_first_order() {
            Ok(self.raw_size() as usize)
        } else {
            Err(SizeOfClosure)
        }
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Value::Ctor(c) => c.args.iter().all(Value::is_first_order),
            Value::Pair(p) => p.left.is_first_order() && p.right.is_first_order(),
            Value::Closure(_) | Value::Monitored(_) => false,
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self, Value::Closure(_) | Value::Monitored(_))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Ctor(c) if c.args.is_empty() && &*c.name == "True" => Some(true),
            Value::Ctor(c) if c.args.is_empty() && &*c.name == "False" => Some(false),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        let mut n = 0;
        let mut cur = self;
        loop {
            match cur {
                Value::Ctor(c) if &*c.name == "Z" && c.args.is_empty() => return Some(n),
                Value::Ctor(c) if &*c.name == "S" && c.args.len() == 1 => {
                    n += 1;
                    cur = &c.args[0];
                }
                _ => return None,
            }
        }
    }

    /// Structural equality; `None` when a function is reached.
    pub fn structural_eq(&self, other: &Value) -> Option<bool> {
        match (self, other) {
            (Value::Ctor(a), Value::Ctor(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Some(true);
                }
                if a.tag != b.tag || a.name != b.name || a.args.len() != b.args.len() {
                    return Some(false);
                }
                for (x, y) in a.args.iter().zip(&b.args) {
                    if !x.structural_eq(y)? {
                        return Some(false);
                    }
                }
                Some(true)
            }
            (Value::Pair(a), Value::Pair(b)) => {
                Some(a.left.structural_eq(&b.left)? && a.right.structural_eq(&b.right)?)
            }
            (Value::Closure(_) | Value::Monitored(_), _) | (_, Value::Closure(_) | Value::Monitored(_)) => None,
            _ => Some(false),
        }
    }

    /// Immediate children of a first-order value.
    pub fn children(&self) -> &[Value] {
        match self {
            Value::Ctor(c) => &c.args,
            _ => &[],
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            Value::Ctor(_) => 0,
            Value::Pair(_) => 1,
            Value::Closure(_) => 2,
            Value::Monitored(_) => 3,
        }
    }

    fn ptr(&self) -> usize {
        match self {
            Value::Ctor(c) => Arc::as_ptr(c) as *const u8 as usize,
            Value::Pair(p) => Arc::as_ptr(p) as *const u8 as usize,
            Value::Closure(c) => Arc::as_ptr(c) as *const u8 as usize,
            Value::Monitored(m) => Arc::as_ptr(m) as *const u8 as usize,
        }
    }
}

/// Values are ordered by size, then constructor declaration index, then
/// children left to right. This is the enumeration order, so sorted sets of
/// values list smaller values first. Functions compare by identity.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr() == other.ptr() {
            return Ordering::Equal;
        }
        self.raw_size()
            .cmp(&other.raw_size())
            .then_with(|| self.variant_rank().cmp(&other.variant_rank()))
            .then_with(|| match (self, other) {
                (Value::Ctor(a), Value::Ctor(b)) => a
                    .tag
                    .cmp(&b.tag)
                    .then_with(|| a.name.cmp(&b.name))
                    .then_with(|| a.args.cmp(&b.args)),
                (Value::Pair(a), Value::Pair(b)) => a
                    .left
                    .cmp(&b.left)
                    .then_with(|| a.right.cmp(&b.right)),
                _ => self.ptr().cmp(&other.ptr()),
            })
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Ctor(c) => {
                0u8.hash(state);
                c.tag.hash(state);
                c.name.hash(state);
                for a in &c.args {
                    a.hash(state);
                }
            }
            Value::Pair(p) => {
                1u8.hash(state);
                p.left.hash(state);
                p.right.hash(state);
            }
            Value::Closure(_) | Value::Monitored(_) => {
                2u8.hash(state);
                self.ptr().hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self, false, f)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self, false, f)
    }
}

fn list_items(v: &Value) -> Option<Vec<&Value>> {
    let mut items = Vec::new();
    let mut cur = v;
    loop {
        match cur {
            Value::Ctor(c) if &*c.name == "Nil" && c.args.is_empty() => return Some(items),
            Value::Ctor(c) if &*c.name == "Cons" && c.args.len() == 2 => {
                items.push(&c.args[0]);
                cur = &c.args[1];
            }
            _ => return None,
        }
    }
}

fn fmt_value(v: &Value, nested: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if let Some(n) = v.as_nat() {
        return write!(f, "{n}");
    }
    if let Some(b) = v.as_bool() {
        return write!(f, "{}", if b { "true" } else { "false" });
    }
    if let Some(items) = list_items(v) {
        write!(f, "[")?;
        for (i, x) in items.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            fmt_value(x, false, f)?;
        }
        return write!(f, "]");
    }
    match v {
        Value::Ctor(c) => {
            if c.args.is_empty() {
                return write!(f, "{}", c.name);
            }
            if nested {
                write!(f, "(")?;
            }
            write!(f, "{}", c.name)?;
            if c.args.len() == 1 {
                write!(f, " ")?;
                fmt_value(&c.args[0], true, f)?;
            } else {
                write!(f, " (")?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    fmt_value(a, false, f)?;
                }
                write!(f, ")")?;
            }
            if nested {
                write!(f, ")")?;
            }
            Ok(())
        }
        Value::Pair(p) => {
            write!(f, "(")?;
            fmt_value(&p.left, false, f)?;
            write!(f, ", ")?;
            fmt_value(&p.right, false, f)?;
            write!(f, ")")
        }
        Value::Closure(c) => match &c.source {
            Some(src) => write!(f, "({src})"),
            None => write!(f, "<fun>"),
        },
        Value::Monitored(m) => {
            write!(f, "<contract ")?;
            fmt_value(&m.inner, false, f)?;
            write!(f, ">")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Value::nat_list(&[]).size(), Ok(1));
        // Cons(S(Z), Cons(S(Z), Nil)): 2 Cons + 2 S + 2 Z + Nil
        assert_eq!(Value::nat_list(&[1, 1]).size(), Ok(7));
        assert_eq!(Value::pair(Value::nat(0), Value::nat_list(&[])).size(), Ok(3));
    }

    #[test]
    fn display() {
        assert_eq!(Value::nat_list(&[1, 0]).to_string(), "[1; 0]");
        assert_eq!(Value::pair(Value::nat(2), Value::bool(true)).to_string(), "(2, true)");
    }

    #[test]
    fn order_is_size_first() {
        assert!(Value::nat_list(&[5]) < Value::nat_list(&[0, 0, 0, 0]));
        // equal sizes: the smaller head wins
        assert!(Value::nat_list(&[0, 0]) < Value::nat_list(&[2]));
    }
}
