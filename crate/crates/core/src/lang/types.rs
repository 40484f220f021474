use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

/// Object-language types. `Abstract` is the single abstract type of the
/// module interface; it is printed as `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Named(Name),
    Abstract,
    Product(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn named(name: &str) -> Type {
        Type::Named(Arc::from(name))
    }

    pub fn bool() -> Type {
        Type::named(BOOL)
    }

    pub fn nat() -> Type {
        Type::named(NAT)
    }

    pub fn product(a: Type, b: Type) -> Type {
        Type::Product(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// Builds `a1 -> a2 -> ... -> result`.
    pub fn curried(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a, acc))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::Named(n) if &**n == BOOL)
    }

    pub fn contains_abstract(&self) -> bool {
        match self {
            Type::Named(_) => false,
            Type::Abstract => true,
            Type::Product(a, b) | Type::Arrow(a, b) => a.contains_abstract() || b.contains_abstract(),
        }
    }

    pub fn contains_arrow(&self) -> bool {
        match self {
            Type::Named(_) | Type::Abstract => false,
            Type::Arrow(..) => true,
            Type::Product(a, b) => a.contains_arrow() || b.contains_arrow(),
        }
    }

    /// 0-types: built from named types, the abstract type and products.
    pub fn is_zero_type(&self) -> bool {
        !self.contains_arrow()
    }

    /// First-order interface types: `τ ::= σ | σ -> τ | τ * τ`.
    pub fn is_first_order(&self) -> bool {
        match self {
            Type::Named(_) | Type::Abstract => true,
            Type::Product(a, b) => a.is_first_order() && b.is_first_order(),
            Type::Arrow(d, c) => d.is_zero_type() && c.is_first_order(),
        }
    }

    /// `τ[α := concrete]`.
    pub fn substitute_abstract(&self, concrete: &Type) -> Type {
        match self {
            Type::Named(_) => self.clone(),
            Type::Abstract => concrete.clone(),
            Type::Product(a, b) => Type::product(
                a.substitute_abstract(concrete),
                b.substitute_abstract(concrete),
            ),
            Type::Arrow(a, b) => Type::arrow(
                a.substitute_abstract(concrete),
                b.substitute_abstract(concrete),
            ),
        }
    }

    /// Splits `a1 -> ... -> an -> r` into its argument list and final result.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(d, c) = cur {
            args.push(&**d);
            cur = c;
        }
        (args, cur)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Type, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Type::Named(n) => write!(f, "{n}"),
                Type::Abstract => write!(f, "t"),
                Type::Product(a, b) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(a, 2, f)?;
                    write!(f, " * ")?;
                    go(b, 1, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Type::Arrow(a, b) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    write!(f, " -> ")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

pub const BOOL: &str = "bool";
pub const NAT: &str = "nat";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDecl {
    pub name: Name,
    pub fields: Vec<Type>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdtDecl {
    pub name: Name,
    pub ctors: Vec<CtorDecl>,
}

/// Where a constructor lives: the ADT index and the constructor's
/// declaration index inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CtorRef {
    pub adt: usize,
    pub tag: u32,
}

/// All data type declarations visible to a program, including the
/// built-in `bool` and `nat`.
#[derive(Clone, Debug)]
pub struct TypeTable {
    adts: Vec<AdtDecl>,
    by_name: HashMap<Name, usize>,
    ctors: HashMap<Name, CtorRef>,
}

impl Default for TypeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeTable {
    /// A table holding only the built-ins:
    /// `type bool = False | True` and `type nat = Z | S of nat`.
    pub fn new() -> Self {
        let mut table = TypeTable {
            adts: Vec::new(),
            by_name: HashMap::new(),
            ctors: HashMap::new(),
        };
        table
            .declare(AdtDecl {
                name: BOOL.into(),
                ctors: vec![
                    CtorDecl { name: "False".into(), fields: vec![] },
                    CtorDecl { name: "True".into(), fields: vec![] },
                ],
            })
            .expect("builtin");
        table
            .declare(AdtDecl {
                name: NAT.into(),
                ctors: vec![
                    CtorDecl { name: "Z".into(), fields: vec![] },
                    CtorDecl { name: "S".into(), fields: vec![Type::nat()] },
                ],
            })
            .expect("builtin");
        table
    }

    /// Registers a declaration. Fails with the clashing name if the type or
    /// one of its constructors is already declared.
    pub fn declare(&mut self, decl: AdtDecl) -> Result<usize, Name> {
        if self.by_name.contains_key(&decl.name) {
            return Err(decl.name.clone());
        }
        for c in &decl.ctors {
            if self.ctors.contains_key(&c.name) {
                return Err(c.name.clone());
            }
        }
        let idx = self.adts.len();
        self.by_name.insert(decl.name.clone(), idx);
        for (tag, c) in decl.ctors.iter().enumerate() {
            self.ctors.insert(c.name.clone(), CtorRef { adt: idx, tag: tag as u32 });
        }
        self.adts.push(decl);
        Ok(idx)
    }

    pub fn adt(&self, name: &str) -> Option<&AdtDecl> {
        self.by_name.get(name).map(|&i| &self.adts[i])
    }

    pub fn adt_at(&self, idx: usize) -> &AdtDecl {
        &self.adts[idx]
    }

    pub fn adts(&self) -> &[AdtDecl] {
        &self.adts
    }

    pub fn ctor(&self, name: &str) -> Option<(CtorRef, &CtorDecl)> {
        self.ctors
            .get(name)
            .map(|&r| (r, &self.adts[r.adt].ctors[r.tag as usize]))
    }

    /// Is every named type inside `t` declared?
    pub fn resolves(&self, t: &Type) -> Result<(), Name> {
        match t {
            Type::Named(n) => {
                if self.by_name.contains_key(n) {
                    Ok(())
                } else {
                    Err(n.clone())
                }
            }
            Type::Abstract => Ok(()),
            Type::Product(a, b) | Type::Arrow(a, b) => {
                self.resolves(a)?;
                self.resolves(b)
            }
        }
    }

    /// Smallest value size of a closed 0-type, or `None` when uninhabited.
    pub fn min_size(&self, t: &Type) -> Option<usize> {
        let sizes = self.adt_min_sizes();
        self.min_size_with(t, &sizes)
    }

    fn min_size_with(&self, t: &Type, sizes: &[Option<usize>]) -> Option<usize> {
        match t {
            Type::Named(n) => sizes[*self.by_name.get(n)?],
            Type::Product(a, b) => {
                Some(1 + self.min_size_with(a, sizes)? + self.min_size_with(b, sizes)?)
            }
            Type::Abstract | Type::Arrow(..) => None,
        }
    }

    /// Least fixpoint of per-ADT minimal value sizes.
    pub fn adt_min_sizes(&self) -> Vec<Option<usize>> {
        let mut sizes: Vec<Option<usize>> = vec![None; self.adts.len()];
        loop {
            let mut changed = false;
            for (i, adt) in self.adts.iter().enumerate() {
                let best = adt
                    .ctors
                    .iter()
                    .filter_map(|c| {
                        c.fields
                            .iter()
                            .map(|f| self.min_size_with(f, &sizes))
                            .sum::<Option<usize>>()
                            .map(|s| s + 1)
                    })
                    .min();
                if best.is_some() && (sizes[i].is_none() || best < sizes[i]) {
                    sizes[i] = best;
                    changed = true;
                }
            }
            if !changed {
                return sizes;
            }
        }
    }
}
