use std::collections::HashMap;
use std::fmt;

use super::eval::{Compiler, Env, EvalError, Machine, DEFAULT_FUEL};
use super::expr::{Expr, FnDef};
use super::predicate::Predicate;
use super::typeck::{Ctx, TypeError};
use super::types::{Name, Type, TypeTable};
use super::value::Value;

#[derive(Clone, Debug)]
pub enum GlobalDef {
    Fn { def: FnDef, rec: bool },
    Const(Expr),
}

/// A top-level binding. `ty` is the checked type, with the concrete type
/// substituted for `t` in module operations.
#[derive(Clone, Debug)]
pub struct Global {
    pub name: Name,
    pub ty: Type,
    pub def: GlobalDef,
}

/// Where the abstract type occurs in an operation's signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphaPositions {
    /// Indices of curried arguments whose type mentions `t`.
    pub args: Vec<usize>,
    /// Whether the final result type mentions `t`.
    pub result: bool,
}

impl AlphaPositions {
    pub fn of(sig: &Type) -> Self {
        let (args, result) = sig.uncurry();
        AlphaPositions {
            args: args
                .iter()
                .enumerate()
                .filter(|(_, a)| a.contains_abstract())
                .map(|(i, _)| i)
                .collect(),
            result: result.contains_abstract(),
        }
    }
}

impl fmt::Display for AlphaPositions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|i| format!("arg{i}")).collect();
        write!(f, "{}", args.join(","))?;
        match (args.is_empty(), self.result) {
            (false, true) => write!(f, "→result"),
            (true, true) => write!(f, "result"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Op {
    pub name: Name,
    /// Interface type, with `Type::Abstract` for `t`.
    pub sig: Type,
    pub global: u32,
    pub alpha: AlphaPositions,
}

#[derive(Clone, Debug)]
pub struct Module {
    pub name: Name,
    pub concrete: Type,
    pub ops: Vec<Op>,
}

#[derive(Clone, Debug)]
pub struct Spec {
    pub quantifiers: Vec<(Name, Type)>,
    pub body: Expr,
}

#[derive(Debug, thiserror::Error)]
pub enum ProgramError {
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("expected a predicate of type {expected}, found {found}")]
    NotAPredicate { expected: Type, found: Type },
}

/// An elaborated program: data types, prelude and module globals with
/// their runtime values, and the specification.
pub struct Program {
    pub types: TypeTable,
    /// Indices into `types` of the data types declared by the source.
    pub user_types: Vec<usize>,
    pub globals: Vec<Global>,
    pub values: Vec<Value>,
    pub index: HashMap<Name, u32>,
    /// `globals[..prelude_len]` are prelude definitions.
    pub prelude_len: usize,
    pub module: Module,
    pub spec: Spec,
    spec_fn: Value,
    pub fuel: u64,
}

impl std::fmt::Debug for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Program")
            .field("module", &self.module.name)
            .field("concrete", &self.module.concrete)
            .field("ops", &self.module.ops.iter().map(|o| &o.name).collect::<Vec<_>>())
            .field("globals", &self.globals.len())
            .finish()
    }
}

impl Program {
    /// Compiles and evaluates every global in order, then the spec.
    /// The inputs are assumed to have been type checked.
    pub fn assemble(
        types: TypeTable,
        user_types: Vec<usize>,
        globals: Vec<Global>,
        prelude_len: usize,
        module: Module,
        spec: Spec,
    ) -> Result<Program, EvalError> {
        let mut index = HashMap::new();
        let mut values: Vec<Value> = Vec::with_capacity(globals.len());
        for (i, g) in globals.iter().enumerate() {
            index.insert(g.name.clone(), i as u32);
            let compiler = Compiler::new(&types, &index);
            let code = match &g.def {
                GlobalDef::Fn { def, rec } => {
                    let params: Vec<Name> = def.params.iter().map(|(n, _)| n.clone()).collect();
                    let self_name = if *rec { Some(&def.name) } else { None };
                    compiler.compile_fn(self_name, &params, &def.body, &mut Vec::new())?
                }
                GlobalDef::Const(e) => compiler.compile(e)?,
            };
            let v = Machine::new(&values, DEFAULT_FUEL).eval(&code, &Env::empty())?;
            values.push(v);
        }
        let spec_expr = spec
            .quantifiers
            .iter()
            .rev()
            .fold(spec.body.clone(), |acc, (n, t)| {
                Expr::lam(n, t.substitute_abstract(&module.concrete), acc)
            });
        let code = Compiler::new(&types, &index).compile(&spec_expr)?;
        let spec_fn = Machine::new(&values, DEFAULT_FUEL).eval(&code, &Env::empty())?;
        Ok(Program {
            types,
            user_types,
            globals,
            values,
            index,
            prelude_len,
            module,
            spec,
            spec_fn,
            fuel: DEFAULT_FUEL,
        })
    }

    pub fn concrete(&self) -> &Type {
        &self.module.concrete
    }

    pub fn machine(&self) -> Machine<'_> {
        Machine::new(&self.values, self.fuel)
    }

    pub fn op_value(&self, op: &Op) -> &Value {
        &self.values[op.global as usize]
    }

    pub fn global(&self, name: &str) -> Option<(&Global, &Value)> {
        let i = *self.index.get(name)? as usize;
        Some((&self.globals[i], &self.values[i]))
    }

    /// Types of all globals at their concrete types.
    pub fn global_types(&self) -> HashMap<Name, Type> {
        self.globals.iter().map(|g| (g.name.clone(), g.ty.clone())).collect()
    }

    /// Evaluates a closed expression that may mention globals.
    pub fn eval_closed(&self, e: &Expr) -> Result<Value, EvalError> {
        let code = Compiler::new(&self.types, &self.index).compile(e)?;
        self.machine().eval(&code, &Env::empty())
    }

    /// Type checks `e` at `τc -> bool` and evaluates it to a predicate.
    pub fn predicate(&self, e: Expr) -> Result<Predicate, ProgramError> {
        let globals = self.global_types();
        let found = Ctx::new(&self.types, &globals).infer(&e)?;
        let expected = Type::arrow(self.concrete().clone(), Type::bool());
        if found != expected {
            return Err(ProgramError::NotAPredicate { expected, found });
        }
        let closure = self.eval_closed(&e)?;
        Ok(Predicate::new(e, closure))
    }

    /// The spec as a curried function over its quantifiers.
    pub fn spec_fn(&self) -> &Value {
        &self.spec_fn
    }

    pub fn spec_holds(&self, m: &mut Machine<'_>, args: &[Value]) -> Result<bool, EvalError> {
        let r = m.apply_all(&self.spec_fn, args.iter().cloned())?;
        r.as_bool().ok_or(EvalError::TypeConfusion("spec returned a non-boolean"))
    }

    /// Quantifier types with `t` replaced by the concrete type.
    pub fn concrete_quantifiers(&self) -> Vec<Type> {
        self.spec
            .quantifiers
            .iter()
            .map(|(_, t)| t.substitute_abstract(self.concrete()))
            .collect()
    }

    pub fn has_higher_order_ops(&self) -> bool {
        self.module.ops.iter().any(|op| !op.sig.is_first_order())
    }
}
