use repinv::frontend::{load, parse_interface, Code, ElabOptions};
use repinv::lang::Value;

fn listset_src() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks/listset.inv")).unwrap()
}

#[test]
fn listset_alpha_positions() {
    let p = load(&listset_src(), &ElabOptions::default()).unwrap();
    let pos: Vec<String> = p.module.ops.iter().map(|op| format!("{}({})", op.name, op.alpha)).collect();
    assert_eq!(pos, ["empty(result)", "lookup(arg0)", "insert(arg0→result)", "delete(arg0→result)"]);
}

#[test]
fn listset_eval_examples() {
    let p = load(&listset_src(), &ElabOptions::default()).unwrap();
    let mut m = p.machine();
    let insert = p.global("insert").unwrap().1.clone();
    let out = m.apply_all(&insert, vec![Value::nat_list(&[0]), Value::nat(1)]).unwrap();
    assert_eq!(out, Value::nat_list(&[1, 0]));
    let delete = p.global("delete").unwrap().1.clone();
    let lookup = p.global("lookup").unwrap().1.clone();
    let d = m.apply_all(&delete, vec![Value::nat_list(&[1, 1]), Value::nat(1)]).unwrap();
    assert_eq!(m.apply_all(&lookup, vec![d, Value::nat(1)]).unwrap(), Value::bool(true));
}

#[test]
fn eset_interface_mismatch() {
    let iface = parse_interface(
        "val empty : t\nval insert : t -> nat -> t\nval delete : t -> nat -> t\n\
         val lookup : t -> nat -> bool\nval union : t -> t -> t\nval inter : t -> t -> t",
    )
    .unwrap();
    let opts = ElabOptions { ho: false, interface: Some(iface) };
    let err = load(&listset_src(), &opts).unwrap_err();
    assert_eq!(err.first().code, Code::InterfaceMismatch);
    assert!(err.first().message.contains("union"));
}

#[test]
fn unbound_operation_in_spec() {
    let src = listset_src().replace("lookup (insert s i) i", "lookup (union s s) i");
    let err = load(&src, &ElabOptions::default()).unwrap_err();
    assert_eq!(err.first().code, Code::UnboundOperation);
    assert!(err.to_string().contains("unbound operation `union`"));
}

#[test]
fn empty_file_is_missing_module() {
    let err = load("", &ElabOptions::default()).unwrap_err();
    assert_eq!(err.first().code, Code::MissingModule);
    assert!(err.first().message.contains("missing module block"));
}

const FOLD: &str = "
type list = Nil | Cons of nat * list
module FSet = struct
  type t = list
  let empty : t = Nil
  let rec fold (f : nat -> t -> t) (a : t) (s : t) : t =
    match s with
    | Nil -> a
    | Cons (hd, tl) -> f hd (fold f a tl)
end
spec forall (s : t) . true
";

#[test]
fn fold_needs_higher_order_mode() {
    let err = load(FOLD, &ElabOptions::default()).unwrap_err();
    assert_eq!(err.first().code, Code::InterfaceMismatch);
    let p = load(FOLD, &ElabOptions { ho: true, interface: None }).unwrap();
    assert!(p.has_higher_order_ops());
}

#[test]
fn type_errors_carry_spans() {
    let src = listset_src().replace("then l else", "then x else");
    let err = load(&src, &ElabOptions::default()).unwrap_err();
    assert!(matches!(err.first().code, Code::Type(_)));
    assert!(!err.first().span.is_synthetic());
}
