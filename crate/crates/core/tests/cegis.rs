use std::collections::BTreeSet;

use repinv::cegis::{infer, CegisError, Engine, EngineConfig, Mode, Outcome, Refuted, Replay};
use repinv::frontend::{load, parse_predicate, ElabOptions};
use repinv::induct::Call;
use repinv::lang::{Predicate, Program, Value};
use repinv::synth::{EnumerativeSynth, TableSynth};

fn src(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../benchmarks/{name}.inv", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn bench(name: &str) -> Program {
    let ho = matches!(name, "fset" | "hoset");
    load(&src(name), &ElabOptions { ho, ..Default::default() }).unwrap()
}

fn pred(p: &Program, text: &str) -> Predicate {
    parse_predicate(p, text).unwrap()
}

fn l(xs: &[u64]) -> Value {
    Value::nat_list(xs)
}

const TRUE: &str = "fun (l : list) -> true";
const HEAD_NOT_ONE: &str = "fun (l : list) -> match l with Nil -> true | Cons (h, tl) -> h <> 1";
const NO_DUP: &str = "fun (l : list) -> let rec nd (l : list) : bool = match l with \
     | Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd l";

#[test]
fn closed_positives_finds_constructible_rejects() {
    let p = bench("listset");
    let synth = EnumerativeSynth::default();
    let mut e = Engine::new(&p, &synth, EngineConfig::default());
    let vplus = BTreeSet::from([l(&[]), l(&[3])]);
    let Refuted::Counterexample { values, cex } = e.closed_positives(&vplus, &pred(&p, HEAD_NOT_ONE)).unwrap() else {
        panic!("expected a counterexample");
    };
    assert!(values.iter().any(|v| v == &l(&[1])));
    let call = cex.unwrap().call.unwrap();
    let mut steps = vec![
        (Call { op: "empty".into(), args: vec![] }, l(&[])),
        (Call { op: "insert".into(), args: vec![l(&[]), Value::nat(3)] }, l(&[3])),
    ];
    for v in &values {
        assert!(!vplus.contains(v));
        steps.push((call.clone(), v.clone()));
    }
    assert!(Replay { steps }.check(&p).unwrap());
}

#[test]
fn closed_positives_valid_cases() {
    let p = bench("listset");
    let synth = EnumerativeSynth::default();
    let mut e = Engine::new(&p, &synth, EngineConfig::default());
    assert!(e.closed_positives(&BTreeSet::new(), &pred(&p, TRUE)).unwrap().is_valid());
    assert!(e.closed_positives(&BTreeSet::from([l(&[])]), &pred(&p, NO_DUP)).unwrap().is_valid());
}

#[test]
fn no_negatives_cases() {
    let p = bench("listset");
    let synth = EnumerativeSynth::default();
    let mut e = Engine::new(&p, &synth, EngineConfig::default());
    // the smallest list with a duplicate under Peano sizes
    let r = e.no_negatives(&pred(&p, TRUE)).unwrap();
    assert_eq!(r.values().unwrap(), &BTreeSet::from([l(&[0, 0])]));
    assert!(e.no_negatives(&pred(&p, NO_DUP)).unwrap().is_valid());

    // with a vacuous spec, only inductiveness can fail
    let vac = src("listset").replace(
        "spec forall (s : t) (i : nat) .\n  not (lookup empty i) && lookup (insert s i) i && not (lookup (delete s i) i)",
        "spec forall (s : t) . true",
    );
    let pv = load(&vac, &ElabOptions::default()).unwrap();
    let mut e = Engine::new(&pv, &synth, EngineConfig::default());
    let r = e.no_negatives(&pred(&pv, HEAD_NOT_ONE)).unwrap();
    let Refuted::Counterexample { values, cex } = r else { panic!() };
    assert_eq!(values, BTreeSet::from([l(&[])]));
    assert_eq!(cex.unwrap().v, BTreeSet::from([l(&[1])]));
}

#[test]
fn listset_infers_no_duplicates() {
    let p = bench("listset");
    let r = infer(&p, &EnumerativeSynth::default(), EngineConfig::default()).unwrap();
    let Outcome::Invariant { invariant, bounded } = &r.outcome else { panic!("{:?}", r.outcome) };
    assert!(bounded);
    assert!(invariant.text().contains("lookup"), "{invariant}");
}

#[test]
fn vacuous_spec_accepts_everything_at_once() {
    let p = bench("vacuous");
    let r = infer(&p, &EnumerativeSynth::default(), EngineConfig::default()).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(r.outcome.predicate().unwrap().text(), "fun (x : list) -> true");
    for mode in [Mode::ConjStr, Mode::La, Mode::OneShot] {
        let cfg = EngineConfig { mode, ..Default::default() };
        let r = infer(&p, &EnumerativeSynth::default(), cfg).unwrap();
        assert_eq!(r.outcome.predicate().unwrap().text(), "fun (x : list) -> true", "{mode:?}");
    }
}

#[test]
fn buggy_set_violation_replays() {
    let p = bench("buggyset");
    let r = infer(&p, &EnumerativeSynth::default(), EngineConfig::default()).unwrap();
    let Outcome::SpecViolation { witnesses, replays } = &r.outcome else { panic!("{:?}", r.outcome) };
    assert!(!witnesses.is_empty());
    for rep in replays {
        assert!(rep.check(&p).unwrap(), "{rep}");
    }
    // delete leaves the element behind
    let mut m = p.machine();
    let delete = p.global("delete").unwrap().1.clone();
    let lookup = p.global("lookup").unwrap().1.clone();
    let d = m.apply_all(&delete, [l(&[1]), Value::nat(1)]).unwrap();
    assert_eq!(m.apply_all(&lookup, [d, Value::nat(1)]).unwrap(), Value::bool(true));
}

#[test]
fn table_synth_finds_reachable_states() {
    let p = bench("toy-cycle");
    let cfg = EngineConfig { debug_rank: true, ..Default::default() };
    let r = infer(&p, &TableSynth, cfg.clone()).unwrap();
    assert_eq!(r.outcome.kind(), "invariant");
    let p = bench("toy-leak");
    let r = infer(&p, &TableSynth, cfg).unwrap();
    assert_eq!(r.outcome.kind(), "spec-violation");
}

#[test]
fn one_shot_needs_one_abstract_quantifier() {
    let p = bench("listset-eset");
    let cfg = EngineConfig { mode: Mode::OneShot, ..Default::default() };
    let err = infer(&p, &EnumerativeSynth::default(), cfg).unwrap_err();
    assert!(matches!(err, CegisError::UnsupportedMode(_)));
}

#[test]
fn comparison_modes_solve_listset() {
    let p = bench("listset");
    let base = infer(&p, &EnumerativeSynth::default(), EngineConfig::default()).unwrap();
    for mode in [Mode::ConjStr, Mode::La] {
        let cfg = EngineConfig { mode, ..Default::default() };
        let r = infer(&p, &EnumerativeSynth::default(), cfg).unwrap();
        let inv = r.outcome.predicate().unwrap().clone();
        let synth = EnumerativeSynth::default();
        let mut e = Engine::new(&p, &synth, EngineConfig::default());
        assert!(e.check(&inv).unwrap().passed(), "{mode:?}: {inv}");
        assert!(r.stats.verify_calls >= base.stats.verify_calls, "{mode:?}");
    }
}

#[test]
fn synthesis_cache_saves_calls() {
    let p = bench("heap");
    let on = infer(&p, &EnumerativeSynth::default(), EngineConfig::default()).unwrap();
    let cfg = EngineConfig { synth_cache: false, ..Default::default() };
    let off = infer(&p, &EnumerativeSynth::default(), cfg).unwrap();
    assert_eq!(on.outcome.kind(), "invariant");
    assert_eq!(off.outcome.kind(), "invariant");
    assert!(on.stats.synth_calls <= off.stats.synth_calls);
}
