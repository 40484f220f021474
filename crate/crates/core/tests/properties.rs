use std::collections::BTreeSet;

use proptest::prelude::*;

use repinv::enumerate::Enumerator;
use repinv::frontend::{load, parse_predicate, ElabOptions};
use repinv::induct::{CexReport, Checker};
use repinv::lang::{Program, Relation, Type, Value};
use repinv::stats::RunStats;
use repinv::verify::{default_budget, verify, VerifBudget};

fn listset() -> Program {
    let path = format!("{}/../../benchmarks/listset.inv", env!("CARGO_MANIFEST_DIR"));
    load(&std::fs::read_to_string(path).unwrap(), &ElabOptions::default()).unwrap()
}

fn list() -> Type {
    Type::named("list")
}

/// Nat lists of exactly `size` nodes, counted directly: a nat `n` takes
/// `n + 1` nodes and a cons cell one more than its parts.
fn lists_of_size(size: usize, memo: &mut Vec<Option<u64>>) -> u64 {
    if let Some(c) = memo[size] {
        return c;
    }
    let c = match size {
        0 => 0,
        1 => 1,
        _ => (1..size - 1).map(|head| lists_of_size(size - 1 - head, memo)).sum(),
    };
    memo[size] = Some(c);
    c
}

#[test]
fn enumeration_counts_match_direct_count() {
    let p = listset();
    let en = Enumerator::new(&p.types);
    let mut memo = vec![None; 20];
    for k in 1..16 {
        let expected: u64 = (1..=k).map(|s| lists_of_size(s, &mut memo)).sum();
        assert_eq!(en.values(&list(), k, usize::MAX).count() as u64, expected, "lists up to {k} nodes");
    }
}

const PREDICATES: [&str; 5] = [
    "fun (l : list) -> true",
    "fun (l : list) -> match l with Nil -> true | Cons (h, tl) -> h <> 1",
    "fun (l : list) -> let rec nd (l : list) : bool = match l with \
     | Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd l",
    "fun (l : list) -> match l with Nil -> false | Cons (h, tl) -> true",
    "fun (l : list) -> not (lookup l 2)",
];

#[test]
fn predicates_print_and_reparse() {
    let p = listset();
    for text in PREDICATES {
        let once = parse_predicate(&p, text).unwrap().to_string();
        let twice = parse_predicate(&p, &once).unwrap().to_string();
        assert_eq!(once, twice);
    }
}

fn small_lists() -> Vec<Value> {
    let p = listset();
    Enumerator::new(&p.types).values(&list(), 6, usize::MAX).collect()
}

fn subset(pool: &[Value], mask: u32) -> BTreeSet<Value> {
    pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_is_stable_under_larger_caps(k in 1usize..10, extra in 1usize..5) {
        let p = listset();
        let en = Enumerator::new(&p.types);
        let small: Vec<Value> = en.values(&list(), k, usize::MAX).collect();
        let large: Vec<Value> = en
            .values(&list(), k + extra, usize::MAX)
            .filter(|v| v.size().unwrap() <= k)
            .collect();
        prop_assert_eq!(small, large);
    }

    #[test]
    fn larger_budgets_keep_refutations(which in 0usize..PREDICATES.len(), nodes in 2usize..8, more in 0usize..6) {
        let p = listset();
        let pred = parse_predicate(&p, PREDICATES[which]).unwrap();
        let en = Enumerator::new(&p.types);
        let mut stats = RunStats::default();
        let mut m = p.machine();
        let mut run = |max_nodes| {
            let budget = VerifBudget { max_nodes, ..default_budget(1) };
            verify(&en, &[list()], &budget, &mut stats, |vs| {
                m.refuel();
                pred.test(&mut m, &vs[0])
            })
            .unwrap()
        };
        let small = run(nodes);
        let large = run(nodes + more);
        if let Some(cex) = small.counterexample() {
            prop_assert_eq!(large.counterexample(), Some(cex));
        }
    }

    #[test]
    fn counterexamples_are_well_formed(pmask in any::<u32>(), qmask in any::<u32>(), qpred in any::<bool>()) {
        let p = listset();
        let pool = small_lists();
        let mut c = Checker::new(&p);
        c.budget.total = 500;
        let ps = subset(&pool, pmask);
        let pr = Relation::set(ps.iter().cloned());
        let qr = if qpred {
            Relation::Pred(parse_predicate(&p, PREDICATES[1]).unwrap())
        } else {
            Relation::set(subset(&pool, qmask))
        };
        if let CexReport::Counterexample(cex) = c.cond_inductive(&pr, &qr).unwrap() {
            let mut m = p.machine();
            prop_assert!(!cex.v.is_empty());
            prop_assert!(cex.s.is_subset(&ps));
            for v in &cex.v {
                m.refuel();
                prop_assert!(!m.holds(&qr, v).unwrap());
            }
        }
    }

    #[test]
    fn fewer_inputs_or_more_outputs_stay_valid(pmask in any::<u32>(), drop in any::<u32>(), qmask in any::<u32>(), add in any::<u32>()) {
        let p = listset();
        let pool = small_lists();
        let mut c = Checker::new(&p);
        c.budget.total = 500;
        let ps = subset(&pool, pmask);
        let qs = subset(&pool, qmask | pmask);
        let valid = |ps: &BTreeSet<Value>, qs: &BTreeSet<Value>| {
            c.cond_inductive(&Relation::set(ps.iter().cloned()), &Relation::set(qs.iter().cloned()))
                .unwrap()
                .is_valid()
        };
        if valid(&ps, &qs) {
            prop_assert!(valid(&subset(&pool, pmask & !drop), &qs));
            prop_assert!(valid(&ps, &subset(&pool, qmask | pmask | add)));
        }
    }

    #[test]
    fn elaboration_never_panics_on_mutated_sources(cuts in proptest::collection::vec((any::<usize>(), 0usize..8, "[a-z()|:=>*. \n]{0,4}"), 1..4)) {
        let path = format!("{}/../../benchmarks/heap.inv", env!("CARGO_MANIFEST_DIR"));
        let mut src = std::fs::read_to_string(path).unwrap();
        for (at, len, insert) in cuts {
            let at = at % (src.len() + 1);
            let end = (at + len).min(src.len());
            if src.is_char_boundary(at) && src.is_char_boundary(end) {
                src.replace_range(at..end, &insert);
            }
        }
        if let Err(d) = load(&src, &ElabOptions::default()) {
            prop_assert!(!d.render("mutated", &src).is_empty());
        }
    }

    #[test]
    fn elaboration_never_panics_on_noise(src in "[a-zA-Z0-9()|:=>*.,_ \n-]{0,200}") {
        let _ = load(&src, &ElabOptions { ho: true, ..Default::default() });
    }
}
