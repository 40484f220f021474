use repinv::frontend::{load, ElabOptions};
use repinv::lang::{Program, Value};
use repinv::synth::{
    synth_cached, CandidateCache, EnumerativeSynth, ExampleSet, SynthResult, Synthesized, Synthesizer, TableSynth,
};
use repinv::stats::RunStats;

fn listset() -> Program {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks/listset.inv")).unwrap();
    load(&src, &ElabOptions::default()).unwrap()
}

fn l(xs: &[u64]) -> Value {
    Value::nat_list(xs)
}

fn first(r: SynthResult) -> repinv::lang::Predicate {
    match r {
        SynthResult::Success(ps) => ps[0].clone(),
        SynthResult::Failure(m) => panic!("synthesis failed: {m}"),
    }
}

#[test]
fn no_examples_gives_true() {
    let p = listset();
    let pred = first(EnumerativeSynth::default().synthesize(&p, &ExampleSet::default()));
    assert_eq!(pred.text(), "fun (x : list) -> true");
}

#[test]
fn head_test_separates() {
    let p = listset();
    let ex = ExampleSet::new([l(&[]), l(&[3])], [l(&[1, 1])]);
    let r = EnumerativeSynth::default().synthesize(&p, &ex);
    let SynthResult::Success(ps) = r else { panic!("expected success") };
    for pred in &ps {
        assert!(ex.admits(&p, pred), "{pred}");
    }
}

#[test]
fn overlap_fails() {
    let p = listset();
    let ex = ExampleSet::new([l(&[2])], [l(&[2])]);
    assert!(matches!(EnumerativeSynth::default().synthesize(&p, &ex), SynthResult::Failure(_)));
    assert!(matches!(TableSynth.synthesize(&p, &ex), SynthResult::Failure(_)));
}

#[test]
fn finds_no_duplicates() {
    let p = listset();
    let ex = ExampleSet::new(
        [l(&[]), l(&[0]), l(&[1]), l(&[2]), l(&[1, 0]), l(&[0, 1]), l(&[2, 1, 0])],
        [l(&[0, 0]), l(&[1, 1]), l(&[1, 0, 1]), l(&[0, 1, 0])],
    );
    let pred = first(EnumerativeSynth::default().synthesize(&p, &ex));
    assert!(ex.admits(&p, &pred));
    assert!(pred.text().contains("lookup"), "{pred}");
}

#[test]
fn table_synth_is_weakest() {
    let p = listset();
    let ex = ExampleSet::new([l(&[])], [l(&[1, 1]), l(&[0])]);
    let pred = first(TableSynth.synthesize(&p, &ex));
    assert!(ex.admits(&p, &pred));
    let mut m = p.machine();
    assert!(pred.test(&mut m, &l(&[5, 5])).unwrap());
}

#[test]
fn cache_hits_skip_synthesis() {
    let p = listset();
    let synth = EnumerativeSynth::default();
    let mut cache = CandidateCache::new();
    let mut stats = RunStats::default();
    let ex = ExampleSet::default();
    assert!(matches!(synth_cached(&synth, &p, &ex, Some(&mut cache), &mut stats), Synthesized::Fresh(_)));
    assert_eq!(stats.synth_calls, 1);
    let ex = ExampleSet::new([l(&[])], []);
    match synth_cached(&synth, &p, &ex, Some(&mut cache), &mut stats) {
        Synthesized::Cached(pred) => assert_eq!(pred.text(), "fun (x : list) -> true"),
        other => panic!("expected a cache hit, got {other:?}"),
    }
    assert_eq!(stats.synth_calls, 1);
    let ex = ExampleSet::new([], [l(&[1, 1])]);
    assert!(cache.lookup(&p, &ex).is_none_or(|pred| pred.text() != "fun (x : list) -> true"));
}

