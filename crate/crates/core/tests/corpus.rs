use std::path::PathBuf;

use repinv::bench::{measure, write_csv, Corpus, Row};
use repinv::cegis::{EngineConfig, Mode};
use repinv::frontend::parse_predicate;
use repinv::synth::EnumerativeSynth;

fn corpus() -> Corpus {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "benchmarks", "corpus.toml"].iter().collect();
    Corpus::load(&path).unwrap()
}

#[test]
fn every_entry_elaborates() {
    let c = corpus();
    assert!(c.entries.len() >= 10);
    for e in &c.entries {
        let p = c.program(e).unwrap_or_else(|msg| panic!("{msg}"));
        assert!(matches!(e.expect.as_str(), "invariant" | "spec-violation"), "{}", e.name);
        if let Some(oracle) = &e.oracle {
            parse_predicate(&p, oracle).unwrap();
        }
    }
}

#[test]
fn csv_header_is_frozen() {
    let mut out = Vec::new();
    write_csv(&[], &mut out).unwrap();
    assert_eq!(out, b"Name,Size,Time,TVT,TVC,MVT,TST,TSC,MST,Outcome,Mode\n");
}

fn untimed(r: &Row) -> (String, Option<usize>, f64, f64, String, String) {
    (r.name.clone(), r.size, r.tvc, r.tsc, r.outcome.clone(), r.mode.clone())
}

#[test]
fn rows_are_deterministic_apart_from_timings() {
    let c = corpus();
    let synth = EnumerativeSynth::default();
    for name in ["listset", "buggyset", "toy-cycle"] {
        let e = c.entries.iter().find(|e| e.name == name).unwrap();
        let p = c.program(e).unwrap();
        for mode in [Mode::Hanoi, Mode::La] {
            let cfg = EngineConfig { mode, ..Default::default() };
            let a = Row::from_runs(name, mode.name(), &measure(&p, &synth, &cfg, 2).unwrap());
            let b = Row::from_runs(name, mode.name(), &measure(&p, &synth, &cfg, 1).unwrap());
            assert_eq!(untimed(&a), untimed(&b));
            assert!((a.mvt * a.tvc - a.tvt).abs() < 1e-9);
            assert!((a.mst * a.tsc - a.tst).abs() < 1e-9);
        }
    }
}

#[test]
fn timeouts_taint_the_whole_row() {
    let c = corpus();
    let e = c.entries.iter().find(|e| e.name == "listset").unwrap();
    let p = c.program(e).unwrap();
    let synth = EnumerativeSynth::default();
    let cfg = EngineConfig { timeout: Some(std::time::Duration::ZERO), ..Default::default() };
    let runs = measure(&p, &synth, &cfg, 3).unwrap();
    assert_eq!(runs.len(), 1);
    let row = Row::from_runs("listset", "hanoi", &runs);
    assert_eq!(row.outcome, "timeout");
    assert_eq!(row.size, None);
}
