//! Random finite-state modules with brute-force answers, shared by the
//! toy suite and the acceptance runner.

#![allow(dead_code)]

use std::fmt::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use repinv::cegis::{infer, EngineConfig, Outcome};
use repinv::frontend::{load, ElabOptions};
use repinv::lang::Value;
use repinv::synth::TableSynth;

pub struct Toy {
    pub n: usize,
    pub starts: Vec<usize>,
    /// Unary operations as successor tables.
    pub steps: Vec<Vec<usize>>,
    /// A binary operation, `join[a][b]`.
    pub join: Option<Vec<Vec<usize>>>,
    /// An operation taking a flag: `flip[b][s]`.
    pub flip: Option<[Vec<usize>; 2]>,
    pub good: Vec<bool>,
}

impl Toy {
    pub fn random(seed: u64) -> Toy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let has_join = rng.gen_bool(0.3);
        let n = if has_join { rng.gen_range(2..=6) } else { rng.gen_range(2..=12) };
        let table = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
        let starts = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect();
        let steps = (0..rng.gen_range(1..=2)).map(|_| table(&mut rng)).collect();
        let join = has_join.then(|| (0..n).map(|_| table(&mut rng)).collect());
        let flip = rng.gen_bool(0.3).then(|| [table(&mut rng), table(&mut rng)]);
        let bad_rate = rng.gen_range(0.05..0.4);
        let good = (0..n).map(|_| !rng.gen_bool(bad_rate)).collect();
        Toy { n, starts, steps, join, flip, good }
    }

    fn arms(out: &mut String, scrutinee: &str, table: &[usize]) {
        write!(out, "match {scrutinee} with").unwrap();
        for (s, t) in table.iter().enumerate() {
            write!(out, " | S{s} -> S{t}").unwrap();
        }
    }

    pub fn source(&self) -> String {
        let mut out = String::from("type state =");
        for s in 0..self.n {
            write!(out, "{} S{s}", if s == 0 { "" } else { " |" }).unwrap();
        }
        out.push_str("\n\nmodule Toy = struct\n  type t = state\n");
        for (i, s) in self.starts.iter().enumerate() {
            writeln!(out, "  let start{i} : t = S{s}").unwrap();
        }
        for (i, table) in self.steps.iter().enumerate() {
            write!(out, "  let step{i} (s : t) : t = ").unwrap();
            Self::arms(&mut out, "s", table);
            out.push('\n');
        }
        if let Some(join) = &self.join {
            out.push_str("  let join (a : t) (b : t) : t = match a with");
            for (a, row) in join.iter().enumerate() {
                write!(out, " | S{a} -> (").unwrap();
                Self::arms(&mut out, "b", row);
                out.push(')');
            }
            out.push('\n');
        }
        if let Some([off, on]) = &self.flip {
            out.push_str("  let flip (s : t) (b : bool) : t = if b then (");
            Self::arms(&mut out, "s", on);
            out.push_str(") else (");
            Self::arms(&mut out, "s", off);
            out.push_str(")\n");
        }
        out.push_str("  let ok (s : t) : bool = match s with");
        for (s, g) in self.good.iter().enumerate() {
            write!(out, " | S{s} -> {g}").unwrap();
        }
        out.push_str("\nend\n\nspec forall (s : t) . ok s\n");
        out
    }

    fn closed(&self, member: impl Fn(usize) -> bool) -> bool {
        let states = || (0..self.n).filter(|&s| member(s));
        self.starts.iter().all(|&s| member(s))
            && self.steps.iter().all(|t| states().all(|s| member(t[s])))
            && self.join.as_ref().is_none_or(|j| states().all(|a| states().all(|b| member(j[a][b]))))
            && self.flip.as_ref().is_none_or(|f| f.iter().all(|t| states().all(|s| member(t[s]))))
    }

    /// Whether some set of states contains the starts, is closed under
    /// every operation and holds only good states, by trying all subsets.
    pub fn has_invariant(&self) -> bool {
        (0u64..1 << self.n).any(|mask| {
            let member = |s: usize| mask >> s & 1 == 1;
            (0..self.n).all(|s| !member(s) || self.good[s]) && self.closed(member)
        })
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        for &s in &self.starts {
            seen[s] = true;
        }
        loop {
            let mut next = seen.clone();
            let live: Vec<usize> = (0..self.n).filter(|&s| seen[s]).collect();
            for &s in &live {
                for t in &self.steps {
                    next[t[s]] = true;
                }
                if let Some(f) = &self.flip {
                    next[f[0][s]] = true;
                    next[f[1][s]] = true;
                }
                if let Some(j) = &self.join {
                    for &b in &live {
                        next[j[s][b]] = true;
                    }
                }
            }
            if next == seen {
                return seen;
            }
            seen = next;
        }
    }
}

pub fn state(s: usize) -> Value {
    Value::ctor(format!("S{s}").as_str().into(), s as u32, vec![])
}

fn index(v: &Value) -> usize {
    v.to_string().trim_start_matches('S').parse().expect("a toy state")
}

/// Runs hanoi on the toy and compares against the brute-force answers.
pub fn check_toy(seed: u64) -> Result<(), String> {
    let toy = Toy::random(seed);
    let src = toy.source();
    let program = load(&src, &ElabOptions::default()).map_err(|d| d.render("toy", &src))?;
    let cfg = EngineConfig { debug_rank: true, ..Default::default() };
    let report = infer(&program, &TableSynth, cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    let reach = toy.reachable();
    let expect_violation = (0..toy.n).any(|s| reach[s] && !toy.good[s]);
    let expect_invariant = toy.has_invariant();
    if expect_violation == expect_invariant {
        return Err(format!("seed {seed}: the two oracles disagree"));
    }
    match &report.outcome {
        Outcome::Invariant { invariant, .. } if expect_invariant => {
            let mut m = program.machine();
            let mut accepts = Vec::new();
            for s in 0..toy.n {
                m.refuel();
                accepts.push(invariant.test(&mut m, &state(s)).map_err(|e| e.to_string())?);
            }
            let sound = (0..toy.n).all(|s| !accepts[s] || toy.good[s]) && toy.closed(|s| accepts[s]);
            if sound {
                Ok(())
            } else {
                Err(format!("seed {seed}: returned {invariant} is not an invariant\n{src}"))
            }
        }
        Outcome::SpecViolation { witnesses, .. } if expect_violation => {
            if witnesses.is_empty() || witnesses.iter().map(index).any(|s| !reach[s] || toy.good[s]) {
                Err(format!("seed {seed}: bad witnesses {witnesses:?}"))
            } else {
                Ok(())
            }
        }
        other => Err(format!(
            "seed {seed}: got {}, expected {}\n{src}",
            other.kind(),
            if expect_invariant { "invariant" } else { "spec-violation" }
        )),
    }
}
