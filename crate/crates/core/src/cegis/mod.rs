//! The inference loop: alternate synthesis with visible-inductiveness,
//! sufficiency and full-inductiveness checks until a sufficient
//! representation invariant, a constructible spec violation or a synthesis
//! failure comes out.

mod modes;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

pub use trace::{cex_list_filter, TraceEntry};

use crate::induct::{collect_v, Call, Cex, CexReport, Checker, InductBudget};
use crate::lang::{ContractState, EvalError, Expr, Machine, Predicate, Program, Relation, Type, Value};
use crate::stats::RunStats;
use crate::synth::{synth_cached, CandidateCache, ExampleSet, Synthesized, Synthesizer};
use crate::verify::{default_budget, verify, VerifBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Hanoi,
    ConjStr,
    La,
    OneShot,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hanoi => "hanoi",
            Mode::ConjStr => "conjstr",
            Mode::La => "la",
            Mode::OneShot => "oneshot",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hanoi" => Ok(Mode::Hanoi),
            "conjstr" => Ok(Mode::ConjStr),
            "la" => Ok(Mode::La),
            "oneshot" => Ok(Mode::OneShot),
            _ => Err(format!("unknown mode `{s}` (expected hanoi, conjstr, la or oneshot)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub mode: Mode,
    pub synth_cache: bool,
    pub cexlist_cache: bool,
    pub timeout: Option<Duration>,
    /// Overrides the verifier budget derived from the quantifier count.
    pub verify_budget: Option<VerifBudget>,
    pub induct: InductBudget,
    /// Assert that every loop step strictly decreases the rank.
    pub debug_rank: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Hanoi,
            synth_cache: true,
            cexlist_cache: true,
            timeout: Some(Duration::from_secs(1800)),
            verify_budget: None,
            induct: InductBudget::default(),
            debug_rank: false,
        }
    }
}

/// Operation applications that build a value from nothing, innermost
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub steps: Vec<(Call, Value)>,
}

impl fmt::Display for Replay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (call, v)) in self.steps.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{call} ~> {v}")?;
        }
        Ok(())
    }
}

impl Replay {
    /// Re-runs every step and checks that each one produces its value from
    /// values built by earlier steps.
    pub fn check(&self, program: &Program) -> Result<bool, EvalError> {
        let anything = program
            .predicate(Expr::lam("x", program.concrete().clone(), Expr::bool_lit(true)))
            .expect("constant predicate");
        let anything = Relation::Pred(anything);
        let mut built: BTreeSet<Value> = BTreeSet::new();
        for (call, v) in &self.steps {
            let Some(op) = program.module.ops.iter().find(|o| o.name == call.op) else {
                return Ok(false);
            };
            let (params, result) = op.sig.uncurry();
            for (ty, a) in params.iter().zip(&call.args) {
                if !ty.contains_arrow() && !collect_v(ty, a).is_subset(&built) {
                    return Ok(false);
                }
            }
            let state = ContractState::new(anything.clone(), anything.clone());
            let mut m = Machine::with_contract(&program.values, program.fuel, state);
            let f = m.guard(program.op_value(op).clone(), &op.sig, true)?;
            let out = m.apply_all(&f, call.args.iter().cloned())?;
            let log = m.take_contract().map(|s| s.log).unwrap_or_default();
            let seen = collect_v(result, &out).contains(v) || log.iter().any(|c| &c.value == v);
            if !seen {
                return Ok(false);
            }
            built.insert(v.clone());
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Invariant { invariant: Predicate, bounded: bool },
    SpecViolation { witnesses: BTreeSet<Value>, replays: Vec<Replay> },
    SynthFailure(String),
    Timeout,
    /// A predicate returned without any checking (one-shot mode).
    Unchecked(Predicate),
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Invariant { .. } => "invariant",
            Outcome::SpecViolation { .. } => "spec-violation",
            Outcome::SynthFailure(_) => "synth-failure",
            Outcome::Timeout => "timeout",
            Outcome::Unchecked(_) => "unchecked",
        }
    }

    pub fn predicate(&self) -> Option<&Predicate> {
        match self {
            Outcome::Invariant { invariant, .. } => Some(invariant),
            Outcome::Unchecked(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CegisError {
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub stats: RunStats,
    pub elapsed: Duration,
    /// Synthesis rounds.
    pub iterations: usize,
    pub positives: usize,
    pub negatives: usize,
}

/// Values a check wants to move into one of the example sets, with the
/// application that produced them when known.
#[derive(Clone, Debug)]
pub enum Refuted {
    Valid,
    Counterexample { values: BTreeSet<Value>, cex: Option<Cex> },
}

impl Refuted {
    pub fn values(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Refuted::Valid => None,
            Refuted::Counterexample { values, .. } => Some(values),
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Refuted::Valid)
    }
}

/// Results of re-checking a supplied invariant.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub closed: Refuted,
    pub no_negatives: Refuted,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.closed.is_valid() && self.no_negatives.is_valid()
    }
}

/// Loop state shared by all modes.
#[derive(Default)]
struct State {
    pos: BTreeSet<Value>,
    neg: BTreeSet<Value>,
    witnesses: BTreeMap<Value, Call>,
    trace: Vec<TraceEntry>,
    cache: CandidateCache,
    iterations: usize,
    rank: Option<(usize, usize)>,
}

impl State {
    fn examples(&self) -> ExampleSet {
        ExampleSet { pos: self.pos.clone(), neg: self.neg.clone() }
    }

    fn add_positives(&mut self, values: &BTreeSet<Value>, call: Option<&Call>) {
        for v in values {
            if let Some(c) = call {
                self.witnesses.entry(v.clone()).or_insert_with(|| c.clone());
            }
            self.pos.insert(v.clone());
        }
    }
}

pub struct Engine<'p> {
    program: &'p Program,
    config: EngineConfig,
    checker: Checker<'p>,
    synth: &'p dyn Synthesizer,
    stats: RunStats,
    deadline: Option<Instant>,
}

impl<'p> Engine<'p> {
    pub fn new(program: &'p Program, synth: &'p dyn Synthesizer, config: EngineConfig) -> Self {
        let checker = Checker::with_budget(program, config.induct.clone());
        Engine { program, config, checker, synth, stats: RunStats::default(), deadline: None }
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn verify_budget(&self) -> VerifBudget {
        self.config
            .verify_budget
            .unwrap_or_else(|| default_budget(self.program.spec.quantifiers.len().max(1)))
    }

    /// Runs the configured mode from empty example sets.
    pub fn run(&mut self) -> Result<RunReport, CegisError> {
        let start = Instant::now();
        self.deadline = self.config.timeout.map(|t| start + t);
        self.stats = RunStats::default();
        let mut st = State::default();
        let outcome = match self.config.mode {
            Mode::Hanoi => self.hanoi(&mut st)?,
            Mode::ConjStr => self.conj_str(&mut st)?,
            Mode::La => self.la(&mut st)?,
            Mode::OneShot => self.one_shot(&mut st)?,
        };
        Ok(RunReport {
            outcome,
            stats: self.stats.clone(),
            elapsed: start.elapsed(),
            iterations: st.iterations,
            positives: st.pos.len(),
            negatives: st.neg.len(),
        })
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn cond_inductive(&mut self, p: &Relation, q: &Relation) -> Result<CexReport, EvalError> {
        let start = Instant::now();
        let r = self.checker.cond_inductive(p, q);
        self.stats.record_verify(start.elapsed());
        r
    }

    /// Values one step away from `pos` that `i` wrongly rejects.
    pub fn closed_positives(&mut self, pos: &BTreeSet<Value>, i: &Predicate) -> Result<Refuted, EvalError> {
        let p = Relation::Set(pos.clone().into());
        let q = Relation::Pred(i.clone());
        Ok(match self.cond_inductive(&p, &q)? {
            CexReport::Valid => Refuted::Valid,
            CexReport::Counterexample(c) => {
                debug_assert!(c.v.is_disjoint(pos));
                Refuted::Counterexample { values: c.v.clone(), cex: Some(c) }
            }
        })
    }

    /// Values accepted by `i` that break sufficiency, or inputs from which
    /// the module leaves `i`.
    pub fn no_negatives(&mut self, i: &Predicate) -> Result<Refuted, EvalError> {
        if let Some(values) = self.sufficiency(i)? {
            return Ok(Refuted::Counterexample { values, cex: None });
        }
        let rel = Relation::Pred(i.clone());
        Ok(match self.cond_inductive(&rel, &rel)? {
            CexReport::Valid => Refuted::Valid,
            CexReport::Counterexample(c) => Refuted::Counterexample { values: c.s.clone(), cex: Some(c) },
        })
    }

    /// The abstract values of the first spec counterexample among inputs
    /// whose abstract values all satisfy `i`.
    fn sufficiency(&mut self, i: &Predicate) -> Result<Option<BTreeSet<Value>>, EvalError> {
        let program = self.program;
        let declared: Vec<Type> = program.spec.quantifiers.iter().map(|(_, t)| t.clone()).collect();
        let mut m = program.machine();
        if declared.is_empty() {
            let start = Instant::now();
            let ok = program.spec_holds(&mut m, &[])?;
            self.stats.record_verify(start.elapsed());
            return Ok(if ok { None } else { Some(BTreeSet::new()) });
        }
        let quantifiers = program.concrete_quantifiers();
        let budget = self.verify_budget();
        let outcome = verify(self.checker.enumerator(), &quantifiers, &budget, &mut self.stats, |args| {
            m.refuel();
            for (ty, a) in declared.iter().zip(args) {
                for x in collect_v(ty, a) {
                    if !i.test(&mut m, &x)? {
                        return Ok(true);
                    }
                }
            }
            program.spec_holds(&mut m, args)
        })?;
        Ok(outcome.counterexample().map(|args| {
            declared.iter().zip(args).flat_map(|(ty, a)| collect_v(ty, a)).collect()
        }))
    }

    /// Re-checks a supplied invariant: nothing constructible from scratch
    /// in one step is rejected, and it is sufficient and inductive.
    pub fn check(&mut self, i: &Predicate) -> Result<CheckReport, EvalError> {
        let closed = self.closed_positives(&BTreeSet::new(), i)?;
        let no_negatives = self.no_negatives(i)?;
        Ok(CheckReport { closed, no_negatives })
    }

    fn synthesize(&mut self, st: &mut State) -> Synthesized {
        st.iterations += 1;
        let ex = st.examples();
        let cache = if self.config.synth_cache { Some(&mut st.cache) } else { None };
        synth_cached(self.synth, self.program, &ex, cache, &mut self.stats)
    }

    fn replay(&self, st: &State, v: &Value) -> Replay {
        fn go(st: &State, sig_of: &dyn Fn(&Call) -> Vec<Type>, v: &Value, steps: &mut Vec<(Call, Value)>) {
            if steps.iter().any(|(_, w)| w == v) {
                return;
            }
            let Some(call) = st.witnesses.get(v) else { return };
            for (ty, a) in sig_of(call).iter().zip(&call.args) {
                if !ty.contains_arrow() {
                    for x in collect_v(ty, a) {
                        go(st, sig_of, &x, steps);
                    }
                }
            }
            steps.push((call.clone(), v.clone()));
        }
        let sig_of = |c: &Call| -> Vec<Type> {
            self.program
                .module
                .ops
                .iter()
                .find(|o| o.name == c.op)
                .map(|o| o.sig.uncurry().0.into_iter().cloned().collect())
                .unwrap_or_default()
        };
        let mut steps = Vec::new();
        go(st, &sig_of, v, &mut steps);
        Replay { steps }
    }

    fn violation(&self, st: &State, witnesses: BTreeSet<Value>) -> Outcome {
        let replays = witnesses.iter().map(|v| self.replay(st, v)).collect();
        Outcome::SpecViolation { witnesses, replays }
    }

    /// Every step adds positives, or keeps them and adds negatives.
    fn check_rank(&self, st: &mut State) {
        let now = (st.pos.len(), st.neg.len());
        if self.config.debug_rank || cfg!(debug_assertions) {
            if let Some(prev) = st.rank {
                assert!(
                    now.0 > prev.0 || (now.0 == prev.0 && now.1 > prev.1),
                    "rank did not decrease: {prev:?} -> {now:?}"
                );
            }
        }
        st.rank = Some(now);
    }

    fn hanoi(&mut self, st: &mut State) -> Result<Outcome, EvalError> {
        loop {
            if self.timed_out() {
                return Ok(Outcome::Timeout);
            }
            let i = match self.synthesize(st) {
                Synthesized::Failed(msg) => return Ok(Outcome::SynthFailure(msg)),
                Synthesized::Cached(p) | Synthesized::Fresh(p) => p,
            };
            if let Refuted::Counterexample { values, cex } = self.closed_positives(&st.pos.clone(), &i)? {
                let call = cex.as_ref().and_then(|c| c.call.as_ref());
                st.add_positives(&values, call);
                if self.config.cexlist_cache {
                    let mut m = self.program.machine();
                    let (resume, kept) = cex_list_filter(&mut m, &st.trace, &values)?;
                    st.neg = resume.difference(&st.pos).cloned().collect();
                    st.trace = kept;
                } else {
                    st.neg.clear();
                    st.trace.clear();
                }
                self.check_rank(st);
                continue;
            }
            match self.no_negatives(&i)? {
                Refuted::Valid => return Ok(Outcome::Invariant { invariant: i, bounded: true }),
                Refuted::Counterexample { values, .. } => {
                    let fresh: BTreeSet<Value> = values.difference(&st.pos).cloned().collect();
                    if fresh.is_empty() {
                        return Ok(self.violation(st, values));
                    }
                    st.neg.extend(fresh.iter().cloned());
                    st.trace.push(TraceEntry { candidate: i, negatives: fresh });
                    self.check_rank(st);
                }
            }
        }
    }
}

/// Runs inference with the given synthesizer and settings.
pub fn infer(program: &Program, synth: &dyn Synthesizer, config: EngineConfig) -> Result<RunReport, CegisError> {
    Engine::new(program, synth, config).run()
}
