use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use repinv::bench::{measure, write_csv, Corpus, Row};
use repinv::cegis::{CegisError, Engine, EngineConfig, Mode, Outcome, Refuted, RunReport};
use repinv::frontend::{load, parse_predicate, ElabOptions};
use repinv::lang::Program;
use repinv::synth::{EnumerativeSynth, SynthConfig, Synthesizer, TableSynth};
use repinv::verify::default_budget;

const STACK: usize = 512 << 20;

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_SYNTH_FAILURE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_CHECK_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "repinv", version, about = "Infer representation invariants for modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer an invariant for one benchmark file.
    Infer {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Hanoi)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Also write a measurement row to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every benchmark of a corpus manifest and emit a CSV table.
    Bench {
        #[arg(default_value = "benchmarks/corpus.toml")]
        corpus: PathBuf,
        /// Modes to run; repeat the flag for several. Defaults to all.
        #[arg(long, value_enum)]
        mode: Vec<ModeArg>,
        #[arg(long, default_value_t = 10)]
        repeat: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Benchmark rows run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-check a supplied invariant. Exits 0 iff it passes.
    Check {
        file: PathBuf,
        invariant: String,
        #[arg(long)]
        ho: bool,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Hanoi,
    Conjstr,
    La,
    Oneshot,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Hanoi => Mode::Hanoi,
            ModeArg::Conjstr => Mode::ConjStr,
            ModeArg::La => Mode::La,
            ModeArg::Oneshot => Mode::OneShot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthArg {
    Enumerative,
    /// Exhaustive tables; only sensible for finite concrete types.
    Table,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Per-run timeout in seconds; 0 disables it.
    #[arg(long, default_value_t = 1800)]
    timeout: u64,
    #[arg(long)]
    no_synth_cache: bool,
    #[arg(long)]
    no_cexlist_cache: bool,
    /// Accept higher-order operations and check them through contracts.
    #[arg(long)]
    ho: bool,
    /// Assert that the loop's rank decreases on every step.
    #[arg(long)]
    debug_rank: bool,
    #[arg(long, value_enum, default_value_t = SynthArg::Enumerative)]
    synth: SynthArg,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args, Clone, Default)]
struct BudgetArgs {
    /// Largest value, in nodes, the verifier tries.
    #[arg(long)]
    budget_verify_nodes: Option<usize>,
    /// Values the verifier tries per quantifier.
    #[arg(long)]
    budget_verify_count: Option<usize>,
    /// Tuples the verifier evaluates in total.
    #[arg(long)]
    budget_verify_total: Option<usize>,
    /// Node cap for an operation's only abstract argument.
    #[arg(long)]
    budget_abstract_nodes: Option<usize>,
    /// Node cap for abstract arguments when there are several.
    #[arg(long)]
    budget_abstract_nodes_multi: Option<usize>,
    #[arg(long)]
    budget_abstract_count: Option<usize>,
    #[arg(long)]
    budget_base_nodes: Option<usize>,
    #[arg(long)]
    budget_base_count: Option<usize>,
    /// Applications tried per operation.
    #[arg(long)]
    budget_apps: Option<usize>,
    /// Largest body of an enumerated function argument.
    #[arg(long)]
    budget_fn_size: Option<usize>,
    #[arg(long)]
    budget_fn_count: Option<usize>,
    /// Largest candidate the synthesizer builds.
    #[arg(long)]
    budget_synth_size: Option<usize>,
    #[arg(long)]
    budget_synth_work: Option<usize>,
}

impl BudgetArgs {
    fn apply(&self, program: &Program, config: &mut EngineConfig) {
        if self.budget_verify_nodes.is_some() || self.budget_verify_count.is_some() || self.budget_verify_total.is_some()
        {
            let mut b = default_budget(program.spec.quantifiers.len().max(1));
            set(&mut b.max_nodes, self.budget_verify_nodes);
            set(&mut b.per_quantifier, self.budget_verify_count);
            set(&mut b.total, self.budget_verify_total);
            config.verify_budget = Some(b);
        }
        let ib = &mut config.induct;
        set(&mut ib.abstract_nodes_single, self.budget_abstract_nodes);
        set(&mut ib.abstract_nodes_multi, self.budget_abstract_nodes_multi);
        set(&mut ib.abstract_count, self.budget_abstract_count);
        set(&mut ib.base_nodes, self.budget_base_nodes);
        set(&mut ib.base_count, self.budget_base_count);
        set(&mut ib.total, self.budget_apps);
        set(&mut ib.functions.depth, self.budget_fn_size);
        set(&mut ib.functions.max_count, self.budget_fn_count);
    }

    fn synth_config(&self) -> SynthConfig {
        let mut c = SynthConfig::default();
        set(&mut c.max_size, self.budget_synth_size);
        set(&mut c.work_limit, self.budget_synth_work);
        c
    }
}

fn set(slot: &mut usize, v: Option<usize>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl RunArgs {
    fn config(&self, program: &Program, mode: Mode) -> EngineConfig {
        let mut c = EngineConfig {
            mode,
            synth_cache: !self.no_synth_cache,
            cexlist_cache: !self.no_cexlist_cache,
            timeout: (self.timeout > 0).then(|| Duration::from_secs(self.timeout)),
            debug_rank: self.debug_rank,
            ..Default::default()
        };
        self.budgets.apply(program, &mut c);
        c
    }

    fn synthesizer(&self) -> Box<dyn Synthesizer> {
        match self.synth {
            SynthArg::Enumerative => Box::new(EnumerativeSynth::new(self.budgets.synth_config())),
            SynthArg::Table => Box::new(TableSynth),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new().stack_size(STACK).spawn(move || run(cli));
    match worker.map(|h| h.join()) {
        Ok(Ok(code)) => code,
        Ok(Err(_)) => ExitCode::from(101),
        Err(e) => {
            eprintln!("error: cannot start worker thread: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Infer { file, mode, repeat, csv, run } => infer_cmd(&file, mode.into(), repeat, csv.as_deref(), &run),
        Command::Bench { corpus, mode, repeat, csv, jobs, run } => {
            let modes: Vec<Mode> = if mode.is_empty() {
                vec![Mode::Hanoi, Mode::ConjStr, Mode::La, Mode::OneShot]
            } else {
                mode.into_iter().map(Mode::from).collect()
            };
            bench_cmd(&corpus, &modes, repeat, csv.as_deref(), jobs, &run)
        }
        Command::Check { file, invariant, ho, budgets } => check_cmd(&file, &invariant, ho, &budgets),
    }
}

fn load_file(path: &Path, ho: bool) -> Result<Program, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_USAGE)
    })?;
    load(&src, &ElabOptions { ho, ..Default::default() }).map_err(|d| {
        eprint!("{}", d.render(&path.display().to_string(), &src));
        ExitCode::from(EXIT_USAGE)
    })
}

fn infer_cmd(path: &Path, mode: Mode, repeat: usize, csv: Option<&Path>, args: &RunArgs) -> ExitCode {
    let program = match load_file(path, args.ho) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let synth = args.synthesizer();
    let config = args.config(&program, mode);
    let runs = match measure(&program, synth.as_ref(), &config, repeat) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(out) = csv {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let row = Row::from_runs(&name, mode.name(), &runs);
        if let Err(code) = emit_csv(&[row], Some(out)) {
            return code;
        }
    }
    report(runs.last().expect("at least one run"))
}

fn report(r: &RunReport) -> ExitCode {
    match &r.outcome {
        Outcome::Invariant { invariant, bounded } => {
            println!("Invariant ({} nodes):", invariant.size());
            println!("{invariant}");
            if *bounded {
                println!("(verified up to the enumeration bounds)");
            }
            ExitCode::SUCCESS
        }
        Outcome::Unchecked(p) => {
            println!("Unchecked candidate ({} nodes):", p.size());
            println!("{p}");
            ExitCode::SUCCESS
        }
        Outcome::SpecViolation { witnesses, replays } => {
            println!("Counterexample: constructible values violate the specification");
            for (v, replay) in witnesses.iter().zip(replays) {
                println!("  {v}");
                for line in replay.to_string().lines() {
                    println!("    {line}");
                }
            }
            ExitCode::from(EXIT_VIOLATION)
        }
        Outcome::SynthFailure(msg) => {
            eprintln!("synthesis failed: {msg}");
            ExitCode::from(EXIT_SYNTH_FAILURE)
        }
        Outcome::Timeout => {
            eprintln!("timed out after {:.1} s", r.elapsed.as_secs_f64());
            ExitCode::from(EXIT_TIMEOUT)
        }
    }
}

fn bench_cmd(manifest: &Path, modes: &[Mode], repeat: usize, csv: Option<&Path>, jobs: usize, args: &RunArgs) -> ExitCode {
    let corpus = match Corpus::load(manifest) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let tasks: Vec<(usize, Mode)> =
        (0..corpus.entries.len()).flat_map(|i| modes.iter().map(move |&m| (i, m))).collect();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).stack_size(STACK).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start workers: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let rows: Vec<Row> = pool.install(|| {
        tasks.par_iter().map(|&(i, mode)| bench_row(&corpus, i, mode, repeat, args)).collect()
    });
    match emit_csv(&rows, csv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn bench_row(corpus: &Corpus, i: usize, mode: Mode, repeat: usize, args: &RunArgs) -> Row {
    let entry = &corpus.entries[i];
    let program = match corpus.program(entry) {
        Ok(p) => p,
        Err(msg) => {
            eprint!("{msg}");
            return Row::failed(&entry.name, mode.name(), "error".into());
        }
    };
    let mut args = args.clone();
    args.ho |= entry.ho;
    let synth = args.synthesizer();
    let config = args.config(&program, mode);
    match measure(&program, synth.as_ref(), &config, repeat) {
        Ok(runs) => {
            let row = Row::from_runs(&entry.name, mode.name(), &runs);
            if mode == Mode::Hanoi && row.outcome != entry.expect {
                eprintln!("warning: {} gave {}, expected {}", entry.name, row.outcome, entry.expect);
            }
            row
        }
        Err(CegisError::UnsupportedMode(msg)) => {
            eprintln!("{} ({}): {msg}", entry.name, mode.name());
            Row::failed(&entry.name, mode.name(), "unsupported".into())
        }
        Err(e) => {
            eprintln!("{} ({}): {e}", entry.name, mode.name());
            Row::failed(&entry.name, mode.name(), "error".into())
        }
    }
}

fn emit_csv(rows: &[Row], path: Option<&Path>) -> Result<(), ExitCode> {
    let result = match path {
        Some(p) => match File::create(p) {
            Ok(f) => write_csv(rows, f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return Err(ExitCode::from(EXIT_USAGE));
            }
        },
        None => write_csv(rows, io::stdout().lock()),
    };
    result.map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}

fn check_cmd(path: &Path, text: &str, ho: bool, budgets: &BudgetArgs) -> ExitCode {
    let program = match load_file(path, ho) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let invariant = match parse_predicate(&program, text) {
        Ok(p) => p,
        Err(d) => {
            eprint!("{}", d.render("<invariant>", text));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut config = EngineConfig::default();
    budgets.apply(&program, &mut config);
    let synth = EnumerativeSynth::default();
    let mut engine = Engine::new(&program, &synth, config);
    let report = match engine.check(&invariant) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out = io::stdout().lock();
    let _ = describe(&mut out, "constructible values accepted", &report.closed);
    let _ = describe(&mut out, "sufficient and inductive", &report.no_negatives);
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn describe(out: &mut impl Write, what: &str, r: &Refuted) -> io::Result<()> {
    match r {
        Refuted::Valid => writeln!(out, "ok: {what}"),
        Refuted::Counterexample { values, cex } => {
            writeln!(out, "failed: {what}")?;
            for v in values {
                writeln!(out, "  {v}")?;
            }
            if let Some(call) = cex.as_ref().and_then(|c| c.call.as_ref()) {
                writeln!(out, "  from {call}")?;
            }
            Ok(())
        }
    }
}
