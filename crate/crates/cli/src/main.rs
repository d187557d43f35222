//! Command-line driver: run the machines, reduce with the calculi, extract
//! skeletons, benchmark the family `tₙ` and run the cross-check suites.

use std::fs;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use skelmad_core::bench::{bench_row, write_csv, BenchRow};
use skelmad_core::calculus::family::family_source;
use skelmad_core::calculus::{evaluate, with_large_stack, EvalOptions, Outcome, Skeletonizer, Strategy};
use skelmad_core::check::{run_suite, CheckConfig, Suite};
use skelmad_core::machine::{Machine, RunOptions, RunOutcome, Variant};
use skelmad_core::skeleton::{mark_skeleton, split, white_size};
use skelmad_core::term::{self, parse::parse_syntax};

/// Plain-machine benchmarks above this size need `--force`.
const MAD_BENCH_LIMIT: usize = 20;

#[derive(Parser)]
#[command(name = "skelmad", version, about = "Call-by-need and skeletal call-by-need machines and calculi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an abstract machine on a closed term.
    Run(RunArgs),
    /// Reduce a term with a calculus strategy.
    Reduce(ReduceArgs),
    /// Print the skeleton and flesh of a value.
    Skel(SkelArgs),
    /// Benchmark the machines on the family t_n and write CSV.
    Bench(BenchArgs),
    /// Run the randomized and exhaustive cross-check suites.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MachineArg {
    Mad,
    Smad,
}

impl From<MachineArg> for Variant {
    fn from(m: MachineArg) -> Self {
        match m {
            MachineArg::Mad => Variant::Mad,
            MachineArg::Smad => Variant::Smad,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Need,
    Skneed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SkeletonizerArg {
    Oracle,
    Marking,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    machine: MachineArg,
    /// Print every state, one line per transition.
    #[arg(long)]
    trace: bool,
    /// Check the state invariants after every transition.
    #[arg(long)]
    audit: bool,
    /// Maximum number of transitions.
    #[arg(long, default_value_t = 10_000_000)]
    fuel: u64,
    /// Print the statistics as CSV instead of key=value lines.
    #[arg(long)]
    csv: bool,
    /// Run on the family member t_N instead of a file.
    #[arg(long, value_name = "N", conflicts_with = "file")]
    family: Option<usize>,
    /// Input file, or `-` for standard input.
    #[arg(required_unless_present = "family")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Print every intermediate term.
    #[arg(long)]
    trace: bool,
    /// Maximum number of steps.
    #[arg(long, default_value_t = 10_000_000)]
    fuel: u64,
    /// How skeletons are computed by the skeletal strategy.
    #[arg(long, value_enum, default_value = "marking")]
    skeletonizer: SkeletonizerArg,
    /// Input file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Args)]
struct SkelArgs {
    /// File holding a value, or `-` for standard input.
    file: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Family sizes, as `a..b` (inclusive) or a single `n`.
    #[arg(long, value_parser = parse_range)]
    family: RangeInclusive<usize>,
    /// Machines to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mad,smad")]
    machines: Vec<MachineArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow plain-machine runs above n = 20.
    #[arg(long)]
    force: bool,
    /// Also record the ink space of the matching calculus reduction.
    #[arg(long)]
    calculus: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Suites to run, comma separated; all when absent.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// Number of cases per suite.
    #[arg(long)]
    cases: Option<usize>,
    /// Size bound of generated terms.
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = skelmad_core::gen::DEFAULT_SEED)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Statistics of one machine run, as printed by `run`.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunReport {
    machine: String,
    outcome: &'static str,
    beta: u64,
    sub: u64,
    sk: u64,
    ss: u64,
    sea1: u64,
    sea2: u64,
    sea3: u64,
    transitions: u64,
    initial_size: usize,
    max_state_size: usize,
    final_env_len: usize,
    wall_nanos: u64,
    #[serde(rename = "final")]
    final_code: String,
}

impl RunReport {
    fn key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("machine", self.machine.clone()),
            ("outcome", self.outcome.to_string()),
            ("beta", self.beta.to_string()),
            ("sub", self.sub.to_string()),
            ("sk", self.sk.to_string()),
            ("ss", self.ss.to_string()),
            ("sea1", self.sea1.to_string()),
            ("sea2", self.sea2.to_string()),
            ("sea3", self.sea3.to_string()),
            ("transitions", self.transitions.to_string()),
            ("initial_size", self.initial_size.to_string()),
            ("max_state_size", self.max_state_size.to_string()),
            ("final_env_len", self.final_env_len.to_string()),
            ("wall_nanos", self.wall_nanos.to_string()),
            ("final", self.final_code.clone()),
        ]
    }
}

fn cmd_run(args: RunArgs, out: &mut impl Write) -> Result<ExitCode> {
    let src = match (&args.family, &args.file) {
        (Some(n), _) => family_source(*n),
        (None, Some(f)) => read_input(f)?,
        (None, None) => bail!("no input"),
    };
    let (store, root) = term::parse(&src)?;
    let variant = Variant::from(args.machine);
    let mut m = Machine::new(variant, store, root)?;
    let opts = RunOptions { fuel: args.fuel, audit: args.audit, trace: args.trace, labels: false };
    let run = m.run(&opts)?;
    for line in &run.trace {
        writeln!(out, "{line}")?;
    }
    let s = &run.stats;
    let report = RunReport {
        machine: variant.to_string(),
        outcome: match run.outcome {
            RunOutcome::Final => "final",
            RunOutcome::OutOfFuel => "out-of-fuel",
        },
        beta: s.beta,
        sub: s.sub,
        sk: s.sk,
        ss: s.ss,
        sea1: s.sea1,
        sea2: s.sea2,
        sea3: s.sea3,
        transitions: s.transitions(),
        initial_size: s.initial_size,
        max_state_size: s.max_state_size,
        final_env_len: s.final_env_len,
        wall_nanos: s.wall.as_nanos() as u64,
        final_code: m.code_term().unicode(),
    };
    if args.csv {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut *out);
        w.serialize(&report)?;
        w.flush()?;
    } else {
        for (k, v) in report.key_values() {
            writeln!(out, "{k}={v}")?;
        }
    }
    if run.outcome == RunOutcome::OutOfFuel {
        eprintln!("error: out of fuel after {} transitions", s.transitions());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(args: ReduceArgs, out: &mut impl Write) -> Result<ExitCode> {
    let t = parse_syntax(&read_input(&args.file)?)?;
    let strategy = match args.strategy {
        StrategyArg::Need => Strategy::Need,
        StrategyArg::Skneed => Strategy::SkNeed,
    };
    let skeletonizer = match args.skeletonizer {
        SkeletonizerArg::Oracle => Skeletonizer::Oracle,
        SkeletonizerArg::Marking => Skeletonizer::Marking,
    };
    let opts = EvalOptions { fuel: args.fuel, trace: args.trace, skeletonizer };
    let start = t.clone();
    let eval = with_large_stack(move || evaluate(&start, strategy, &opts))?;
    if args.trace {
        writeln!(out, "{:<7}{}", "", t.unicode())?;
        for (label, u) in &eval.trace {
            writeln!(out, "{:<7}{}", format!("→{label}"), u.unicode())?;
        }
    }
    let st = &eval.stats;
    let outcome = match &eval.outcome {
        Outcome::Answer => "answer".to_string(),
        Outcome::Stuck(x) => format!("stuck on {x}"),
        Outcome::OutOfFuel => "out-of-fuel".to_string(),
    };
    writeln!(out, "outcome={outcome}")?;
    writeln!(out, "dB={}\nlsnd={}\nsk={}\nss={}", st.db, st.lsnd, st.sk, st.ss)?;
    writeln!(out, "steps={}\nink_space={}", st.steps(), st.ink_space)?;
    writeln!(out, "result={}", eval.term.unicode())?;
    if eval.outcome == Outcome::OutOfFuel {
        eprintln!("error: out of fuel after {} steps", st.steps());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_skel(args: SkelArgs, out: &mut impl Write) -> Result<ExitCode> {
    let (mut store, root) = term::parse(&read_input(&args.file)?)?;
    writeln!(out, "value={}", store.to_syntax(root).unicode())?;
    let marked = mark_skeleton(&mut store, root)?;
    let (white, steps) = (white_size(&store, root), marked.steps);
    let d = split(&mut store, marked);
    writeln!(out, "skeleton={}", store.to_syntax(d.skeleton).unicode())?;
    for &(p, body) in &d.flesh {
        writeln!(out, "flesh={}\\{}", store.name(p), store.to_syntax(body).unicode())?;
    }
    writeln!(out, "white_size={white}\nmarking_steps={steps}")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs, out: &mut impl Write) -> Result<ExitCode> {
    let variants: Vec<Variant> = args.machines.iter().map(|&m| m.into()).collect();
    if !args.force && variants.contains(&Variant::Mad) && *args.family.end() > MAD_BENCH_LIMIT {
        bail!("the plain machine takes exponentially long above n = {MAD_BENCH_LIMIT}; pass --force to run it anyway");
    }
    let jobs: Vec<(usize, Variant)> = args.family.clone().flat_map(|n| variants.iter().map(move |&v| (n, v))).collect();
    let rows: Vec<BenchRow> =
        jobs.into_par_iter().map(|(n, v)| bench_row(n, v, args.calculus)).collect::<Result<_, _>>()?;
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, io::BufWriter::new(file))?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        None => write_csv(&rows, &mut *out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: CheckArgs, out: &mut impl Write) -> Result<ExitCode> {
    let suites = if args.suite.is_empty() { Suite::ALL.to_vec() } else { args.suite };
    let cfg = CheckConfig { cases: args.cases, max_size: args.max_size, seed: args.seed };
    let mut failed = false;
    for suite in suites {
        let report = run_suite(suite, &cfg);
        writeln!(out, "{report}")?;
        for note in &report.notes {
            writeln!(out, "  note: {note}")?;
        }
        for failure in report.failures.iter().take(5) {
            writeln!(out, "  failure: {failure}")?;
        }
        failed |= !report.passed();
    }
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, &mut out),
        Command::Reduce(a) => cmd_reduce(a, &mut out),
        Command::Skel(a) => cmd_skel(a, &mut out),
        Command::Bench(a) => cmd_bench(a, &mut out),
        Command::Check(a) => cmd_check(a, &mut out),
    };
    let flushed = out.flush();
    match result.and_then(|code| flushed.map(|_| code).map_err(Into::into)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
