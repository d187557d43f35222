//! Acceptance suite: one PASS or FAIL line per criterion, nonzero exit if
//! any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use skelmad_core::bench::{read_csv, BenchRow};
use skelmad_core::calculus::family::{family_size, family_term};
use skelmad_core::calculus::{evaluate, with_large_stack, EvalOptions, Outcome, Strategy};
use skelmad_core::check::{run_suite, CheckConfig, Suite};
use skelmad_core::machine::{run_term, Machine, RunOptions, RunOutcome, Variant};
use skelmad_core::term::{self, parse::parse_syntax};

const GOLDEN_INPUT: &str = include_str!("../data/family_3.lambda");
/// Largest family member in the benchmark.
const BENCH_MAX: usize = 12;

type Verdict = Result<String, String>;

fn skeletal_betas(n: usize) -> u64 {
    6 * n as u64 + 4
}

fn plain_betas(n: usize) -> u64 {
    8 * (1u64 << n) + n as u64 - 4
}

fn golden_run() -> Verdict {
    let start = Instant::now();
    let (store, root) = term::parse(GOLDEN_INPUT).map_err(|e| e.to_string())?;
    let mut m = Machine::new(Variant::Smad, store, root).map_err(|e| e.to_string())?;
    let run = m.run(&RunOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let identity = parse_syntax(r"\w. w").unwrap();
    if run.outcome != RunOutcome::Final || run.stats.beta != 24 || !m.code_term().alpha_eq(&identity) {
        return Err(format!("{:?} with {} betas, final code {}", run.outcome, run.stats.beta, m.code_term()));
    }
    if elapsed >= Duration::from_millis(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("24 betas, final code {}, {elapsed:?}", m.code_term().unicode()))
}

fn family_skeletal() -> Verdict {
    let start = Instant::now();
    for n in 0..=10 {
        let t = family_term(n);
        let (_, run) = run_term(Variant::Smad, &t, &RunOptions::default()).map_err(|e| e.to_string())?;
        let eval = with_large_stack(move || evaluate(&t, Strategy::SkNeed, &EvalOptions::default()))
            .map_err(|e| e.to_string())?;
        let expected = skeletal_betas(n);
        if run.stats.beta != expected || eval.stats.db != expected || eval.outcome != Outcome::Answer {
            return Err(format!(
                "n={n}: machine {} betas, calculus {} dB, expected {expected}",
                run.stats.beta, eval.stats.db
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("6n+4 betas and dB steps for n = 0..10, {elapsed:?}"))
}

fn family_plain() -> Verdict {
    let start = Instant::now();
    for n in 0..=12 {
        let (_, run) = run_term(Variant::Mad, &family_term(n), &RunOptions::default()).map_err(|e| e.to_string())?;
        if run.stats.beta != plain_betas(n) {
            return Err(format!("n={n}: {} betas, expected {}", run.stats.beta, plain_betas(n)));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("8·2^n+n-4 betas for n = 0..12, {elapsed:?}"))
}

/// Produce the benchmark CSV through the command-line tool and read it back.
fn bench_csv() -> Result<Vec<BenchRow>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("bench.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_skelmad"))
        .args(["bench", "--family", &format!("0..{BENCH_MAX}"), "--machines", "mad,smad", "--out"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let file = std::fs::File::open(&path).map_err(|e| e.to_string())?;
    read_csv(file).map_err(|e| e.to_string())
}

fn column(rows: &[BenchRow], machine: &str, f: impl Fn(&BenchRow) -> usize) -> Vec<usize> {
    let mut picked: Vec<&BenchRow> = rows.iter().filter(|r| r.machine == machine).collect();
    picked.sort_by_key(|r| r.n);
    picked.into_iter().map(f).collect()
}

fn space_separation(rows: &[BenchRow]) -> Verdict {
    let smad = column(rows, "smad", |r| r.final_env_len);
    let mad = column(rows, "mad", |r| r.final_env_len);
    let diffs: Vec<i64> = (2..10).map(|n| smad[n + 1] as i64 - smad[n] as i64).collect();
    if diffs.iter().any(|&d| d != diffs[0]) {
        return Err(format!("skeletal env lengths {smad:?} have differences {diffs:?}"));
    }
    let ratios: Vec<f64> = (5..=11).map(|n| mad[n + 1] as f64 / mad[n] as f64).collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 1.8 {
        return Err(format!("plain env lengths {mad:?} grow by as little as {min:.3}"));
    }
    Ok(format!("skeletal env grows by {} per step, plain env by a factor of at least {min:.3}", diffs[0]))
}

fn suite(suite: Suite, min_cases: usize) -> Result<skelmad_core::check::SuiteReport, String> {
    let report = run_suite(suite, &CheckConfig::default());
    if !report.passed() {
        let first = report.failures.first().cloned().unwrap_or_default();
        return Err(format!("{report}; first failure: {first}"));
    }
    if report.cases < min_cases {
        return Err(format!("{report}; expected at least {min_cases} cases"));
    }
    Ok(report)
}

fn invariant_audits() -> Verdict {
    let report = suite(Suite::Audit, 1)?;
    if report.beta_bound_violations > 0 {
        return Err(format!("{report}; {} runs exceed the bounds relative to beta", report.beta_bound_violations));
    }
    // Runs too long to audit transition by transition still obey the bounds.
    for n in 0..=BENCH_MAX {
        for v in [Variant::Mad, Variant::Smad] {
            let (_, run) = run_term(v, &family_term(n), &RunOptions::default()).map_err(|e| e.to_string())?;
            run.stats.check_beta_bounds().map_err(|e| format!("{v} on t_{n}: {e}"))?;
        }
    }
    Ok(format!("{report}; transition bounds hold on every run and on t_0..t_{BENCH_MAX}"))
}

fn bilinear(rows: &[BenchRow]) -> Verdict {
    let t0 = family_size(0) as f64;
    let mut worst = (0.0f64, 0.0f64);
    for r in rows {
        let betas = (r.beta + 1) as f64;
        let own = r.transitions() as f64 / (family_size(r.n) as f64 * betas);
        let base = r.transitions() as f64 / (t0 * betas);
        worst = (worst.0.max(own), worst.1.max(base));
    }
    if worst.0 > 4.0 || worst.1 > 4.0 {
        return Err(format!("ratio reaches {:.3} with |t_n| and {:.3} with |t_0|", worst.0, worst.1));
    }
    Ok(format!("transitions/(|t|·(β+1)) at most {:.3} with |t_n|, {:.3} with |t_0|", worst.0, worst.1))
}

fn main() -> ExitCode {
    let rows = bench_csv();
    let with_rows = |f: fn(&[BenchRow]) -> Verdict| match &rows {
        Ok(rows) => f(rows),
        Err(e) => Err(format!("bench failed: {e}")),
    };
    let verdicts: Vec<(&str, Verdict)> = vec![
        ("golden run", golden_run()),
        ("family, skeletal", family_skeletal()),
        ("family, plain need", family_plain()),
        ("space separation", with_rows(space_separation)),
        ("marking step count", suite(Suite::Marking, 1000).map(|r| r.to_string())),
        ("oracle equivalence", suite(Suite::Skeleton, 1000).map(|r| r.to_string())),
        ("diamond", suite(Suite::Diamond, 1).map(|r| format!("{r}; {}", r.notes.join("; ")))),
        ("bisimulation", suite(Suite::Bisim, 500).map(|r| r.to_string())),
        ("invariant audits", invariant_audits()),
        ("bi-linear overhead", with_rows(bilinear)),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in verdicts.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
