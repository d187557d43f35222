//! Randomized and exhaustive cross-checks between the implementations.
//!
//! Each suite compares an implementation against an independent one (the
//! marking algorithm against the recursive skeleton definition, machines
//! against the calculi) or checks an invariant on many generated inputs,
//! and reports its failures together with the seed that produced them.

use std::fmt;
use std::str::FromStr;

use crate::calculus::canon::{canonicalize, equivalence_steps};
use crate::calculus::contexts::all_redexes;
use crate::calculus::family::family_term;
use crate::calculus::{decompose, step_in_place, well_named, Decomposition, Skeletonizer, StepLabel, Strategy};
use crate::gen::{self, TermRng};
use crate::machine::{Label, Machine, Variant};
use crate::skeleton::marked::{disc, explore_diamond};
use crate::skeleton::oracle::{self, is_skeleton, normalize_flesh_names, skeleton_of};
use crate::skeleton::{mark_skeleton, split, white_size};
use crate::term::{NameSupply, SkTerm, TermStore};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Marking step count equals the white size.
    Marking,
    /// Marking and splitting agree with the recursive definition.
    Skeleton,
    /// Every peak of the marking rewrite system joins in one step.
    Diamond,
    /// At most one redex in evaluation position.
    Determinism,
    /// Machines and calculi take the same principal steps.
    Bisim,
    /// Machine invariants after every transition.
    Audit,
    /// Canonical forms are invariant under structural equivalence.
    Canon,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Marking, Suite::Skeleton, Suite::Diamond, Suite::Determinism, Suite::Bisim, Suite::Audit, Suite::Canon];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Marking => "marking",
            Suite::Skeleton => "skeleton",
            Suite::Diamond => "diamond",
            Suite::Determinism => "determinism",
            Suite::Bisim => "bisim",
            Suite::Audit => "audit",
            Suite::Canon => "canon",
        }
    }

    /// Default number of cases and term size bound.
    pub fn defaults(self) -> (usize, usize) {
        match self {
            Suite::Marking | Suite::Skeleton => (1000, 40),
            Suite::Diamond => (0, 10),
            Suite::Determinism => (500, 12),
            Suite::Bisim => (500, 15),
            Suite::Audit => (300, 15),
            Suite::Canon => (1000, 12),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite {s}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    /// Number of cases; `None` for the suite default.
    pub cases: Option<usize>,
    /// Term size bound; `None` for the suite default.
    pub max_size: Option<usize>,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { cases: None, max_size: None, seed: gen::DEFAULT_SEED }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    /// Inputs checked.
    pub cases: usize,
    /// Inputs excluded, such as samples that ran out of fuel.
    pub skipped: usize,
    pub failures: Vec<String>,
    /// Observations that are not failures.
    pub notes: Vec<String>,
    /// Audited runs exceeding a transition bound stated relative to β
    /// alone, without counting the entries created for flesh.
    pub beta_bound_violations: usize,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64) -> Self {
        SuiteReport {
            suite,
            seed,
            cases: 0,
            skipped: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            beta_bound_violations: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} skipped, {} failures (seed {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.cases,
            self.skipped,
            self.failures.len(),
            self.seed
        )
    }
}

/// Run one suite.
pub fn run_suite(suite: Suite, cfg: &CheckConfig) -> SuiteReport {
    let (cases, max_size) = suite.defaults();
    let cases = cfg.cases.unwrap_or(cases);
    let max_size = cfg.max_size.unwrap_or(max_size);
    let seed = cfg.seed;
    crate::calculus::with_large_stack(move || {
        let mut rng = gen::rng(seed);
        let mut report = SuiteReport::new(suite, seed);
        match suite {
            Suite::Marking => marking(&mut rng, cases, max_size, &mut report),
            Suite::Skeleton => skeleton(&mut rng, cases, max_size, &mut report),
            Suite::Diamond => diamond(max_size, &mut report),
            Suite::Determinism => determinism(&mut rng, cases, max_size, &mut report),
            Suite::Bisim => bisim(&mut rng, cases, max_size, &mut report),
            Suite::Audit => audit(&mut rng, cases, max_size, &mut report),
            Suite::Canon => canon(&mut rng, cases, max_size, &mut report),
        }
        report
    })
}

const FREE: [&str; 2] = ["z", "w"];

fn marking(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    for _ in 0..cases {
        let v = gen::value(rng, max_size, &FREE);
        report.cases += 1;
        let mut store = TermStore::new();
        let root = store.insert(&v).expect("generated values are pure");
        let marked = mark_skeleton(&mut store, root).expect("generated values are values");
        let white = white_size(&store, root);
        let expected = disc(&v).expect("value").white_size();
        if marked.steps as usize != white || white != expected {
            report
                .failures
                .push(format!("{v}: {} steps, white size {white}, disc white size {expected}", marked.steps));
            continue;
        }
        // Everything in the skeleton is marked except free occurrences.
        let d = split(&mut store, marked);
        let skel = store.to_syntax(d.skeleton);
        let free_occurrences = skel.size() - white;
        let expected_free = count_free_occurrences(&skel);
        if free_occurrences != expected_free {
            report
                .failures
                .push(format!("{v}: skeleton {skel} has {expected_free} free occurrences, white size {white}"));
        }
    }
}

fn count_free_occurrences(t: &SkTerm) -> usize {
    fn go(t: &SkTerm, bound: &mut Vec<crate::term::Name>) -> usize {
        match t {
            SkTerm::Var(x) => usize::from(!bound.contains(x)),
            SkTerm::Abs(x, b) => {
                bound.push(x.clone());
                let n = go(b, bound);
                bound.pop();
                n
            }
            SkTerm::App(h, a) => go(h, bound) + go(a, bound),
            SkTerm::Es(..) | SkTerm::SkEs(..) => unreachable!("skeletons are pure"),
        }
    }
    go(t, &mut Vec::new())
}

/// Decomposition of `v` by marking and splitting on a store.
pub fn marking_decomposition(v: &SkTerm) -> oracle::Decomposition {
    let mut store = TermStore::new();
    let root = store.insert(v).expect("values are pure");
    let (d, _) = crate::skeleton::decompose(&mut store, root).expect("values decompose");
    let flesh = d.flesh.iter().map(|&(p, body)| (store.name(p).clone(), store.to_syntax(body))).collect();
    oracle::Decomposition { skeleton: store.to_syntax(d.skeleton), flesh }
}

/// Compare two decompositions up to the names of flesh variables.
pub fn same_decomposition(a: &oracle::Decomposition, b: &oracle::Decomposition) -> bool {
    let (a, b) = (normalize_flesh_names(a), normalize_flesh_names(b));
    a.skeleton.alpha_eq(&b.skeleton)
        && a.flesh.len() == b.flesh.len()
        && a.flesh.iter().zip(&b.flesh).all(|((p, u), (q, w))| p == q && u.alpha_eq(w))
}

fn skeleton(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    for _ in 0..cases {
        let v = gen::value(rng, max_size, &FREE);
        report.cases += 1;
        let ours = marking_decomposition(&v);
        let mut names = NameSupply::avoiding(&v);
        let reference = skeleton_of(&v, &mut names).expect("value");
        if !same_decomposition(&ours, &reference) {
            report.failures.push(format!(
                "{v}: marking gives {} with {} flesh, definition gives {} with {} flesh",
                ours.skeleton,
                ours.flesh.len(),
                reference.skeleton,
                reference.flesh.len()
            ));
        } else if !ours.recompose().alpha_eq(&v) {
            report.failures.push(format!("{v}: flesh does not recompose"));
        } else if ours.skeleton.size() > v.size() || ours.flesh.iter().any(|(_, u)| u.size() > v.size()) {
            report.failures.push(format!("{v}: skeleton or flesh larger than the value"));
        }
    }
}

fn diamond(max_size: usize, report: &mut SuiteReport) {
    let values = gen::all_values(max_size, &["z"]);
    let mut peaks = 0;
    for v in values {
        report.cases += 1;
        let r = explore_diamond(&v).expect("value");
        peaks += r.peaks;
        report.failures.extend(r.failures.into_iter().map(|f| format!("{v}: {f}")));
    }
    report.notes.push(format!("{peaks} peaks joined"));
}

/// Terms grown past this size end a walk.
const WALK_SIZE: usize = 400;
/// Steps per walk. Enumerating every redex is exponential in the length
/// of substitution chains, which diverging terms keep growing.
const WALK_STEPS: usize = 40;

/// Reduce `t` step by step, handing every reachable term to `visit`.
fn walk(t: &SkTerm, strategy: Strategy, fuel: usize, mut visit: impl FnMut(&SkTerm)) {
    let mut term = well_named(t);
    let mut names = NameSupply::avoiding(&term);
    visit(&term);
    for _ in 0..fuel {
        match step_in_place(&mut term, strategy, &mut names, Skeletonizer::Oracle) {
            Ok(Some(_)) if term.size() <= WALK_SIZE => visit(&term),
            _ => return,
        }
    }
}

fn skeletal_payloads_ok(t: &SkTerm) -> bool {
    match t {
        SkTerm::Var(_) => true,
        SkTerm::Abs(_, b) => skeletal_payloads_ok(b),
        SkTerm::App(h, a) | SkTerm::Es(h, _, a) => skeletal_payloads_ok(h) && skeletal_payloads_ok(a),
        SkTerm::SkEs(b, _, v) => is_skeleton(v) && skeletal_payloads_ok(b),
    }
}

fn determinism(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    for _ in 0..cases {
        let t = gen::closed_term(rng, max_size);
        report.cases += 1;
        for strategy in [Strategy::Need, Strategy::SkNeed] {
            let mut failure = None;
            walk(&t, strategy, WALK_STEPS, |u| {
                if failure.is_some() {
                    return;
                }
                let all = all_redexes(u, strategy);
                let chosen = decompose(u, strategy);
                let ok = match (&chosen, all.as_slice()) {
                    (Decomposition::Redex { path, label, var_path }, [(p, l, v)]) => {
                        path == p && label == l && var_path == v
                    }
                    (Decomposition::Answer | Decomposition::Stuck(_), []) => true,
                    _ => false,
                };
                if !ok {
                    failure = Some(format!("{strategy:?} on {u}: {} redexes, chose {chosen:?}", all.len()));
                } else if !skeletal_payloads_ok(u) {
                    failure = Some(format!("{u}: skeletal substitution holds a non-skeleton"));
                }
            });
            report.failures.extend(failure);
        }
    }
}

/// Principal steps compared term by term; later ones by label only.
const COMPARED_STEPS: usize = 300;
const CALCULUS_FUEL: u64 = 10_000;

struct CalculusRun {
    labels: Vec<StepLabel>,
    /// The first terms of the reduction.
    prefix: Vec<SkTerm>,
    normal_form: Option<SkTerm>,
}

fn calculus_run(t: &SkTerm, strategy: Strategy) -> CalculusRun {
    let mut term = well_named(t);
    let mut names = NameSupply::avoiding(&term);
    let mut labels = Vec::new();
    let mut prefix = vec![term.clone()];
    loop {
        if labels.len() as u64 >= CALCULUS_FUEL {
            return CalculusRun { labels, prefix, normal_form: None };
        }
        match step_in_place(&mut term, strategy, &mut names, Skeletonizer::Oracle).expect("skeletons of pure values") {
            Some(info) => {
                labels.push(info.label);
                if labels.len() <= COMPARED_STEPS {
                    prefix.push(term.clone());
                }
            }
            None => return CalculusRun { labels, prefix, normal_form: Some(term) },
        }
    }
}

/// Compare a machine with its calculus on `t`. `Ok(false)` when the
/// calculus runs out of fuel.
pub fn bisimulate(t: &SkTerm, variant: Variant) -> Result<bool, String> {
    let strategy = match variant {
        Variant::Mad => Strategy::Need,
        Variant::Smad => Strategy::SkNeed,
    };
    let calc = calculus_run(t, strategy);
    let Some(nf) = calc.normal_form else {
        return Ok(false);
    };
    let canon: Vec<SkTerm> = calc.prefix.iter().map(canonicalize).collect();
    let mut m = Machine::from_term(variant, t).map_err(|e| e.to_string())?;
    if canonicalize(&m.readback()) != canon[0] {
        return Err(format!("{variant} on {t}: initial read-back differs"));
    }
    let mut principal = 0usize;
    let budget = 100 * (calc.labels.len() as u64 + 1) * (t.size() as u64 + 1);
    for _ in 0..budget {
        let Some(label) = m.step().map_err(|e| format!("{variant} on {t}: {e}"))? else {
            break;
        };
        let Some(step) = label.principal() else {
            continue;
        };
        if calc.labels.get(principal) != Some(&step) {
            return Err(format!(
                "{variant} on {t}: principal transition {principal} is {label}, calculus step is {:?}",
                calc.labels.get(principal)
            ));
        }
        principal += 1;
        if let Some(expected) = canon.get(principal) {
            if &canonicalize(&m.readback()) != expected {
                return Err(format!(
                    "{variant} on {t}: after {principal} principal steps read-back {} differs from {}",
                    m.readback(),
                    expected
                ));
            }
        }
    }
    if !m.is_final() {
        return Err(format!("{variant} on {t}: machine not final after the calculus normal form"));
    }
    if principal != calc.labels.len() {
        return Err(format!(
            "{variant} on {t}: {principal} principal transitions, {} calculus steps",
            calc.labels.len()
        ));
    }
    let (a, b) = (canonicalize(&m.readback()), canonicalize(&nf));
    if a != b {
        return Err(format!("{variant} on {t}: final read-back {a} differs from normal form {b}"));
    }
    Ok(true)
}

fn bisim(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    // Sample until `cases` terms terminate under both strategies.
    while report.cases < cases {
        let t = gen::closed_term(rng, max_size);
        let mut terminated = true;
        let mut failed = false;
        for variant in [Variant::Mad, Variant::Smad] {
            match bisimulate(&t, variant) {
                Ok(true) => {}
                Ok(false) => terminated = false,
                Err(e) => {
                    report.failures.push(e);
                    failed = true;
                }
            }
        }
        if terminated || failed {
            report.cases += 1;
        } else {
            report.skipped += 1;
        }
    }
}

/// Run `t` with per-transition audits and search-transparency checks.
pub fn audited_run(variant: Variant, t: &SkTerm, fuel: u64) -> Result<Option<crate::machine::RunStats>, String> {
    let mut m = Machine::from_term(variant, t).map_err(|e| e.to_string())?;
    m.audit()?;
    for _ in 0..fuel {
        let before = m.readback();
        let Some(label) = m.step().map_err(|e| e.to_string())? else {
            return Ok(Some(m.stats().clone()));
        };
        m.audit().map_err(|e| format!("after {label}: {e}"))?;
        if matches!(label, Label::Sea1 | Label::Sea2 | Label::Sea3) && !m.readback().alpha_eq(&before) {
            return Err(format!("{label} changed the read-back"));
        }
    }
    Ok(None)
}

/// Family sizes audited per machine: every transition costs a full pass
/// over the state, so the exponential plain runs are kept short.
pub const AUDITED_FAMILY: [(Variant, usize); 2] = [(Variant::Smad, 12), (Variant::Mad, 7)];

/// Transitions per audited random run. Auditing is linear in the state,
/// which diverging runs keep growing.
const AUDIT_FUEL: u64 = 2_000;

fn audit(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    let record = |report: &mut SuiteReport, what: String, result: Result<Option<crate::machine::RunStats>, String>| {
        report.cases += 1;
        match result {
            Ok(Some(stats)) => {
                if let Err(e) = stats.check_entry_bounds() {
                    report.failures.push(format!("{what}: {e}"));
                }
                if let Err(e) = stats.check_beta_bounds() {
                    report.beta_bound_violations += 1;
                    if report.beta_bound_violations <= 3 {
                        report.notes.push(format!("{what}: {e}"));
                    }
                }
            }
            Ok(None) => report.skipped += 1,
            Err(e) => report.failures.push(format!("{what}: {e}")),
        }
    };
    for (variant, max_n) in AUDITED_FAMILY {
        for n in 0..=max_n {
            let result = audited_run(variant, &family_term(n), u64::MAX);
            record(report, format!("{variant} on family {n}"), result);
        }
    }
    for _ in 0..cases {
        let t = gen::closed_term(rng, max_size);
        for variant in [Variant::Mad, Variant::Smad] {
            let result = audited_run(variant, &t, AUDIT_FUEL);
            record(report, format!("{variant} on {t}"), result);
        }
    }
    report.notes.push(format!("{} runs exceed a bound stated relative to beta alone", report.beta_bound_violations));
}

fn canon(rng: &mut TermRng, cases: usize, max_size: usize, report: &mut SuiteReport) {
    let free = ["a", "b"];
    let mut rewrites = 0usize;
    let mut bisim_checked = 0usize;
    // Terms without any equivalence rewrite are skipped, up to a bound.
    while report.cases < cases && report.skipped < 20 * cases.max(1) {
        let t = gen::sk_term(rng, max_size, &free);
        let c = canonicalize(&t);
        let mut cur = t.clone();
        let mut moved = false;
        for _ in 0..6 {
            let steps = equivalence_steps(&cur);
            if steps.is_empty() {
                break;
            }
            let next = steps[rng.gen_range(0..steps.len())].clone();
            rewrites += 1;
            moved = true;
            if canonicalize(&next) != c {
                report.failures.push(format!("{t} ≡ {next} but canonical forms {c} and {}", canonicalize(&next)));
                break;
            }
            cur = next;
        }
        if !moved {
            report.skipped += 1;
            continue;
        }
        report.cases += 1;
        // Equivalent terms take the same step to equivalent terms.
        let mut na = NameSupply::avoiding(&t);
        na.reserve_term(&cur);
        let mut nb = na.clone();
        let (mut a, mut b) = (t.clone(), cur.clone());
        let sa = step_in_place(&mut a, Strategy::SkNeed, &mut na, Skeletonizer::Oracle);
        let sb = step_in_place(&mut b, Strategy::SkNeed, &mut nb, Skeletonizer::Oracle);
        match (sa, sb) {
            (Ok(Some(x)), Ok(Some(y))) => {
                bisim_checked += 1;
                if x.label != y.label || canonicalize(&a) != canonicalize(&b) {
                    report.failures.push(format!("{t} and {cur} step differently: {a} and {b}"));
                }
            }
            (Ok(None), Ok(None)) => {}
            (x, y) => report.failures.push(format!("{t} and {cur} disagree on stepping: {x:?} vs {y:?}")),
        }
    }
    report.notes.push(format!("{rewrites} equivalence rewrites, {bisim_checked} step pairs compared"));
}
