//! Small-step call-by-need and skeletal call-by-need on tree terms.
//!
//! Reduction happens at the unique redex in evaluation position. Terms are
//! kept well-named: every binder is distinct from every other binder and
//! from every free name, and copies made by substitution get fresh names.

pub mod canon;
pub mod contexts;
pub mod family;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::skeleton::{self, oracle};
use crate::term::{Name, NameSupply, SkTerm, TermStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Need,
    SkNeed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepLabel {
    Db,
    Lsnd,
    Sk,
    Ss,
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepLabel::Db => "dB",
            StepLabel::Lsnd => "lsnd",
            StepLabel::Sk => "sk",
            StepLabel::Ss => "ss",
        })
    }
}

/// How the `sk` rule computes skeletons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Skeletonizer {
    /// From the recursive definition.
    #[default]
    Oracle,
    /// Through the marking algorithm on a scratch store.
    Marking,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("skeleton extraction failed: {0}")]
    Skeleton(#[from] skeleton::SkeletonError),
}

/// One step down a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    /// Head of an application.
    Head,
    /// Body of a substitution.
    Body,
    /// Argument of an explicit substitution.
    Arg,
}

/// Where the next step happens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    /// `S⟨v⟩`: nothing to do.
    Answer,
    /// `E⟨⟨x⟩⟩` with `x` free.
    Stuck(Name),
    /// Redex at `path`; for substitution rules `var_path` locates the
    /// needed occurrence inside the body.
    Redex { path: Vec<Dir>, label: StepLabel, var_path: Vec<Dir> },
}

enum Found {
    Answer,
    /// Needed variable, reversed path to it.
    Needs(Name, Vec<Dir>),
    /// Reversed path to the redex.
    Redex(Vec<Dir>, StepLabel, Vec<Dir>),
}

fn search(t: &SkTerm, strategy: Strategy) -> Found {
    match t {
        SkTerm::Var(x) => Found::Needs(x.clone(), Vec::new()),
        SkTerm::Abs(..) => Found::Answer,
        SkTerm::App(h, _) => match search(h, strategy) {
            Found::Answer => Found::Redex(Vec::new(), StepLabel::Db, Vec::new()),
            Found::Needs(x, mut p) => {
                p.push(Dir::Head);
                Found::Needs(x, p)
            }
            Found::Redex(mut p, l, v) => {
                p.push(Dir::Head);
                Found::Redex(p, l, v)
            }
        },
        SkTerm::Es(b, x, u) => match search(b, strategy) {
            Found::Answer => Found::Answer,
            Found::Redex(mut p, l, v) => {
                p.push(Dir::Body);
                Found::Redex(p, l, v)
            }
            Found::Needs(y, mut p) if y != *x => {
                p.push(Dir::Body);
                Found::Needs(y, p)
            }
            Found::Needs(_, mut p) => match search(u, strategy) {
                Found::Answer => {
                    p.reverse();
                    let label = match strategy {
                        Strategy::Need => StepLabel::Lsnd,
                        Strategy::SkNeed => StepLabel::Sk,
                    };
                    Found::Redex(Vec::new(), label, p)
                }
                Found::Redex(mut q, l, v) => {
                    q.push(Dir::Arg);
                    Found::Redex(q, l, v)
                }
                Found::Needs(y, mut q) => {
                    q.push(Dir::Arg);
                    Found::Needs(y, q)
                }
            },
        },
        SkTerm::SkEs(b, x, _) => match search(b, strategy) {
            Found::Answer => Found::Answer,
            Found::Redex(mut p, l, v) => {
                p.push(Dir::Body);
                Found::Redex(p, l, v)
            }
            Found::Needs(y, mut p) if y != *x => {
                p.push(Dir::Body);
                Found::Needs(y, p)
            }
            Found::Needs(_, mut p) => {
                p.reverse();
                Found::Redex(Vec::new(), StepLabel::Ss, p)
            }
        },
    }
}

/// Locate the next redex.
pub fn decompose(t: &SkTerm, strategy: Strategy) -> Decomposition {
    match search(t, strategy) {
        Found::Answer => Decomposition::Answer,
        Found::Needs(x, _) => Decomposition::Stuck(x),
        Found::Redex(mut path, label, var_path) => {
            path.reverse();
            Decomposition::Redex { path, label, var_path }
        }
    }
}

fn subterm_mut<'a>(t: &'a mut SkTerm, path: &[Dir]) -> &'a mut SkTerm {
    let mut cur = t;
    for d in path {
        cur = match (d, cur) {
            (Dir::Head, SkTerm::App(h, _)) => &mut **h,
            (Dir::Body, SkTerm::Es(b, _, _) | SkTerm::SkEs(b, _, _)) => &mut **b,
            (Dir::Arg, SkTerm::Es(_, _, a)) => &mut **a,
            (d, t) => panic!("path step {d:?} does not fit {t}"),
        };
    }
    cur
}

fn take(t: &mut SkTerm) -> SkTerm {
    std::mem::replace(t, SkTerm::Var(Name::from("")))
}

/// A substitution frame of `S`.
struct Frame {
    skeletal: bool,
    x: Name,
    arg: SkTerm,
}

/// Split `S⟨v⟩` into its frames (innermost first) and `v`.
fn unwrap_answer(mut t: SkTerm) -> (Vec<Frame>, SkTerm) {
    let mut frames = Vec::new();
    loop {
        match t {
            SkTerm::Es(b, x, a) => {
                frames.push(Frame { skeletal: false, x, arg: *a });
                t = *b;
            }
            SkTerm::SkEs(b, x, a) => {
                frames.push(Frame { skeletal: true, x, arg: *a });
                t = *b;
            }
            v => {
                frames.reverse();
                return (frames, v);
            }
        }
    }
}

fn wrap(t: SkTerm, frames: Vec<Frame>) -> SkTerm {
    frames.into_iter().fold(t, |t, f| {
        if f.skeletal {
            SkTerm::SkEs(Box::new(t), f.x, Box::new(f.arg))
        } else {
            SkTerm::Es(Box::new(t), f.x, Box::new(f.arg))
        }
    })
}

/// Rename the binder `x` of a scope `body` to a fresh name.
fn rename_bound(body: SkTerm, x: &Name, names: &mut NameSupply) -> (SkTerm, Name) {
    let y = names.fresh(crate::term::base_name(x));
    (body.subst(x, &SkTerm::Var(y.clone())), y)
}

/// Rename the binders of an answer `S⟨λx.t⟩` that belong to `avoid`.
fn freshen_answer(h: SkTerm, avoid: &HashSet<Name>, names: &mut NameSupply) -> SkTerm {
    match h {
        SkTerm::Abs(x, t) if avoid.contains(&x) => {
            let (t, y) = rename_bound(*t, &x, names);
            SkTerm::Abs(y, Box::new(t))
        }
        SkTerm::Es(b, x, a) => {
            let (b, x) = freshen_scope(*b, x, avoid, names);
            SkTerm::Es(Box::new(b), x, a)
        }
        SkTerm::SkEs(b, x, a) => {
            let (b, x) = freshen_scope(*b, x, avoid, names);
            SkTerm::SkEs(Box::new(b), x, a)
        }
        other => other,
    }
}

fn freshen_scope(b: SkTerm, x: Name, avoid: &HashSet<Name>, names: &mut NameSupply) -> (SkTerm, Name) {
    let b = freshen_answer(b, avoid, names);
    if avoid.contains(&x) {
        rename_bound(b, &x, names)
    } else {
        (b, x)
    }
}

/// `S⟨λx.t⟩ u ↦ S⟨t[x\u]⟩`, renaming binders of `S` and `x` first if they
/// would capture free variables of `u`.
fn fire_db(h: SkTerm, u: SkTerm, names: &mut NameSupply) -> SkTerm {
    let fv = u.free_vars();
    let (frames, v) = unwrap_answer(freshen_answer(h, &fv, names));
    let SkTerm::Abs(x, t) = v else {
        panic!("dB on a non-answer head");
    };
    wrap(SkTerm::Es(t, x, Box::new(u)), frames)
}

fn skeleton_decomposition(
    v: &SkTerm,
    names: &mut NameSupply,
    how: Skeletonizer,
) -> Result<oracle::Decomposition, CalcError> {
    match how {
        Skeletonizer::Oracle => Ok(oracle::skeleton_of(v, names)?),
        Skeletonizer::Marking => {
            let mut store = TermStore::new();
            let root = store.insert(v).map_err(|_| skeleton::SkeletonError::NotPure)?;
            let (d, _) = skeleton::decompose(&mut store, root)?;
            let mut skel = store.to_syntax(d.skeleton);
            let mut flesh = Vec::new();
            for (p, body) in d.flesh {
                let q = names.fresh("p");
                skel = skel.subst(store.name(p), &SkTerm::Var(q.clone()));
                flesh.push((q, store.to_syntax(body)));
            }
            Ok(oracle::Decomposition { skeleton: skel, flesh })
        }
    }
}

/// Effect of one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepInfo {
    pub label: StepLabel,
    /// Size after minus size before.
    pub delta: isize,
}

/// Reduce `t` in place by one step. `None` when `t` is an answer or stuck.
pub fn step_in_place(
    t: &mut SkTerm,
    strategy: Strategy,
    names: &mut NameSupply,
    how: Skeletonizer,
) -> Result<Option<StepInfo>, CalcError> {
    let Decomposition::Redex { path, label, var_path } = decompose(t, strategy) else {
        return Ok(None);
    };
    let slot = subterm_mut(t, &path);
    let redex = take(slot);
    let (result, delta) = match (label, redex) {
        (StepLabel::Db, SkTerm::App(h, u)) => (fire_db(*h, *u, names), -1),
        (StepLabel::Lsnd, SkTerm::Es(mut b, x, u)) => {
            let (frames, v) = unwrap_answer(*u);
            let copy = v.rename_fresh(names);
            let delta = v.size() as isize - 1;
            *subterm_mut(&mut b, &var_path) = copy;
            (wrap(SkTerm::Es(b, x, Box::new(v)), frames), delta)
        }
        (StepLabel::Sk, SkTerm::Es(b, x, u)) => {
            let (frames, v) = unwrap_answer(*u);
            let d = skeleton_decomposition(&v, names, how)?;
            let delta = 2 * d.flesh.len() as isize;
            let inner = d.as_substitution(SkTerm::SkEs(b, x, Box::new(d.skeleton.clone())));
            (wrap(inner, frames), delta)
        }
        (StepLabel::Ss, SkTerm::SkEs(mut b, x, v)) => {
            let copy = v.rename_fresh(names);
            let delta = v.size() as isize - 1;
            *subterm_mut(&mut b, &var_path) = copy;
            (SkTerm::SkEs(b, x, v), delta)
        }
        (l, r) => panic!("{l} redex has unexpected shape {r}"),
    };
    *slot = result;
    Ok(Some(StepInfo { label, delta }))
}

/// One step of call-by-need on a copy of `t`.
pub fn step_need(t: &SkTerm, names: &mut NameSupply) -> Option<(StepLabel, SkTerm)> {
    let mut u = t.clone();
    step_in_place(&mut u, Strategy::Need, names, Skeletonizer::Oracle)
        .expect("call-by-need steps do not extract skeletons")
        .map(|i| (i.label, u))
}

/// One step of skeletal call-by-need on a copy of `t`.
pub fn step_sk_need(t: &SkTerm, names: &mut NameSupply) -> Result<Option<(StepLabel, SkTerm)>, CalcError> {
    let mut u = t.clone();
    Ok(step_in_place(&mut u, Strategy::SkNeed, names, Skeletonizer::Oracle)?.map(|i| (i.label, u)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub db: u64,
    pub lsnd: u64,
    pub sk: u64,
    pub ss: u64,
    /// Largest term size along the reduction.
    pub ink_space: usize,
}

impl EvalStats {
    pub fn steps(&self) -> u64 {
        self.db + self.lsnd + self.sk + self.ss
    }
}

/// How an evaluation ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Answer,
    Stuck(Name),
    OutOfFuel,
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub fuel: u64,
    pub trace: bool,
    pub skeletonizer: Skeletonizer,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { fuel: 10_000_000, trace: false, skeletonizer: Skeletonizer::Oracle }
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub outcome: Outcome,
    pub term: SkTerm,
    pub stats: EvalStats,
    pub labels: Vec<StepLabel>,
    /// Every intermediate term after its step, when tracing.
    pub trace: Vec<(StepLabel, SkTerm)>,
}

/// Make binders distinct from each other and from free names.
pub fn well_named(t: &SkTerm) -> SkTerm {
    if t.is_well_named() {
        t.clone()
    } else {
        t.rename_fresh(&mut NameSupply::avoiding(t))
    }
}

/// Reduce until an answer, a stuck variable or the fuel limit.
pub fn evaluate(t: &SkTerm, strategy: Strategy, opts: &EvalOptions) -> Result<Evaluation, CalcError> {
    let mut term = well_named(t);
    let mut names = NameSupply::avoiding(&term);
    let mut size = term.size() as isize;
    let mut stats = EvalStats { ink_space: size as usize, ..Default::default() };
    let mut labels = Vec::new();
    let mut trace = Vec::new();
    let outcome = loop {
        if stats.steps() >= opts.fuel {
            break Outcome::OutOfFuel;
        }
        match step_in_place(&mut term, strategy, &mut names, opts.skeletonizer)? {
            Some(info) => {
                match info.label {
                    StepLabel::Db => stats.db += 1,
                    StepLabel::Lsnd => stats.lsnd += 1,
                    StepLabel::Sk => stats.sk += 1,
                    StepLabel::Ss => stats.ss += 1,
                }
                size += info.delta;
                stats.ink_space = stats.ink_space.max(size as usize);
                labels.push(info.label);
                if opts.trace {
                    trace.push((info.label, term.clone()));
                }
            }
            None => match decompose(&term, strategy) {
                Decomposition::Stuck(x) => break Outcome::Stuck(x),
                _ => break Outcome::Answer,
            },
        }
    };
    debug_assert_eq!(size as usize, term.size());
    Ok(Evaluation { outcome, term, stats, labels, trace })
}

/// Run `f` on a thread with a large stack. Reductions of big terms recurse
/// deeply through long chains of substitutions.
pub fn with_large_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(f)
        .expect("spawning evaluation thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse::parse_syntax;

    fn p(s: &str) -> SkTerm {
        parse_syntax(s).unwrap()
    }

    #[test]
    fn db_moves_substitution_context() {
        let t = SkTerm::app(SkTerm::es(p("\\x. y"), "y", p("t")), p("u"));
        let mut names = NameSupply::avoiding(&t);
        let (l, u) = step_need(&t, &mut names).unwrap();
        assert_eq!(l, StepLabel::Db);
        assert_eq!(u, SkTerm::es(SkTerm::es(p("y"), "x", p("u")), "y", p("t")));
    }

    #[test]
    fn db_renames_on_capture() {
        let t = SkTerm::app(SkTerm::es(p("\\x. y"), "y", p("t")), p("y"));
        let mut names = NameSupply::avoiding(&t);
        let (_, u) = step_need(&t, &mut names).unwrap();
        let expected = SkTerm::es(SkTerm::es(p("z"), "x", p("y")), "z", p("t"));
        assert!(u.alpha_eq(&expected), "{u}");
    }

    #[test]
    fn lsnd_commutes_substitution_context() {
        let t = SkTerm::es(p("x x"), "x", SkTerm::es(p("\\a. a"), "y", p("t")));
        let mut names = NameSupply::avoiding(&t);
        let (l, u) = step_need(&t, &mut names).unwrap();
        assert_eq!(l, StepLabel::Lsnd);
        let expected = SkTerm::es(SkTerm::es(p("(\\b. b) x"), "x", p("\\a. a")), "y", p("t"));
        assert!(u.alpha_eq(&expected), "{u}");
    }

    #[test]
    fn sk_then_ss() {
        let t = SkTerm::es(p("x (\\a. a) (x (\\b. b))"), "x", p("\\c. c"));
        let mut names = NameSupply::avoiding(&t);
        let (l1, u1) = step_sk_need(&t, &mut names).unwrap().unwrap();
        assert_eq!(l1, StepLabel::Sk);
        assert_eq!(u1, SkTerm::skes(p("x (\\a. a) (x (\\b. b))"), "x", p("\\c. c")));
        let (l2, u2) = step_sk_need(&u1, &mut names).unwrap().unwrap();
        assert_eq!(l2, StepLabel::Ss);
        let expected = SkTerm::skes(p("(\\d. d) (\\a. a) (x (\\b. b))"), "x", p("\\c. c"));
        assert!(u2.alpha_eq(&expected), "{u2}");
    }

    #[test]
    fn stuck_on_free_variable() {
        let e = evaluate(&p("(\\x. y x) z"), Strategy::Need, &EvalOptions::default()).unwrap();
        assert_eq!(e.outcome, Outcome::Stuck("y".into()));
        assert_eq!(e.stats.db, 1);
    }

    #[test]
    fn fuel_limit() {
        let omega = p("(\\x. x x) (\\y. y y)");
        let opts = EvalOptions { fuel: 50, ..Default::default() };
        let e = evaluate(&omega, Strategy::SkNeed, &opts).unwrap();
        assert_eq!(e.outcome, Outcome::OutOfFuel);
        assert_eq!(e.stats.steps(), 50);
    }

    #[test]
    fn marking_and_oracle_agree_along_a_run() {
        let t = p("(\\f. f (f (\\q. q))) (\\x. \\y. (\\k. k) x (y (\\w. w)))");
        let a = evaluate(&t, Strategy::SkNeed, &EvalOptions::default()).unwrap();
        let opts = EvalOptions { skeletonizer: Skeletonizer::Marking, ..Default::default() };
        let b = evaluate(&t, Strategy::SkNeed, &opts).unwrap();
        assert_eq!(a.labels, b.labels);
        assert!(a.term.alpha_eq(&b.term));
    }
}
