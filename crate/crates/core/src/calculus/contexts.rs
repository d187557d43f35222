//! Exhaustive enumeration of the ways a term splits into an evaluation
//! context around a root redex. Written from the context grammar alone,
//! independently of the deterministic search in the parent module.

use super::{Dir, StepLabel, Strategy};
use crate::term::{Name, SkTerm};

/// A redex position: path to the redex, its rule, and for substitution
/// rules the path to the needed occurrence inside the body.
pub type Split = (Vec<Dir>, StepLabel, Vec<Dir>);

fn prefixed(d: Dir, mut paths: Vec<Vec<Dir>>) -> Vec<Vec<Dir>> {
    for p in paths.iter_mut() {
        p.insert(0, d);
    }
    paths
}

/// `S⟨v⟩`
pub fn is_answer(t: &SkTerm) -> bool {
    match t {
        SkTerm::Abs(..) => true,
        SkTerm::Es(b, _, _) | SkTerm::SkEs(b, _, _) => is_answer(b),
        _ => false,
    }
}

/// All `p` such that `t = E⟨x⟩` with the hole of `E` at `p` and `E` not
/// binding `x`.
pub fn needed_occurrences(t: &SkTerm, x: &Name) -> Vec<Vec<Dir>> {
    match t {
        SkTerm::Var(y) if y == x => vec![vec![]],
        SkTerm::Var(_) | SkTerm::Abs(..) => vec![],
        SkTerm::App(h, _) => prefixed(Dir::Head, needed_occurrences(h, x)),
        SkTerm::Es(b, y, u) => {
            if y == x {
                return vec![];
            }
            let mut out = prefixed(Dir::Body, needed_occurrences(b, x));
            for _ in needed_occurrences(b, y) {
                out.extend(prefixed(Dir::Arg, needed_occurrences(u, x)));
            }
            out
        }
        SkTerm::SkEs(b, y, _) => {
            if y == x {
                return vec![];
            }
            prefixed(Dir::Body, needed_occurrences(b, x))
        }
    }
}

fn root_redexes(t: &SkTerm, strategy: Strategy) -> Vec<Split> {
    let mut out = Vec::new();
    match t {
        SkTerm::App(h, _) if is_answer(h) => out.push((vec![], StepLabel::Db, vec![])),
        SkTerm::Es(b, x, u) if is_answer(u) => {
            let label = match strategy {
                Strategy::Need => StepLabel::Lsnd,
                Strategy::SkNeed => StepLabel::Sk,
            };
            for p in needed_occurrences(b, x) {
                out.push((vec![], label, p));
            }
        }
        SkTerm::SkEs(b, x, _) => {
            for p in needed_occurrences(b, x) {
                out.push((vec![], StepLabel::Ss, p));
            }
        }
        _ => {}
    }
    out
}

/// Every decomposition `t = E⟨r⟩` with `r` a root redex.
pub fn all_redexes(t: &SkTerm, strategy: Strategy) -> Vec<Split> {
    let mut out = root_redexes(t, strategy);
    let mut under = |d: Dir, inner: Vec<Split>| {
        for (mut p, l, v) in inner {
            p.insert(0, d);
            out.push((p, l, v));
        }
    };
    match t {
        SkTerm::Var(_) | SkTerm::Abs(..) => {}
        SkTerm::App(h, _) => under(Dir::Head, all_redexes(h, strategy)),
        SkTerm::Es(b, x, u) => {
            under(Dir::Body, all_redexes(b, strategy));
            for _ in needed_occurrences(b, x) {
                under(Dir::Arg, all_redexes(u, strategy));
            }
        }
        SkTerm::SkEs(b, _, _) => under(Dir::Body, all_redexes(b, strategy)),
    }
    out
}
