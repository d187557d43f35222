//! Canonical representatives for structural equivalence.
//!
//! Structural equivalence moves a substitution `[x\s]` (or `[x\\v]`) across
//! an evaluation context when nothing is captured. The canonical form
//! floats substitutions out of application heads and out of needed
//! substitution arguments, orders each chain of substitutions, and then
//! renames every binder by its position in a preorder traversal.
//!
//! Equal canonical forms imply equivalence. The converse is not claimed:
//! chains are ordered by live/dead status and by a shape key, which
//! separates every equivalence class met in the test suites but is not a
//! decision procedure in general.

use std::collections::HashSet;

use super::contexts::needed_occurrences;
use crate::term::{Name, SkTerm};

fn needs(t: &SkTerm, x: &Name) -> bool {
    !needed_occurrences(t, x).is_empty()
}

fn subst_frame(skeletal: bool, body: SkTerm, x: Name, arg: SkTerm) -> SkTerm {
    if skeletal {
        SkTerm::SkEs(Box::new(body), x, Box::new(arg))
    } else {
        SkTerm::Es(Box::new(body), x, Box::new(arg))
    }
}

/// `(t[x\s]) a ≡ (t a)[x\s]`, applied as long as possible.
fn float_out_of_head(h: SkTerm, a: SkTerm) -> SkTerm {
    match h {
        SkTerm::Es(b, x, s) if !a.occurs_free(&x) => SkTerm::Es(Box::new(float_out_of_head(*b, a)), x, s),
        SkTerm::SkEs(b, x, s) if !a.occurs_free(&x) => SkTerm::SkEs(Box::new(float_out_of_head(*b, a)), x, s),
        h => SkTerm::app(h, a),
    }
}

/// `b[x\u[y\s]] ≡ b[x\u][y\s]` when `x` is needed in `b`.
fn float_out_of_arg(b: SkTerm, x: Name, u: SkTerm) -> SkTerm {
    match u {
        SkTerm::Es(c, y, s) if !b.occurs_free(&y) => SkTerm::Es(Box::new(float_out_of_arg(b, x, *c)), y, s),
        SkTerm::SkEs(c, y, s) if !b.occurs_free(&y) => SkTerm::SkEs(Box::new(float_out_of_arg(b, x, *c)), y, s),
        u => SkTerm::Es(Box::new(b), x, Box::new(u)),
    }
}

/// Float substitutions outward through every evaluation position.
pub fn float(t: &SkTerm) -> SkTerm {
    match t {
        SkTerm::Var(_) | SkTerm::Abs(..) => t.clone(),
        SkTerm::App(h, a) => float_out_of_head(float(h), (**a).clone()),
        SkTerm::Es(b, x, u) => {
            let b = float(b);
            if needs(&b, x) {
                float_out_of_arg(b, x.clone(), float(u))
            } else {
                SkTerm::Es(Box::new(b), x.clone(), u.clone())
            }
        }
        SkTerm::SkEs(b, x, v) => SkTerm::SkEs(Box::new(float(b)), x.clone(), v.clone()),
    }
}

struct Frame {
    skeletal: bool,
    x: Name,
    arg: SkTerm,
}

fn peel(t: &SkTerm) -> (Vec<Frame>, &SkTerm) {
    let mut frames = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            SkTerm::Es(b, x, a) => {
                frames.push(Frame { skeletal: false, x: x.clone(), arg: (**a).clone() });
                cur = b;
            }
            SkTerm::SkEs(b, x, a) => {
                frames.push(Frame { skeletal: true, x: x.clone(), arg: (**a).clone() });
                cur = b;
            }
            _ => {
                frames.reverse();
                return (frames, cur);
            }
        }
    }
}

struct Namer {
    counter: usize,
}

impl Namer {
    fn fresh(&mut self) -> Name {
        let n = format!("%{}", self.counter);
        self.counter += 1;
        n.into()
    }

    fn lookup(scope: &[(Name, Name)], x: &Name) -> Name {
        scope.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone())
    }

    fn go(&mut self, t: &SkTerm, scope: &mut Vec<(Name, Name)>, eval: bool) -> SkTerm {
        if let (true, SkTerm::Es(..) | SkTerm::SkEs(..)) = (eval, t) {
            return self.chain(t, scope);
        }
        match t {
            SkTerm::Var(x) => SkTerm::Var(Self::lookup(scope, x)),
            SkTerm::Abs(x, b) => {
                let y = self.fresh();
                scope.push((x.clone(), y.clone()));
                let b = self.go(b, scope, false);
                scope.pop();
                SkTerm::Abs(y, Box::new(b))
            }
            SkTerm::App(h, a) => {
                let h = self.go(h, scope, eval);
                let a = self.go(a, scope, false);
                SkTerm::app(h, a)
            }
            SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
                let y = self.fresh();
                scope.push((x.clone(), y.clone()));
                let b2 = self.go(b, scope, false);
                scope.pop();
                let a2 = self.go(a, scope, false);
                subst_frame(matches!(t, SkTerm::SkEs(..)), b2, y, a2)
            }
        }
    }

    fn chain(&mut self, t: &SkTerm, scope: &mut Vec<(Name, Name)>) -> SkTerm {
        let (frames, core) = peel(t);
        let k = frames.len();
        let chain_vars: HashSet<Name> = frames.iter().map(|f| f.x.clone()).collect();
        let core_fv = core.free_vars();
        let arg_fv: Vec<HashSet<Name>> = frames.iter().map(|f| f.arg.free_vars()).collect();
        let dead: Vec<bool> = (0..k)
            .map(|i| !core_fv.contains(&frames[i].x) && (0..i).all(|j| !arg_fv[j].contains(&frames[i].x)))
            .collect();
        let needed: Vec<bool> = (0..k)
            .map(|i| {
                if frames[i].skeletal {
                    return false;
                }
                let mut body = core.clone();
                for f in &frames[..i] {
                    body = subst_frame(f.skeletal, body, f.x.clone(), f.arg.clone());
                }
                needs(&body, &frames[i].x)
            })
            .collect();
        let keys: Vec<String> = frames
            .iter()
            .map(|f| format!("{}{}", if f.skeletal { "\\\\" } else { "\\" }, shape_key(&f.arg, scope, &chain_vars)))
            .collect();
        let independent = |i: usize, j: usize| {
            (dead[i] || dead[j]) && !arg_fv[i].contains(&frames[j].x) && !arg_fv[j].contains(&frames[i].x)
        };
        // Lexicographic normal form of the chain read innermost first:
        // live substitutions before dead ones, dead ones by shape.
        let mut remaining: Vec<usize> = (0..k).collect();
        let mut order = Vec::with_capacity(k);
        while !remaining.is_empty() {
            let pick = (0..remaining.len())
                .filter(|&p| (0..p).all(|q| independent(remaining[p], remaining[q])))
                .min_by(|&p, &q| {
                    let (a, b) = (remaining[p], remaining[q]);
                    (dead[a], &keys[a], a).cmp(&(dead[b], &keys[b], b))
                })
                .expect("the first remaining substitution is always available");
            order.push(remaining.remove(pick));
        }
        // Preorder naming: outermost binder first, then the core, then the
        // arguments from the innermost outward.
        let base = scope.len();
        let mut fresh_names = vec![Name::from(""); k];
        for &i in order.iter().rev() {
            let y = self.fresh();
            fresh_names[i] = y.clone();
            scope.push((frames[i].x.clone(), y));
        }
        let mut out = self.go(core, scope, true);
        for &i in order.iter() {
            scope.pop();
            let arg = self.go(&frames[i].arg, scope, needed[i]);
            out = subst_frame(frames[i].skeletal, out, fresh_names[i].clone(), arg);
        }
        debug_assert_eq!(scope.len(), base);
        out
    }
}

/// Shape of a substitution argument: binders inside it numbered locally,
/// variables bound by the surrounding chain anonymized, others by their
/// canonical name.
fn shape_key(t: &SkTerm, scope: &[(Name, Name)], chain: &HashSet<Name>) -> String {
    let mut local = Vec::new();
    let mut counter = 0usize;
    let renamed = shape_rec(t, scope, chain, &mut local, &mut counter);
    renamed.to_string()
}

fn shape_rec(
    t: &SkTerm,
    scope: &[(Name, Name)],
    chain: &HashSet<Name>,
    local: &mut Vec<(Name, Name)>,
    counter: &mut usize,
) -> SkTerm {
    fn bind(x: &Name, local: &mut Vec<(Name, Name)>, counter: &mut usize) -> Name {
        let y: Name = format!("%l{counter}").into();
        *counter += 1;
        local.push((x.clone(), y.clone()));
        y
    }
    match t {
        SkTerm::Var(x) => {
            if let Some((_, y)) = local.iter().rev().find(|(a, _)| a == x) {
                SkTerm::Var(y.clone())
            } else if chain.contains(x) {
                SkTerm::var("#")
            } else {
                SkTerm::Var(Namer::lookup(scope, x))
            }
        }
        SkTerm::Abs(x, b) => {
            let y = bind(x, local, counter);
            let b = shape_rec(b, scope, chain, local, counter);
            local.pop();
            SkTerm::Abs(y, Box::new(b))
        }
        SkTerm::App(h, a) => {
            let h = shape_rec(h, scope, chain, local, counter);
            let a = shape_rec(a, scope, chain, local, counter);
            SkTerm::app(h, a)
        }
        SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
            let a2 = shape_rec(a, scope, chain, local, counter);
            let y = bind(x, local, counter);
            let b2 = shape_rec(b, scope, chain, local, counter);
            local.pop();
            subst_frame(matches!(t, SkTerm::SkEs(..)), b2, y, a2)
        }
    }
}

/// Canonical representative of the structural equivalence class of `t`.
pub fn canonicalize(t: &SkTerm) -> SkTerm {
    let floated = float(t);
    let mut namer = Namer { counter: 0 };
    namer.go(&floated, &mut Vec::new(), true)
}

fn frame_of(t: &SkTerm) -> Option<(bool, &SkTerm, &Name, &SkTerm)> {
    match t {
        SkTerm::Es(b, x, a) => Some((false, b, x, a)),
        SkTerm::SkEs(b, x, a) => Some((true, b, x, a)),
        _ => None,
    }
}

/// Every term obtained from `t` by one structural-equivalence rewrite at
/// an evaluation position, in either direction.
pub fn equivalence_steps(t: &SkTerm) -> Vec<SkTerm> {
    let mut out = Vec::new();
    // Root rewrites.
    match t {
        SkTerm::App(h, a) => {
            if let Some((sk, b, x, s)) = frame_of(h) {
                if !a.occurs_free(x) {
                    out.push(subst_frame(sk, SkTerm::app(b.clone(), (**a).clone()), x.clone(), s.clone()));
                }
            }
        }
        SkTerm::Es(..) | SkTerm::SkEs(..) => {
            let (sk_outer, body, y, u) = frame_of(t).unwrap();
            // Push into an application head.
            if let SkTerm::App(c, a) = body {
                if !a.occurs_free(y) {
                    out.push(SkTerm::app(subst_frame(sk_outer, (**c).clone(), y.clone(), u.clone()), (**a).clone()));
                }
            }
            if let Some((sk_inner, t0, x, s)) = frame_of(body) {
                // Swap adjacent substitutions.
                let a = !t0.occurs_free(y) && !s.occurs_free(y) && !u.occurs_free(x);
                let b = !t0.occurs_free(x) && !u.occurs_free(x) && !s.occurs_free(y);
                if a || b {
                    let inner = subst_frame(sk_outer, t0.clone(), y.clone(), u.clone());
                    out.push(subst_frame(sk_inner, inner, x.clone(), s.clone()));
                }
                // Push into a needed substitution argument.
                if !sk_inner && needs(t0, x) && !t0.occurs_free(y) {
                    let arg = subst_frame(sk_outer, s.clone(), y.clone(), u.clone());
                    out.push(SkTerm::Es(Box::new(t0.clone()), x.clone(), Box::new(arg)));
                }
            }
            // Pull out of a needed substitution argument.
            if let SkTerm::Es(b, x, arg) = t {
                if needs(b, x) {
                    if let Some((sk_inner, c, z, s)) = frame_of(arg) {
                        if !b.occurs_free(z) {
                            let inner = SkTerm::Es(b.clone(), x.clone(), Box::new(c.clone()));
                            out.push(subst_frame(sk_inner, inner, z.clone(), s.clone()));
                        }
                    }
                }
            }
        }
        _ => {}
    }
    // Rewrites below, at evaluation positions.
    match t {
        SkTerm::App(h, a) => {
            for h2 in equivalence_steps(h) {
                out.push(SkTerm::App(Box::new(h2), a.clone()));
            }
        }
        SkTerm::Es(b, x, u) => {
            for b2 in equivalence_steps(b) {
                out.push(SkTerm::Es(Box::new(b2), x.clone(), u.clone()));
            }
            if needs(b, x) {
                for u2 in equivalence_steps(u) {
                    out.push(SkTerm::Es(b.clone(), x.clone(), Box::new(u2)));
                }
            }
        }
        SkTerm::SkEs(b, x, v) => {
            for b2 in equivalence_steps(b) {
                out.push(SkTerm::SkEs(Box::new(b2), x.clone(), v.clone()));
            }
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse::parse_syntax;

    fn p(s: &str) -> SkTerm {
        parse_syntax(s).unwrap()
    }

    #[test]
    fn skeletal_substitution_floats_out_of_head() {
        let s = p("s");
        let lhs = SkTerm::es(SkTerm::app(SkTerm::skes(p("x i (x i)"), "x", p("\\z. w z")), p("y")), "w", s.clone());
        let rhs = SkTerm::es(SkTerm::skes(p("x i (x i) y"), "x", p("\\z. w z")), "w", s);
        assert_eq!(canonicalize(&lhs), canonicalize(&rhs));
    }

    #[test]
    fn alpha_equivalent_terms_agree() {
        let a = SkTerm::es(p("x \\q. q"), "x", p("\\r. r"));
        let b = SkTerm::es(p("y \\u. u"), "y", p("\\v. v"));
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn distinct_terms_differ() {
        let a = SkTerm::es(p("x x"), "x", p("\\r. r"));
        let b = SkTerm::es(p("x y"), "x", p("\\r. r"));
        assert_ne!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn dead_substitutions_commute() {
        let a = SkTerm::es(SkTerm::es(p("\\z. z"), "a", p("f")), "b", p("g"));
        let b = SkTerm::es(SkTerm::es(p("\\z. z"), "b", p("g")), "a", p("f"));
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn every_generated_step_preserves_the_canonical_form() {
        let t = SkTerm::es(
            SkTerm::app(SkTerm::es(p("x y"), "y", p("\\a. a")), p("c")),
            "x",
            SkTerm::es(p("\\b. d"), "d", p("e")),
        );
        let steps = equivalence_steps(&t);
        assert!(!steps.is_empty());
        for s in steps {
            assert_eq!(canonicalize(&t), canonicalize(&s), "{t} vs {s}");
        }
    }
}
