//! Tree terms with explicit and skeletal substitutions.
//!
//! `SkTerm` is the plain, unshared representation used by the calculus,
//! by machine read-back and by the test oracles. The arena representation
//! used by the machines lives in [`crate::term::store`].

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// Variable names. Cheap to clone and shareable across threads.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A term of the calculus: `x | λx.t | t u | t[x\u] | t[x\\v]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SkTerm {
    Var(Name),
    Abs(Name, Box<SkTerm>),
    App(Box<SkTerm>, Box<SkTerm>),
    /// `body[x\arg]`
    Es(Box<SkTerm>, Name, Box<SkTerm>),
    /// `body[x\\value]`, the payload being a skeleton.
    SkEs(Box<SkTerm>, Name, Box<SkTerm>),
}

impl SkTerm {
    pub fn var(x: &str) -> SkTerm {
        SkTerm::Var(name(x))
    }

    pub fn abs(x: &str, body: SkTerm) -> SkTerm {
        SkTerm::Abs(name(x), Box::new(body))
    }

    pub fn app(head: SkTerm, arg: SkTerm) -> SkTerm {
        SkTerm::App(Box::new(head), Box::new(arg))
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apps(head: SkTerm, args: impl IntoIterator<Item = SkTerm>) -> SkTerm {
        args.into_iter().fold(head, SkTerm::app)
    }

    pub fn es(body: SkTerm, x: &str, arg: SkTerm) -> SkTerm {
        SkTerm::Es(Box::new(body), name(x), Box::new(arg))
    }

    pub fn skes(body: SkTerm, x: &str, val: SkTerm) -> SkTerm {
        SkTerm::SkEs(Box::new(body), name(x), Box::new(val))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, SkTerm::Abs(..))
    }

    /// No explicit or skeletal substitution anywhere inside.
    pub fn is_pure(&self) -> bool {
        match self {
            SkTerm::Var(_) => true,
            SkTerm::Abs(_, b) => b.is_pure(),
            SkTerm::App(h, a) => h.is_pure() && a.is_pure(),
            SkTerm::Es(..) | SkTerm::SkEs(..) => false,
        }
    }

    /// Number of constructors. Substitutions count one each.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            match t {
                SkTerm::Var(_) => {}
                SkTerm::Abs(_, b) => stack.push(b),
                SkTerm::App(h, a) => {
                    stack.push(h);
                    stack.push(a);
                }
                SkTerm::Es(b, _, a) | SkTerm::SkEs(b, _, a) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        n
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            SkTerm::Var(y) => &**y == x,
            SkTerm::Abs(y, b) => &**y != x && b.occurs_free(x),
            SkTerm::App(h, a) => h.occurs_free(x) || a.occurs_free(x),
            SkTerm::Es(b, y, a) | SkTerm::SkEs(b, y, a) => (&**y != x && b.occurs_free(x)) || a.occurs_free(x),
        }
    }

    /// Every binder name (abstractions and substitutions), in preorder.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                SkTerm::Var(_) => {}
                SkTerm::Abs(x, b) => {
                    out.push(x.clone());
                    stack.push(b);
                }
                SkTerm::App(h, a) => {
                    stack.push(a);
                    stack.push(h);
                }
                SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
                    out.push(x.clone());
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    /// All names, bound or free.
    pub fn all_names(&self) -> HashSet<Name> {
        let mut out: HashSet<Name> = self.binders().into_iter().collect();
        out.extend(self.free_vars());
        out
    }

    /// Binders pairwise distinct and distinct from every free name.
    pub fn is_well_named(&self) -> bool {
        let fv = self.free_vars();
        let mut seen = HashSet::new();
        self.binders().into_iter().all(|x| !fv.contains(&x) && seen.insert(x))
    }

    pub fn alpha_eq(&self, other: &SkTerm) -> bool {
        let mut scope = Vec::new();
        alpha_rec(self, other, &mut scope)
    }

    /// Replace free occurrences of `x` by `u`. Assumes no capture can
    /// happen, which holds for well-named terms.
    pub fn subst(&self, x: &str, u: &SkTerm) -> SkTerm {
        match self {
            SkTerm::Var(y) if &**y == x => u.clone(),
            SkTerm::Var(_) => self.clone(),
            SkTerm::Abs(y, b) if &**y == x => SkTerm::Abs(y.clone(), b.clone()),
            SkTerm::Abs(y, b) => SkTerm::Abs(y.clone(), Box::new(b.subst(x, u))),
            SkTerm::App(h, a) => SkTerm::App(Box::new(h.subst(x, u)), Box::new(a.subst(x, u))),
            SkTerm::Es(b, y, a) => {
                let b2 = if &**y == x { (**b).clone() } else { b.subst(x, u) };
                SkTerm::Es(Box::new(b2), y.clone(), Box::new(a.subst(x, u)))
            }
            SkTerm::SkEs(b, y, a) => {
                let b2 = if &**y == x { (**b).clone() } else { b.subst(x, u) };
                SkTerm::SkEs(Box::new(b2), y.clone(), Box::new(a.subst(x, u)))
            }
        }
    }

    /// Copy with every binder renamed to a fresh name.
    pub fn rename_fresh(&self, names: &mut NameSupply) -> SkTerm {
        let mut scope = Vec::new();
        rename_rec(self, names, &mut scope)
    }

    pub fn render(&self, style: Style) -> String {
        let mut s = String::new();
        write_term(&mut s, self, Ctx::Top, style);
        s
    }

    /// Compact rendering with `λ`, as used in traces.
    pub fn unicode(&self) -> String {
        self.render(Style::Unicode)
    }
}

fn collect_free(t: &SkTerm, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match t {
        SkTerm::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        SkTerm::Abs(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        SkTerm::App(h, a) => {
            collect_free(h, bound, out);
            collect_free(a, bound, out);
        }
        SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
            collect_free(a, bound, out);
        }
    }
}

fn alpha_rec(t: &SkTerm, u: &SkTerm, scope: &mut Vec<(Name, Name)>) -> bool {
    match (t, u) {
        (SkTerm::Var(x), SkTerm::Var(y)) => {
            for (a, b) in scope.iter().rev() {
                if a == x || b == y {
                    return a == x && b == y;
                }
            }
            x == y
        }
        (SkTerm::Abs(x, b1), SkTerm::Abs(y, b2)) => {
            scope.push((x.clone(), y.clone()));
            let r = alpha_rec(b1, b2, scope);
            scope.pop();
            r
        }
        (SkTerm::App(h1, a1), SkTerm::App(h2, a2)) => alpha_rec(h1, h2, scope) && alpha_rec(a1, a2, scope),
        (SkTerm::Es(b1, x, a1), SkTerm::Es(b2, y, a2)) | (SkTerm::SkEs(b1, x, a1), SkTerm::SkEs(b2, y, a2)) => {
            if !alpha_rec(a1, a2, scope) {
                return false;
            }
            scope.push((x.clone(), y.clone()));
            let r = alpha_rec(b1, b2, scope);
            scope.pop();
            r
        }
        _ => false,
    }
}

fn rename_rec(t: &SkTerm, names: &mut NameSupply, scope: &mut Vec<(Name, Name)>) -> SkTerm {
    match t {
        SkTerm::Var(x) => {
            let n = scope.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone());
            SkTerm::Var(n)
        }
        SkTerm::Abs(x, b) => {
            let y = names.fresh(base_name(x));
            scope.push((x.clone(), y.clone()));
            let b2 = rename_rec(b, names, scope);
            scope.pop();
            SkTerm::Abs(y, Box::new(b2))
        }
        SkTerm::App(h, a) => SkTerm::App(Box::new(rename_rec(h, names, scope)), Box::new(rename_rec(a, names, scope))),
        SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
            let a2 = rename_rec(a, names, scope);
            let y = names.fresh(base_name(x));
            scope.push((x.clone(), y.clone()));
            let b2 = rename_rec(b, names, scope);
            scope.pop();
            if matches!(t, SkTerm::Es(..)) {
                SkTerm::Es(Box::new(b2), y, Box::new(a2))
            } else {
                SkTerm::SkEs(Box::new(b2), y, Box::new(a2))
            }
        }
    }
}

/// Strip a trailing `_<digits>` suffix, recovering the original name of a
/// renamed variable.
pub fn base_name(x: &str) -> &str {
    let mut s = x;
    while let Some((pre, suf)) = s.rsplit_once('_') {
        if !pre.is_empty() && !suf.is_empty() && suf.bytes().all(|b| b.is_ascii_digit()) {
            s = pre;
        } else {
            break;
        }
    }
    s
}

/// Source of fresh names `base_k`, with one counter shared by all bases.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    counter: u64,
    used: HashSet<Name>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// A supply that never returns a name occurring in `t`.
    pub fn avoiding(t: &SkTerm) -> Self {
        let mut s = Self::new();
        s.reserve_term(t);
        s
    }

    pub fn reserve(&mut self, x: Name) {
        self.used.insert(x);
    }

    pub fn reserve_term(&mut self, t: &SkTerm) {
        self.used.extend(t.all_names());
    }

    pub fn is_used(&self, x: &str) -> bool {
        self.used.contains(x)
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        loop {
            self.counter += 1;
            let cand: Name = Arc::from(format!("{base}_{}", self.counter));
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }
}

/// Output style for terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// `\x. x y`, re-parseable by [`crate::term::parse`].
    Ascii,
    /// `λx.x y`
    Unicode,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Head,
    Arg,
    Postfix,
}

fn write_term(out: &mut String, t: &SkTerm, ctx: Ctx, style: Style) {
    let parens = match t {
        SkTerm::Var(_) => false,
        SkTerm::Abs(..) => ctx != Ctx::Top,
        SkTerm::App(..) => matches!(ctx, Ctx::Arg | Ctx::Postfix),
        SkTerm::Es(..) | SkTerm::SkEs(..) => ctx == Ctx::Arg,
    };
    if parens {
        out.push('(');
    }
    match t {
        SkTerm::Var(x) => out.push_str(x),
        SkTerm::Abs(x, b) => {
            match style {
                Style::Ascii => {
                    out.push('\\');
                    out.push_str(x);
                    out.push_str(". ");
                }
                Style::Unicode => {
                    out.push('λ');
                    out.push_str(x);
                    out.push('.');
                }
            }
            write_term(out, b, Ctx::Top, style);
        }
        SkTerm::App(h, a) => {
            write_term(out, h, Ctx::Head, style);
            out.push(' ');
            write_term(out, a, Ctx::Arg, style);
        }
        SkTerm::Es(b, x, a) | SkTerm::SkEs(b, x, a) => {
            write_term(out, b, Ctx::Postfix, style);
            out.push('[');
            out.push_str(x);
            out.push_str(if matches!(t, SkTerm::Es(..)) { "\\" } else { "\\\\" });
            write_term(out, a, Ctx::Top, style);
            out.push(']');
        }
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for SkTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Ascii))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(x: &str) -> SkTerm {
        SkTerm::abs(x, SkTerm::var(x))
    }

    #[test]
    fn printing() {
        assert_eq!(id("w").to_string(), "\\w. w");
        assert_eq!(SkTerm::app(id("x"), id("y")).to_string(), "(\\x. x) (\\y. y)");
        let t = SkTerm::es(SkTerm::app(SkTerm::var("x"), SkTerm::var("x")), "x", id("y"));
        assert_eq!(t.unicode(), "(x x)[x\\λy.y]");
        let s = SkTerm::skes(SkTerm::var("x"), "x", id("y"));
        assert_eq!(s.unicode(), "x[x\\\\λy.y]");
    }

    #[test]
    fn sizes() {
        assert_eq!(id("x").size(), 2);
        assert_eq!(SkTerm::app(id("x"), id("y")).size(), 5);
        assert_eq!(SkTerm::es(SkTerm::var("x"), "x", id("y")).size(), 4);
    }

    #[test]
    fn alpha() {
        assert!(id("x").alpha_eq(&id("y")));
        let t = SkTerm::abs("x", SkTerm::var("z"));
        assert!(!t.alpha_eq(&SkTerm::abs("z", SkTerm::var("z"))));
        let a = SkTerm::es(SkTerm::var("x"), "x", SkTerm::var("x"));
        let b = SkTerm::es(SkTerm::var("y"), "y", SkTerm::var("x"));
        assert!(a.alpha_eq(&b));
    }

    #[test]
    fn base_names() {
        assert_eq!(base_name("y_2"), "y");
        assert_eq!(base_name("p_3_10"), "p");
        assert_eq!(base_name("_7"), "_7");
        assert_eq!(base_name("x_"), "x_");
    }

    #[test]
    fn fresh_names_skip_used() {
        let mut s = NameSupply::avoiding(&SkTerm::var("x_1"));
        assert_eq!(&*s.fresh("x"), "x_2");
        assert_eq!(&*s.fresh("y"), "y_3");
    }
}
