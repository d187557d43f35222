//! Marked terms as explicit trees, with the one-step rewriting rules of the
//! skeleton marking algorithm. Used to check the algorithm's diamond
//! property and to cross-check the in-place implementation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::oracle::Decomposition;
use super::SkeletonError;
use crate::term::{Name, NameSupply, NodeId, NodeKind, SkTerm, TermStore};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marked {
    Var {
        x: Name,
        marked: bool,
    },
    Abs {
        x: Name,
        marked: bool,
        body: Box<Marked>,
    },
    App {
        marked: bool,
        head: Box<Marked>,
        arg: Box<Marked>,
    },
    /// `⇑m`
    Up(Box<Marked>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Pr1,
    Pr2,
    Pr3,
    Ab1,
    Ab2,
    Ab3,
}

impl Marked {
    pub fn unmarked(t: &SkTerm) -> Marked {
        match t {
            SkTerm::Var(x) => Marked::Var { x: x.clone(), marked: false },
            SkTerm::Abs(x, b) => Marked::Abs { x: x.clone(), marked: false, body: Box::new(Marked::unmarked(b)) },
            SkTerm::App(h, a) => {
                Marked::App { marked: false, head: Box::new(Marked::unmarked(h)), arg: Box::new(Marked::unmarked(a)) }
            }
            SkTerm::Es(..) | SkTerm::SkEs(..) => panic!("marked terms are pure"),
        }
    }

    /// Initial state for the value `λx.t`: `λx.⇑t`.
    pub fn initial(v: &SkTerm) -> Result<Marked, SkeletonError> {
        match v {
            SkTerm::Abs(x, t) if t.is_pure() => Ok(Marked::Abs {
                x: x.clone(),
                marked: false,
                body: Box::new(Marked::Up(Box::new(Marked::unmarked(t)))),
            }),
            SkTerm::Abs(..) => Err(SkeletonError::NotPure),
            _ => Err(SkeletonError::NotAValue),
        }
    }

    /// Read the marks of a stored value.
    pub fn from_store(store: &TermStore, n: NodeId) -> Marked {
        let marked = store.is_marked(n);
        match store.kind(n) {
            NodeKind::Var(d) => Marked::Var { x: store.name(d).clone(), marked },
            NodeKind::Abs { decl, body } => {
                Marked::Abs { x: store.name(decl).clone(), marked, body: Box::new(Marked::from_store(store, body)) }
            }
            NodeKind::App { head, arg } => Marked::App {
                marked,
                head: Box::new(Marked::from_store(store, head)),
                arg: Box::new(Marked::from_store(store, arg)),
            },
            NodeKind::Vacant => panic!("freed node"),
        }
    }

    pub fn up(self) -> Marked {
        Marked::Up(Box::new(self))
    }

    fn children(&self) -> Vec<&Marked> {
        match self {
            Marked::Var { .. } => vec![],
            Marked::Abs { body, .. } => vec![body],
            Marked::App { head, arg, .. } => vec![head, arg],
            Marked::Up(m) => vec![m],
        }
    }

    fn fold(&self, f: &mut impl FnMut(&Marked)) {
        f(self);
        for c in self.children() {
            c.fold(f);
        }
    }

    /// Marked constructors.
    pub fn white_size(&self) -> usize {
        let mut n = 0;
        self.fold(&mut |m| match m {
            Marked::Var { marked: true, .. } | Marked::Abs { marked: true, .. } | Marked::App { marked: true, .. } => {
                n += 1
            }
            _ => {}
        });
        n
    }

    pub fn unmarked_count(&self) -> usize {
        let mut n = 0;
        self.fold(&mut |m| match m {
            Marked::Var { marked: false, .. }
            | Marked::Abs { marked: false, .. }
            | Marked::App { marked: false, .. } => n += 1,
            _ => {}
        });
        n
    }

    pub fn up_count(&self) -> usize {
        let mut n = 0;
        self.fold(&mut |m| {
            if let Marked::Up(_) = m {
                n += 1
            }
        });
        n
    }

    /// Termination measure: strictly decreases lexicographically on every
    /// rule application.
    pub fn measure(&self) -> (usize, usize) {
        (self.unmarked_count(), self.up_count())
    }

    /// Replace the unmarked occurrences of `x` by `⇑x◦`.
    fn raise_occurrences(&self, x: &Name) -> Marked {
        match self {
            Marked::Var { x: y, marked: false } if y == x => Marked::Var { x: y.clone(), marked: true }.up(),
            Marked::Var { .. } => self.clone(),
            Marked::Abs { x: y, .. } if y == x => self.clone(),
            Marked::Abs { x: y, marked, body } => {
                Marked::Abs { x: y.clone(), marked: *marked, body: Box::new(body.raise_occurrences(x)) }
            }
            Marked::App { marked, head, arg } => Marked::App {
                marked: *marked,
                head: Box::new(head.raise_occurrences(x)),
                arg: Box::new(arg.raise_occurrences(x)),
            },
            Marked::Up(m) => m.raise_occurrences(x).up(),
        }
    }

    /// Rewrites applicable at the root.
    fn root_steps(&self) -> Vec<(Rule, Marked)> {
        let mut out = Vec::new();
        match self {
            Marked::App { marked, head, arg } => {
                if let Marked::Up(m) = &**head {
                    let app = Marked::App { marked: true, head: m.clone(), arg: arg.clone() };
                    out.push(if *marked { (Rule::Ab1, app) } else { (Rule::Pr1, app.up()) });
                }
                if let Marked::Up(n) = &**arg {
                    let app = Marked::App { marked: true, head: head.clone(), arg: n.clone() };
                    out.push(if *marked { (Rule::Ab2, app) } else { (Rule::Pr2, app.up()) });
                }
            }
            Marked::Abs { x, marked, body } => {
                if let Marked::Up(m) = &**body {
                    if *marked {
                        out.push((Rule::Ab3, Marked::Abs { x: x.clone(), marked: true, body: m.clone() }));
                    } else {
                        let raised = m.raise_occurrences(x);
                        out.push((Rule::Pr3, Marked::Abs { x: x.clone(), marked: true, body: Box::new(raised) }.up()));
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Every one-step reduct, under any marked context.
    pub fn steps(&self) -> Vec<(Rule, Marked)> {
        let mut out = self.root_steps();
        match self {
            Marked::Var { .. } => {}
            Marked::Abs { x, marked, body } => {
                for (r, b) in body.steps() {
                    out.push((r, Marked::Abs { x: x.clone(), marked: *marked, body: Box::new(b) }));
                }
            }
            Marked::App { marked, head, arg } => {
                for (r, h) in head.steps() {
                    out.push((r, Marked::App { marked: *marked, head: Box::new(h), arg: arg.clone() }));
                }
                for (r, a) in arg.steps() {
                    out.push((r, Marked::App { marked: *marked, head: head.clone(), arg: Box::new(a) }));
                }
            }
            Marked::Up(m) => {
                for (r, n) in m.steps() {
                    out.push((r, n.up()));
                }
            }
        }
        out
    }

    /// Reduce with the first applicable rule until none applies.
    pub fn normalize(&self) -> (Marked, usize) {
        let mut m = self.clone();
        let mut n = 0;
        while let Some((_, next)) = m.steps().into_iter().next() {
            m = next;
            n += 1;
        }
        (m, n)
    }

    /// Drop marks, giving back the underlying pure term.
    pub fn erase(&self) -> SkTerm {
        match self {
            Marked::Var { x, .. } => SkTerm::Var(x.clone()),
            Marked::Abs { x, body, .. } => SkTerm::Abs(x.clone(), Box::new(body.erase())),
            Marked::App { head, arg, .. } => SkTerm::app(head.erase(), arg.erase()),
            Marked::Up(m) => m.erase(),
        }
    }
}

impl fmt::Display for Marked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marked::Var { x, marked } => write!(f, "{x}{}", if *marked { "◦" } else { "" }),
            Marked::Abs { x, marked, body } => write!(f, "(λ{}{x}.{body})", if *marked { "◦" } else { "" }),
            Marked::App { marked, head, arg } => write!(f, "({head} {}{arg})", if *marked { "◦ " } else { "" }),
            Marked::Up(m) => write!(f, "⇑{m}"),
        }
    }
}

fn disc_rec(t: &SkTerm, theta: &HashSet<Name>) -> Marked {
    if t.free_vars().is_disjoint(theta) {
        return Marked::unmarked(t);
    }
    match t {
        SkTerm::Var(x) => Marked::Var { x: x.clone(), marked: true },
        SkTerm::Abs(x, b) => {
            let mut inner = theta.clone();
            inner.insert(x.clone());
            Marked::Abs { x: x.clone(), marked: true, body: Box::new(disc_rec(b, &inner)) }
        }
        SkTerm::App(h, a) => {
            Marked::App { marked: true, head: Box::new(disc_rec(h, theta)), arg: Box::new(disc_rec(a, theta)) }
        }
        SkTerm::Es(..) | SkTerm::SkEs(..) => panic!("marked terms are pure"),
    }
}

/// The marked skeleton of a value, from its recursive definition.
pub fn disc(v: &SkTerm) -> Result<Marked, SkeletonError> {
    match v {
        SkTerm::Abs(x, t) if t.is_pure() => {
            Ok(Marked::Abs { x: x.clone(), marked: true, body: Box::new(disc_rec(t, &HashSet::from([x.clone()]))) })
        }
        SkTerm::Abs(..) => Err(SkeletonError::NotPure),
        _ => Err(SkeletonError::NotAValue),
    }
}

/// Split a marked term into skeleton and flesh.
pub fn split_marked(m: &Marked, names: &mut NameSupply) -> Result<Decomposition, SkeletonError> {
    let mut flesh = Vec::new();
    let skeleton = split_rec(m, names, &mut flesh)?;
    Ok(Decomposition { skeleton, flesh })
}

fn split_rec(m: &Marked, names: &mut NameSupply, flesh: &mut Vec<(Name, SkTerm)>) -> Result<SkTerm, SkeletonError> {
    match m {
        Marked::Up(_) => Err(SkeletonError::PendingFrontier),
        Marked::Var { x, .. } => Ok(SkTerm::Var(x.clone())),
        Marked::Abs { marked: false, .. } | Marked::App { marked: false, .. } => {
            if m.up_count() > 0 {
                return Err(SkeletonError::PendingFrontier);
            }
            let p = names.fresh("p");
            flesh.push((p.clone(), m.erase()));
            Ok(SkTerm::Var(p))
        }
        Marked::Abs { x, body, .. } => Ok(SkTerm::Abs(x.clone(), Box::new(split_rec(body, names, flesh)?))),
        Marked::App { head, arg, .. } => {
            let h = split_rec(head, names, flesh)?;
            let a = split_rec(arg, names, flesh)?;
            Ok(SkTerm::app(h, a))
        }
    }
}

/// Outcome of exploring every rewrite sequence from an initial state.
#[derive(Clone, Debug, Default)]
pub struct DiamondReport {
    pub states: usize,
    pub peaks: usize,
    pub failures: Vec<String>,
}

/// Explore all marked terms reachable from `Marked::initial(v)` and check
/// that every peak `m1 ← m → m2` with `m1 ≠ m2` joins in one step on each
/// side, that every rule application lowers the measure, that the graph is
/// graded (every path to the normal form has the same length), and that
/// the unique normal form is `⇑disc(v)` reached in `|disc(v)|◦` steps.
pub fn explore_diamond(v: &SkTerm) -> Result<DiamondReport, SkeletonError> {
    let init = Marked::initial(v)?;
    let expected = disc(v)?;
    let mut report = DiamondReport::default();
    let mut depth: HashMap<Marked, usize> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    depth.insert(init.clone(), 0);
    queue.push_back(init);
    let mut normal_forms = HashSet::new();
    while let Some(m) = queue.pop_front() {
        report.states += 1;
        let d = depth[&m];
        let steps = m.steps();
        if steps.is_empty() {
            if d != expected.white_size() {
                report.failures.push(format!("normal form {m} reached after {d} steps"));
            }
            normal_forms.insert(m);
            continue;
        }
        let measure = m.measure();
        let reducts: Vec<Marked> = steps.into_iter().map(|(_, n)| n).collect();
        for n in &reducts {
            if n.measure() >= measure {
                report.failures.push(format!("measure does not decrease on {m} -> {n}"));
            }
            match depth.get(n) {
                Some(&e) if e != d + 1 => report.failures.push(format!("{n} reached at depths {e} and {}", d + 1)),
                Some(_) => {}
                None => {
                    depth.insert(n.clone(), d + 1);
                    queue.push_back(n.clone());
                }
            }
        }
        for i in 0..reducts.len() {
            for j in i + 1..reducts.len() {
                if reducts[i] == reducts[j] {
                    continue;
                }
                report.peaks += 1;
                let left: HashSet<Marked> = reducts[i].steps().into_iter().map(|(_, n)| n).collect();
                let joins = reducts[j].steps().into_iter().any(|(_, n)| left.contains(&n));
                if !joins {
                    report.failures.push(format!("peak at {m} does not join in one step"));
                }
            }
        }
    }
    let target = expected.up();
    if normal_forms.len() != 1 || !normal_forms.contains(&target) {
        report.failures.push(format!("normal forms {normal_forms:?} differ from {target}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse::parse_syntax;

    #[test]
    fn disc_example() {
        let v = parse_syntax("\\x.\\y. (z w) x (y z)").unwrap();
        let d = disc(&v).unwrap();
        assert_eq!(d.white_size(), 7);
        assert_eq!(d.to_string(), "(λ◦x.(λ◦y.(((z w) ◦ x◦) ◦ (y◦ ◦ z))))");
    }

    #[test]
    fn normalization_reaches_disc() {
        let v = parse_syntax("\\x.\\y. (z w) x (y z)").unwrap();
        let (nf, n) = Marked::initial(&v).unwrap().normalize();
        let d = disc(&v).unwrap();
        assert_eq!(n, d.white_size());
        assert_eq!(nf, d.up());
    }

    #[test]
    fn critical_pair_on_two_raised_sides() {
        let m = Marked::App {
            marked: false,
            head: Box::new(Marked::Var { x: "a".into(), marked: true }.up()),
            arg: Box::new(Marked::Var { x: "b".into(), marked: true }.up()),
        };
        let rules: Vec<Rule> = m.steps().into_iter().map(|(r, _)| r).collect();
        assert_eq!(rules, vec![Rule::Pr1, Rule::Pr2]);
    }

    #[test]
    fn split_rejects_frontier() {
        let v = parse_syntax("\\x. x x").unwrap();
        let m = Marked::initial(&v).unwrap();
        assert_eq!(split_marked(&m, &mut NameSupply::new()).unwrap_err(), SkeletonError::PendingFrontier);
    }

    #[test]
    fn diamond_on_example() {
        let v = parse_syntax("\\x.\\y. (z w) x (y z) (x y)").unwrap();
        let r = explore_diamond(&v).unwrap();
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert!(r.peaks > 0);
    }
}
