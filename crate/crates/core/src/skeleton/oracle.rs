//! Skeletal decomposition computed directly from its recursive definition
//! on tree terms. Quadratic, used as a reference.

use std::collections::HashSet;

use super::SkeletonError;
use crate::term::{Name, NameSupply, SkTerm};

/// Skeleton plus flesh bindings, innermost binding first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub skeleton: SkTerm,
    pub flesh: Vec<(Name, SkTerm)>,
}

impl Decomposition {
    /// Substitute the flesh back into the skeleton.
    pub fn recompose(&self) -> SkTerm {
        self.flesh.iter().rev().fold(self.skeleton.clone(), |t, (p, u)| t.subst(p, u))
    }

    /// The skeleton under its flesh: `t[p1\u1]...[pk\uk]`.
    pub fn as_substitution(&self, body: SkTerm) -> SkTerm {
        self.flesh.iter().fold(body, |t, (p, u)| SkTerm::Es(Box::new(t), p.clone(), Box::new(u.clone())))
    }
}

fn disjoint(t: &SkTerm, theta: &HashSet<Name>) -> bool {
    t.free_vars().is_disjoint(theta)
}

/// Decompose `t` relative to the variables `theta`.
pub fn skdec(t: &SkTerm, theta: &HashSet<Name>, names: &mut NameSupply) -> Decomposition {
    let mut flesh = Vec::new();
    let skeleton = skdec_rec(t, theta, names, &mut flesh);
    Decomposition { skeleton, flesh }
}

fn skdec_rec(t: &SkTerm, theta: &HashSet<Name>, names: &mut NameSupply, flesh: &mut Vec<(Name, SkTerm)>) -> SkTerm {
    if let SkTerm::Var(_) = t {
        return t.clone();
    }
    if disjoint(t, theta) {
        let p = names.fresh("p");
        flesh.push((p.clone(), t.clone()));
        return SkTerm::Var(p);
    }
    match t {
        SkTerm::Abs(x, u) => {
            let mut inner = theta.clone();
            inner.insert(x.clone());
            SkTerm::Abs(x.clone(), Box::new(skdec_rec(u, &inner, names, flesh)))
        }
        SkTerm::App(u, s) => {
            let r = skdec_rec(u, theta, names, flesh);
            let p = skdec_rec(s, theta, names, flesh);
            SkTerm::app(r, p)
        }
        SkTerm::Var(_) | SkTerm::Es(..) | SkTerm::SkEs(..) => unreachable!("pure terms only"),
    }
}

/// Skeleton and flesh of a value `λx.t`.
pub fn skeleton_of(v: &SkTerm, names: &mut NameSupply) -> Result<Decomposition, SkeletonError> {
    let SkTerm::Abs(x, t) = v else {
        return Err(SkeletonError::NotAValue);
    };
    if !v.is_pure() {
        return Err(SkeletonError::NotPure);
    }
    let theta = HashSet::from([x.clone()]);
    let d = skdec(t, &theta, names);
    Ok(Decomposition { skeleton: SkTerm::Abs(x.clone(), Box::new(d.skeleton)), flesh: d.flesh })
}

/// True when `v` is its own skeleton.
pub fn is_skeleton(v: &SkTerm) -> bool {
    let mut names = NameSupply::avoiding(v);
    matches!(skeleton_of(v, &mut names), Ok(d) if d.flesh.is_empty())
}

/// Rename flesh variables by their position (`#0`, `#1`, ...) so that
/// decompositions produced with different name supplies can be compared.
pub fn normalize_flesh_names(d: &Decomposition) -> Decomposition {
    let mut skeleton = d.skeleton.clone();
    let mut flesh = Vec::new();
    for (i, (p, u)) in d.flesh.iter().enumerate() {
        let q: Name = format!("#{i}").into();
        skeleton = skeleton.subst(p, &SkTerm::Var(q.clone()));
        flesh.push((q, u.clone()));
    }
    Decomposition { skeleton, flesh }
}
