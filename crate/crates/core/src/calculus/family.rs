//! The benchmark family `tₙ = (λx.x I (x I)) uₙ` with `u₀ = I`,
//! `uₙ₊₁ = γ uₙ` and `γ = λy.λz.y I (y I) z`.

use crate::term::{NodeId, SkTerm, TermStore};

const IDENTITY: &str = "(\\a. a)";
const GAMMA: &str = "(\\y. \\z. y (\\a. a) (y (\\a. a)) z)";

fn u_source(n: usize) -> String {
    let mut s = IDENTITY.to_string();
    for _ in 0..n {
        s = format!("{GAMMA} ({s})");
    }
    s
}

/// Source text of `tₙ`. Binder names repeat; loading it renames them.
pub fn family_source(n: usize) -> String {
    format!("(\\x. x (\\a. a) (x (\\a. a))) ({})", u_source(n))
}

/// `tₙ` in a fresh store, well-bound.
pub fn family_store(n: usize) -> (TermStore, NodeId) {
    crate::term::parse(&family_source(n)).expect("family source parses")
}

/// `tₙ` as a well-named tree term.
pub fn family_term(n: usize) -> SkTerm {
    let (store, root) = family_store(n);
    store.to_syntax(root)
}

/// Size of `tₙ`: 13, plus 14 per application of `γ`.
pub fn family_size(n: usize) -> usize {
    13 + 14 * n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_names() {
        for n in 0..6 {
            let t = family_term(n);
            assert_eq!(t.size(), family_size(n));
            assert!(t.is_well_named());
            assert!(t.free_vars().is_empty());
        }
    }

    #[test]
    fn first_members() {
        let t0 = crate::term::parse::parse_syntax(&family_source(0)).unwrap();
        let e = crate::term::parse::parse_syntax("(\\x. x (\\a. a) (x (\\b. b))) (\\c. c)").unwrap();
        assert!(t0.alpha_eq(&e));
    }
}
