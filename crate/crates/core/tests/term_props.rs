//! Property tests for the term representation.

use proptest::prelude::*;
use skelmad_core::calculus::well_named;
use skelmad_core::term::parse::parse_syntax;
use skelmad_core::term::{Naming, SkTerm, TermStore};

/// Pure terms over a small name pool, so shadowing and free names are common.
fn pure_term() -> impl Strategy<Value = SkTerm> {
    let names = prop::sample::select(vec!["x", "y", "z", "f", "u_1"]);
    let leaf = names.clone().prop_map(SkTerm::var);
    leaf.prop_recursive(6, 40, 2, move |inner| {
        prop_oneof![
            (names.clone(), inner.clone()).prop_map(|(x, b)| SkTerm::abs(x, b)),
            (inner.clone(), inner).prop_map(|(h, a)| SkTerm::app(h, a)),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(t in pure_term()) {
        let back = parse_syntax(&t.to_string()).unwrap();
        prop_assert_eq!(&back, &t);
        let unicode = parse_syntax(&t.unicode()).unwrap();
        prop_assert_eq!(unicode, t);
    }

    #[test]
    fn loading_preserves_the_term_up_to_alpha(t in pure_term()) {
        let mut store = TermStore::new();
        let n = store.insert(&t).unwrap();
        prop_assert!(store.audit_tree(n).is_ok());
        prop_assert!(store.is_well_bound(n));
        prop_assert_eq!(store.size(n), t.size());
        let back = store.to_syntax(n);
        prop_assert!(back.alpha_eq(&t));
        prop_assert!(back.is_well_named());
        prop_assert_eq!(back.free_vars(), t.free_vars());
    }

    #[test]
    fn copies_are_fresh_and_share_free_declarations(t in pure_term(), fresh in any::<bool>()) {
        let mut store = TermStore::new();
        let n = store.insert(&t).unwrap();
        let naming = if fresh { Naming::Fresh } else { Naming::Preserve };
        let c = store.copy(n, naming);
        prop_assert!(store.audit_tree(c).is_ok());
        prop_assert!(store.alpha_eq(n, c));
        prop_assert_eq!(store.free_decls(n), store.free_decls(c));
        prop_assert_eq!(store.size(c), store.size(n));
        if fresh {
            let original = store.to_syntax(n).binders();
            prop_assert!(store.to_syntax(c).binders().iter().all(|x| !original.contains(x)));
        }
    }

    #[test]
    fn store_and_tree_alpha_equivalence_agree(s in pure_term(), t in pure_term()) {
        let mut store = TermStore::new();
        let a = store.insert(&s).unwrap();
        let b = store.insert(&t).unwrap();
        prop_assert_eq!(store.alpha_eq(a, b), s.alpha_eq(&t));
        prop_assert!(s.alpha_eq(&s.clone()));
    }

    #[test]
    fn renaming_apart_keeps_alpha_class(t in pure_term()) {
        let w = well_named(&t);
        prop_assert!(w.is_well_named());
        prop_assert!(w.alpha_eq(&t));
    }
}
