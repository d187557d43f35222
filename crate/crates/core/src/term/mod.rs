//! Terms: tree syntax, parser, printer and the node arena.

pub mod parse;
pub mod store;
pub mod syntax;

use thiserror::Error;

pub use store::{DeclId, Naming, NodeId, NodeKind, Sub, TermStore, VarDecl};
pub use syntax::{base_name, name, Name, NameSupply, SkTerm, Style};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("term contains explicit substitutions")]
    NotPure,
}

/// Parse into a fresh store. Bound names are made pairwise distinct.
pub fn parse(src: &str) -> Result<(TermStore, NodeId), ParseError> {
    let syntax = parse::parse_syntax(src)?;
    let mut store = TermStore::new();
    let root = store.insert(&syntax).expect("parsed terms are pure");
    Ok((store, root))
}

/// Render a stored term in the re-parseable ASCII syntax.
pub fn print(store: &TermStore, n: NodeId) -> String {
    store.to_syntax(n).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_examples() {
        let (s, n) = parse("\\w. w").unwrap();
        assert_eq!(print(&s, n), "\\w. w");
        let (s, n) = parse("(\\x. x) (\\y. y)").unwrap();
        assert_eq!(print(&s, n), "(\\x. x) (\\y. y)");
        assert_eq!(s.size(n), 5);
    }

    #[test]
    fn round_trip_of_the_golden_input() {
        let src = "(\\i. (\\g. (\\z. (z i) (z i)) (g (g (g i)))) (\\x.\\y. (x i) (x i) y)) (\\w. w)";
        let (s, n) = parse(src).unwrap();
        let printed = print(&s, n);
        let (s2, n2) = parse(&printed).unwrap();
        assert!(s.to_syntax(n).alpha_eq(&s2.to_syntax(n2)));
        assert_eq!(print(&s2, n2), printed);
    }
}
