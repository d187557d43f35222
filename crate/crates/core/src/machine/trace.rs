//! One-line rendering of machine states: `chain | code | stack | env`.

use super::{Label, Machine};
use crate::term::{DeclId, NodeId, Sub};

impl Machine {
    fn term_text(&self, n: NodeId) -> String {
        self.store.to_syntax(n).unicode()
    }

    fn entry_text(&self, d: DeclId) -> String {
        let decl = self.store.decl(d);
        match decl.sub {
            Sub::Term(t) => format!("[{}\\{}]", decl.name, self.term_text(t)),
            Sub::Skel(v) => format!("[{}\\\\{}]", decl.name, self.term_text(v)),
            Sub::Hole => format!("[{}\\·]", decl.name),
            Sub::None => format!("[{}\\?]", decl.name),
        }
    }

    fn stack_text(&self, stack: &[NodeId]) -> String {
        stack.iter().rev().map(|&n| self.term_text(n)).collect::<Vec<_>>().join(":")
    }
}

/// Render a state, prefixed by the transition that produced it.
pub fn format_state(m: &Machine, label: Option<Label>) -> String {
    let chain = m
        .chain
        .iter()
        .map(|item| {
            let mut env: Vec<String> = m.segment(item.segment).into_iter().map(|d| m.entry_text(d)).collect();
            env.push(m.entry_text(item.var));
            format!("({},{},{})", m.store.name(item.var), m.stack_text(&item.stack), env.join(":"))
        })
        .collect::<Vec<_>>()
        .join(":");
    let env = m.env().into_iter().map(|d| m.entry_text(d)).collect::<Vec<_>>().join(":");
    let prefix = label.map(|l| format!("→{}", l.symbol())).unwrap_or_default();
    format!("{prefix:<6}{chain} | {} | {} | {env}", m.term_text(m.code), m.stack_text(&m.stack))
}
