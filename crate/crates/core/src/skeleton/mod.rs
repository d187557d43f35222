//! Skeleton extraction on stored values.
//!
//! [`mark_skeleton`] marks the skeleton of a value bottom-up, starting
//! from the occurrences of its bound variables, and [`split`] cuts the
//! unmarked maximal subterms out as flesh. Together they cost time linear
//! in the size of the skeleton, independently of the size of the value.

pub mod marked;
pub mod oracle;

use thiserror::Error;

use crate::term::{DeclId, NodeId, NodeKind, TermStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("skeleton extraction needs an abstraction")]
    NotAValue,
    #[error("value is already marked")]
    AlreadyMarked,
    #[error("value contains explicit substitutions")]
    NotPure,
    #[error("split reached an unabsorbed ⇑")]
    PendingFrontier,
}

/// A value whose skeleton has been marked. Consumed by [`split`].
#[derive(Debug)]
pub struct MarkedValue {
    root: NodeId,
    /// Rule applications performed: propagations plus absorptions.
    pub steps: u64,
    pub propagations: u64,
    pub absorptions: u64,
}

impl MarkedValue {
    pub fn root(&self) -> NodeId {
        self.root
    }
}

/// A skeleton together with its flesh, innermost binding first.
#[derive(Debug, Clone)]
pub struct SkeletalDecomposition {
    pub skeleton: NodeId,
    pub flesh: Vec<(DeclId, NodeId)>,
}

/// Mark the skeleton of the value `v`.
///
/// Each `⇑` frontier entry is a marked node waiting to move to its parent.
/// Reaching an unmarked application or abstraction marks it (for an
/// abstraction, together with the occurrences of its variable); reaching a
/// marked node ends the entry.
pub fn mark_skeleton(store: &mut TermStore, v: NodeId) -> Result<MarkedValue, SkeletonError> {
    if !store.is_value(v) {
        return Err(SkeletonError::NotAValue);
    }
    if store.is_marked(v) {
        return Err(SkeletonError::AlreadyMarked);
    }
    let mut frontier: Vec<NodeId> = Vec::new();
    store.set_mark(v, true);
    push_occurrences(store, v, &mut frontier);
    let mut propagations = 1u64;
    let mut absorptions = 0u64;
    while let Some(n) = frontier.pop() {
        if n == v {
            continue;
        }
        let p = store.parent(n).expect("frontier node below the root has a parent");
        if store.is_marked(p) {
            absorptions += 1;
            continue;
        }
        store.set_mark(p, true);
        propagations += 1;
        match store.kind(p) {
            NodeKind::App { .. } => frontier.push(p),
            NodeKind::Abs { .. } => {
                frontier.push(p);
                push_occurrences(store, p, &mut frontier);
            }
            other => unreachable!("parent is {other:?}"),
        }
    }
    Ok(MarkedValue { root: v, steps: propagations + absorptions, propagations, absorptions })
}

/// Mark the occurrences of the variable bound at `abs` and queue them so
/// that the first occurrence is processed first.
fn push_occurrences(store: &mut TermStore, abs: NodeId, frontier: &mut Vec<NodeId>) {
    let occ: Vec<NodeId> = store.occurrences(abs).to_vec();
    for &o in occ.iter().rev() {
        store.set_mark(o, true);
        frontier.push(o);
    }
}

/// Number of marked nodes below and including `v`.
pub fn white_size(store: &TermStore, v: NodeId) -> usize {
    let mut count = 0;
    let mut stack = vec![v];
    while let Some(n) = stack.pop() {
        if store.is_marked(n) {
            count += 1;
        }
        match store.kind(n) {
            NodeKind::Abs { body, .. } => stack.push(body),
            NodeKind::App { head, arg } => {
                stack.push(arg);
                stack.push(head);
            }
            _ => {}
        }
    }
    count
}

/// Cut the flesh out of a marked value, in place.
///
/// Every maximal unmarked non-variable subterm is replaced by an
/// occurrence of a fresh declaration `p_k`, left to right. Marks are
/// cleared on the way. The flesh declarations are returned with no
/// substitution attached.
pub fn split(store: &mut TermStore, marked: MarkedValue) -> SkeletalDecomposition {
    let root = marked.root;
    let mut flesh = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let kind = store.kind(n);
        if !store.is_marked(n) {
            if matches!(kind, NodeKind::Var(_)) {
                continue;
            }
            let parent = store.parent(n).expect("the root of a marked value is marked");
            let p = store.new_entry_decl("p");
            let occ = store.mk_var(p);
            store.replace_child(parent, n, occ);
            flesh.push((p, n));
            continue;
        }
        store.set_mark(n, false);
        match kind {
            NodeKind::Abs { body, .. } => stack.push(body),
            NodeKind::App { head, arg } => {
                stack.push(arg);
                stack.push(head);
            }
            _ => {}
        }
    }
    SkeletalDecomposition { skeleton: root, flesh }
}

/// Mark and split in one go, returning the decomposition and the number of
/// marking steps.
pub fn decompose(store: &mut TermStore, v: NodeId) -> Result<(SkeletalDecomposition, u64), SkeletonError> {
    let marked = mark_skeleton(store, v)?;
    let steps = marked.steps;
    Ok((split(store, marked), steps))
}
