//! Per-transition invariant checks.

use std::collections::HashSet;

use super::{Machine, Variant};
use crate::skeleton::oracle::is_skeleton;
use crate::term::{DeclId, NodeId, Sub};

impl Machine {
    /// Check that the environment list starting at `head` is well linked
    /// and return its entries.
    fn audit_list(&self, head: Option<DeclId>, what: &str) -> Result<Vec<DeclId>, String> {
        let entries = self.segment_from(head);
        let mut prev = None;
        for &d in &entries {
            let decl = self.store.decl(d);
            if decl.prev != prev {
                return Err(format!("{what}: back link of {} broken", decl.name));
            }
            if !matches!(decl.sub, Sub::Term(_) | Sub::Skel(_)) {
                return Err(format!("{what}: entry {} holds {:?}", decl.name, decl.sub));
            }
            prev = Some(d);
        }
        Ok(entries)
    }

    /// Every term the state holds: code, stacks and entries.
    fn state_terms(&self, entries: &[DeclId]) -> Vec<NodeId> {
        let mut terms = vec![self.code];
        terms.extend(&self.stack);
        for item in &self.chain {
            terms.push(item.occurrence);
            terms.extend(&item.stack);
        }
        for &d in entries {
            match self.store.decl(d).sub {
                Sub::Term(t) | Sub::Skel(t) => terms.push(t),
                Sub::None | Sub::Hole => {}
            }
        }
        terms
    }

    /// Check the state invariants: closure, well-boundness, environment
    /// links, the sub-term property, skeletal entries, and the tracked size.
    pub fn audit(&self) -> Result<(), String> {
        let mut entries = self.audit_list(self.env, "environment")?;
        for item in &self.chain {
            let x = self.store.decl(item.var);
            if x.sub != Sub::Hole || x.prev.is_some() || x.next.is_some() {
                return Err(format!("chain entry {} is not an isolated hole", x.name));
            }
            let seg = self.audit_list(item.segment.map(|(h, _)| h), "saved segment")?;
            if seg.last().copied() != item.segment.map(|(_, t)| t) {
                return Err(format!("saved segment of {} has a wrong tail", x.name));
            }
            entries.extend(seg);
        }
        let mut seen = HashSet::new();
        for &d in &entries {
            if !seen.insert(d) {
                return Err(format!("entry {} enrolled twice", self.store.name(d)));
            }
            if let Sub::Skel(v) = self.store.decl(d).sub {
                if self.variant == Variant::Mad {
                    return Err("skeletal entry in a plain machine".into());
                }
                if !is_skeleton(&self.store.to_syntax(v)) {
                    return Err(format!("entry {} holds a non-skeletal value", self.store.name(d)));
                }
            }
        }
        for t in self.state_terms(&entries) {
            self.store.audit_tree(t)?;
            let size = self.store.size(t);
            if size > self.stats.initial_size {
                return Err(format!("term of size {size} exceeds the initial size {}", self.stats.initial_size));
            }
        }
        let rb = self.readback();
        if let Some(x) = rb.free_vars().into_iter().next() {
            return Err(format!("read-back has free variable {x}"));
        }
        if !rb.is_well_named() {
            return Err("read-back binds a name twice".into());
        }
        if rb.size() != self.size {
            return Err(format!("tracked size {} but read-back has size {}", self.size, rb.size()));
        }
        Ok(())
    }
}
