//! Arena of term nodes shared by the machines and the skeleton extractor.
//!
//! Nodes carry parent links and a mark bit. Variable declarations carry the
//! substitution slot and the environment links used by the machines, and
//! lambda-bound declarations keep the list of their occurrences.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::syntax::{base_name, Name, SkTerm};
use super::TermError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeclId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl DeclId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Var(DeclId),
    Abs {
        decl: DeclId,
        body: NodeId,
    },
    App {
        head: NodeId,
        arg: NodeId,
    },
    /// Freed slot awaiting reuse.
    Vacant,
}

#[derive(Clone, Debug)]
struct Node {
    kind: NodeKind,
    parent: Option<NodeId>,
    mark: bool,
    /// Position of a variable node in its binder's occurrence list.
    slot: u32,
}

/// What a declaration is bound to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sub {
    /// Lambda-bound, or free.
    None,
    Term(NodeId),
    Skel(NodeId),
    /// Entry currently under evaluation.
    Hole,
}

#[derive(Clone, Debug)]
pub struct VarDecl {
    pub name: Name,
    pub orig: Name,
    pub sub: Sub,
    /// Newer neighbour in an environment.
    pub prev: Option<DeclId>,
    /// Older neighbour in an environment.
    pub next: Option<DeclId>,
    binder: Option<NodeId>,
    occurrences: Option<Vec<NodeId>>,
    forward: Option<DeclId>,
}

impl VarDecl {
    pub fn binder(&self) -> Option<NodeId> {
        self.binder
    }
}

/// How [`TermStore::copy`] names the binders of the copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// Reuse the display names of the original.
    Preserve,
    /// `orig_k` with a fresh counter value.
    Fresh,
}

#[derive(Clone, Debug, Default)]
pub struct TermStore {
    nodes: Vec<Node>,
    vacant: Vec<NodeId>,
    decls: Vec<VarDecl>,
    free: HashMap<Name, DeclId>,
    used_names: HashSet<Name>,
    counter: u64,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Nodes currently allocated, freed slots excluded.
    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.vacant.len()
    }

    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.nodes[n.index()].kind
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n.index()].parent
    }

    pub fn set_parent(&mut self, n: NodeId, p: Option<NodeId>) {
        self.nodes[n.index()].parent = p;
    }

    pub fn is_marked(&self, n: NodeId) -> bool {
        self.nodes[n.index()].mark
    }

    pub fn set_mark(&mut self, n: NodeId, m: bool) {
        self.nodes[n.index()].mark = m;
    }

    pub fn decl(&self, d: DeclId) -> &VarDecl {
        &self.decls[d.index()]
    }

    pub fn decl_mut(&mut self, d: DeclId) -> &mut VarDecl {
        &mut self.decls[d.index()]
    }

    pub fn name(&self, d: DeclId) -> &Name {
        &self.decls[d.index()].name
    }

    pub fn is_value(&self, n: NodeId) -> bool {
        matches!(self.kind(n), NodeKind::Abs { .. })
    }

    /// Occurrences of the variable bound by abstraction `abs`.
    pub fn occurrences(&self, abs: NodeId) -> &[NodeId] {
        match self.kind(abs) {
            NodeKind::Abs { decl, .. } => self.decls[decl.index()].occurrences.as_deref().unwrap_or(&[]),
            _ => &[],
        }
    }

    /// Occurrences recorded for a lambda-bound declaration.
    pub fn decl_occurrences(&self, d: DeclId) -> &[NodeId] {
        self.decls[d.index()].occurrences.as_deref().unwrap_or(&[])
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// `base_k` for the next counter value `k` not clashing with any name
    /// already in the store.
    pub fn fresh_name(&mut self, base: &str) -> Name {
        loop {
            self.counter += 1;
            let cand: Name = Arc::from(format!("{base}_{}", self.counter));
            if self.used_names.insert(cand.clone()) {
                return cand;
            }
        }
    }

    fn alloc(&mut self, kind: NodeKind) -> NodeId {
        let node = Node { kind, parent: None, mark: false, slot: 0 };
        match self.vacant.pop() {
            Some(id) => {
                self.nodes[id.index()] = node;
                id
            }
            None => {
                let id = NodeId(u32::try_from(self.nodes.len()).expect("node arena overflow"));
                self.nodes.push(node);
                id
            }
        }
    }

    /// Release a single node. Children are left alone.
    pub fn free_node(&mut self, n: NodeId) {
        if let NodeKind::Var(d) = self.kind(n) {
            self.remove_occurrence(d, n);
        }
        let node = &mut self.nodes[n.index()];
        node.kind = NodeKind::Vacant;
        node.parent = None;
        node.mark = false;
        self.vacant.push(n);
    }

    /// Release a whole subtree.
    pub fn free_tree(&mut self, n: NodeId) {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            match self.kind(m) {
                NodeKind::Abs { body, .. } => stack.push(body),
                NodeKind::App { head, arg } => {
                    stack.push(head);
                    stack.push(arg);
                }
                _ => {}
            }
            self.free_node(m);
        }
    }

    fn remove_occurrence(&mut self, d: DeclId, n: NodeId) {
        let slot = self.nodes[n.index()].slot as usize;
        let Some(occ) = self.decls[d.index()].occurrences.as_mut() else {
            return;
        };
        if occ.get(slot) != Some(&n) {
            return;
        }
        occ.swap_remove(slot);
        if let Some(&moved) = occ.get(slot) {
            self.nodes[moved.index()].slot = slot as u32;
        }
    }

    fn new_decl(&mut self, name: Name, orig: Name, lambda: bool) -> DeclId {
        self.used_names.insert(name.clone());
        let id = DeclId(u32::try_from(self.decls.len()).expect("declaration arena overflow"));
        self.decls.push(VarDecl {
            name,
            orig,
            sub: Sub::None,
            prev: None,
            next: None,
            binder: None,
            occurrences: lambda.then(Vec::new),
            forward: None,
        });
        id
    }

    /// Declaration for a lambda binder, attached later by [`Self::mk_abs`].
    pub fn new_lambda_decl(&mut self, name: Name) -> DeclId {
        let orig = Arc::from(base_name(&name));
        self.new_decl(name, orig, true)
    }

    /// Declaration for an environment entry, bound to nothing yet.
    pub fn new_entry_decl(&mut self, base: &str) -> DeclId {
        let name = self.fresh_name(base);
        self.new_decl(name, Arc::from(base), false)
    }

    /// The store-wide declaration of a free variable.
    pub fn free_decl(&mut self, x: &Name) -> DeclId {
        if let Some(&d) = self.free.get(x) {
            return d;
        }
        let d = self.new_decl(x.clone(), x.clone(), false);
        self.free.insert(x.clone(), d);
        d
    }

    pub fn is_free_decl(&self, d: DeclId) -> bool {
        self.free.get(&self.decls[d.index()].name) == Some(&d)
    }

    pub fn mk_var(&mut self, d: DeclId) -> NodeId {
        let n = self.alloc(NodeKind::Var(d));
        if let Some(occ) = self.decls[d.index()].occurrences.as_mut() {
            self.nodes[n.index()].slot = occ.len() as u32;
            occ.push(n);
        }
        n
    }

    pub fn mk_abs(&mut self, d: DeclId, body: NodeId) -> NodeId {
        let n = self.alloc(NodeKind::Abs { decl: d, body });
        self.set_parent(body, Some(n));
        self.decls[d.index()].binder = Some(n);
        n
    }

    pub fn mk_app(&mut self, head: NodeId, arg: NodeId) -> NodeId {
        let n = self.alloc(NodeKind::App { head, arg });
        self.set_parent(head, Some(n));
        self.set_parent(arg, Some(n));
        n
    }

    /// Turn the binder of abstraction `abs` into an environment entry:
    /// the abstraction node is freed and its body detached.
    pub fn open_abs(&mut self, abs: NodeId) -> (DeclId, NodeId) {
        let NodeKind::Abs { decl, body } = self.kind(abs) else {
            panic!("open_abs on a non-abstraction");
        };
        self.set_parent(body, None);
        let dd = &mut self.decls[decl.index()];
        dd.binder = None;
        dd.occurrences = None;
        self.free_node(abs);
        (decl, body)
    }

    /// Split an application node into its detached head and argument.
    pub fn open_app(&mut self, app: NodeId) -> (NodeId, NodeId) {
        let NodeKind::App { head, arg } = self.kind(app) else {
            panic!("open_app on a non-application");
        };
        self.set_parent(head, None);
        self.set_parent(arg, None);
        self.free_node(app);
        (head, arg)
    }

    /// Put `new` where `old` hangs under `parent`. `old` is detached.
    pub fn replace_child(&mut self, parent: NodeId, old: NodeId, new: NodeId) {
        let kind = match self.kind(parent) {
            NodeKind::Abs { decl, body } if body == old => NodeKind::Abs { decl, body: new },
            NodeKind::App { head, arg } if head == old => NodeKind::App { head: new, arg },
            NodeKind::App { head, arg } if arg == old => NodeKind::App { head, arg: new },
            _ => panic!("replace_child: {old:?} is not a child of {parent:?}"),
        };
        self.nodes[parent.index()].kind = kind;
        self.set_parent(new, Some(parent));
        self.set_parent(old, None);
    }

    /// Insert a pure term. Binders colliding with an earlier binder or with
    /// a free name are renamed `x_k`, so the result is well-bound.
    pub fn insert(&mut self, t: &SkTerm) -> Result<NodeId, TermError> {
        if !t.is_pure() {
            return Err(TermError::NotPure);
        }
        // Free names are reserved first so that fresh names avoid them.
        let fv = t.free_vars();
        self.used_names.extend(fv.iter().cloned());
        let mut taken: HashSet<Name> = fv;
        taken.extend(self.used_names.iter().cloned());
        let mut scope: Vec<(Name, DeclId)> = Vec::new();
        Ok(self.insert_rec(t, &mut scope, &mut taken))
    }

    fn insert_rec(&mut self, t: &SkTerm, scope: &mut Vec<(Name, DeclId)>, taken: &mut HashSet<Name>) -> NodeId {
        match t {
            SkTerm::Var(x) => {
                let d = match scope.iter().rev().find(|(y, _)| y == x) {
                    Some(&(_, d)) => d,
                    None => self.free_decl(x),
                };
                self.mk_var(d)
            }
            SkTerm::Abs(x, b) => {
                let display = if taken.contains(x) { self.fresh_name(base_name(x)) } else { x.clone() };
                taken.insert(display.clone());
                let d = self.new_decl(display, Arc::from(base_name(x)), true);
                scope.push((x.clone(), d));
                let body = self.insert_rec(b, scope, taken);
                scope.pop();
                self.mk_abs(d, body)
            }
            SkTerm::App(h, a) => {
                let h = self.insert_rec(h, scope, taken);
                let a = self.insert_rec(a, scope, taken);
                self.mk_app(h, a)
            }
            SkTerm::Es(..) | SkTerm::SkEs(..) => unreachable!("checked pure"),
        }
    }

    /// Read a subtree back as a tree term using display names.
    pub fn to_syntax(&self, n: NodeId) -> SkTerm {
        match self.kind(n) {
            NodeKind::Var(d) => SkTerm::Var(self.name(d).clone()),
            NodeKind::Abs { decl, body } => SkTerm::Abs(self.name(decl).clone(), Box::new(self.to_syntax(body))),
            NodeKind::App { head, arg } => SkTerm::App(Box::new(self.to_syntax(head)), Box::new(self.to_syntax(arg))),
            NodeKind::Vacant => panic!("to_syntax reached a freed node"),
        }
    }

    /// Copy a subtree. Variables bound inside get new declarations; free
    /// ones keep theirs, so sharing with the surrounding context is kept.
    pub fn copy(&mut self, n: NodeId, naming: Naming) -> NodeId {
        match self.kind(n) {
            NodeKind::Var(d) => {
                let target = self.decls[d.index()].forward.unwrap_or(d);
                self.mk_var(target)
            }
            NodeKind::Abs { decl, body } => {
                let old = &self.decls[decl.index()];
                let orig = old.orig.clone();
                let display = match naming {
                    Naming::Preserve => old.name.clone(),
                    Naming::Fresh => self.fresh_name(&orig),
                };
                let nd = self.new_decl(display, orig, true);
                self.decls[decl.index()].forward = Some(nd);
                let b = self.copy(body, naming);
                self.decls[decl.index()].forward = None;
                self.mk_abs(nd, b)
            }
            NodeKind::App { head, arg } => {
                let h = self.copy(head, naming);
                let a = self.copy(arg, naming);
                self.mk_app(h, a)
            }
            NodeKind::Vacant => panic!("copy reached a freed node"),
        }
    }

    /// Copy with fresh names for every bound variable.
    pub fn rename(&mut self, n: NodeId) -> NodeId {
        self.copy(n, Naming::Fresh)
    }

    /// Number of nodes in a subtree.
    pub fn size(&self, n: NodeId) -> usize {
        let mut count = 0;
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            count += 1;
            match self.kind(m) {
                NodeKind::Abs { body, .. } => stack.push(body),
                NodeKind::App { head, arg } => {
                    stack.push(head);
                    stack.push(arg);
                }
                _ => {}
            }
        }
        count
    }

    /// Declarations occurring free in a subtree.
    pub fn free_decls(&self, n: NodeId) -> HashSet<DeclId> {
        let mut bound = HashSet::new();
        let mut out = HashSet::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            match self.kind(m) {
                NodeKind::Var(d) => {
                    out.insert(d);
                }
                NodeKind::Abs { decl, body } => {
                    bound.insert(decl);
                    stack.push(body);
                }
                NodeKind::App { head, arg } => {
                    stack.push(head);
                    stack.push(arg);
                }
                NodeKind::Vacant => {}
            }
        }
        out.retain(|d| !bound.contains(d));
        out
    }

    /// Alpha-equivalence of two subtrees of this store. Free variables are
    /// compared by declaration.
    pub fn alpha_eq(&self, a: NodeId, b: NodeId) -> bool {
        let mut fwd = HashMap::new();
        let mut bwd = HashMap::new();
        self.alpha_rec(a, b, &mut fwd, &mut bwd)
    }

    fn alpha_rec(
        &self,
        a: NodeId,
        b: NodeId,
        fwd: &mut HashMap<DeclId, DeclId>,
        bwd: &mut HashMap<DeclId, DeclId>,
    ) -> bool {
        match (self.kind(a), self.kind(b)) {
            (NodeKind::Var(x), NodeKind::Var(y)) => match (fwd.get(&x), bwd.get(&y)) {
                (Some(&y2), Some(&x2)) => y2 == y && x2 == x,
                (None, None) => x == y,
                _ => false,
            },
            (NodeKind::Abs { decl: x, body: b1 }, NodeKind::Abs { decl: y, body: b2 }) => {
                fwd.insert(x, y);
                bwd.insert(y, x);
                let r = self.alpha_rec(b1, b2, fwd, bwd);
                fwd.remove(&x);
                bwd.remove(&y);
                r
            }
            (NodeKind::App { head: h1, arg: a1 }, NodeKind::App { head: h2, arg: a2 }) => {
                self.alpha_rec(h1, h2, fwd, bwd) && self.alpha_rec(a1, a2, fwd, bwd)
            }
            _ => false,
        }
    }

    /// Binders of a subtree are distinct declarations with distinct names,
    /// none of them clashing with a free name of the subtree.
    pub fn is_well_bound(&self, n: NodeId) -> bool {
        let mut decls = HashSet::new();
        let mut names = HashSet::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            match self.kind(m) {
                NodeKind::Abs { decl, body } => {
                    if !decls.insert(decl) || !names.insert(self.name(decl).clone()) {
                        return false;
                    }
                    stack.push(body);
                }
                NodeKind::App { head, arg } => {
                    stack.push(head);
                    stack.push(arg);
                }
                _ => {}
            }
        }
        self.free_decls(n).iter().all(|d| !names.contains(self.name(*d)))
    }

    /// Structural consistency of a subtree rooted at `n`: parent links,
    /// no freed nodes, occurrence lists matching the variable nodes.
    pub fn audit_tree(&self, n: NodeId) -> Result<(), String> {
        if self.parent(n).is_some() {
            return Err(format!("root {n:?} has a parent"));
        }
        let mut seen_occ: HashMap<DeclId, usize> = HashMap::new();
        let mut abs_decls = Vec::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            let children: &[NodeId] = &match self.kind(m) {
                NodeKind::Var(d) => {
                    if let Some(occ) = &self.decls[d.index()].occurrences {
                        let slot = self.nodes[m.index()].slot as usize;
                        if occ.get(slot) != Some(&m) {
                            return Err(format!("occurrence {m:?} of {} not registered", self.name(d)));
                        }
                        *seen_occ.entry(d).or_default() += 1;
                    }
                    vec![]
                }
                NodeKind::Abs { decl, body } => {
                    if self.decls[decl.index()].binder != Some(m) {
                        return Err(format!("binder link of {} broken", self.name(decl)));
                    }
                    abs_decls.push(decl);
                    vec![body]
                }
                NodeKind::App { head, arg } => vec![head, arg],
                NodeKind::Vacant => return Err(format!("freed node {m:?} reachable")),
            };
            for &c in children {
                if self.parent(c) != Some(m) {
                    return Err(format!("parent link of {c:?} broken"));
                }
                stack.push(c);
            }
        }
        for d in abs_decls {
            let expected = self.decl_occurrences(d).len();
            let found = seen_occ.get(&d).copied().unwrap_or(0);
            if expected != found {
                return Err(format!("{} has {expected} recorded occurrences but {found} in scope", self.name(d)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse::parse_syntax;

    fn load(src: &str) -> (TermStore, NodeId) {
        let mut s = TermStore::new();
        let n = s.insert(&parse_syntax(src).unwrap()).unwrap();
        (s, n)
    }

    #[test]
    fn shadowing_is_renamed() {
        let (s, n) = load("\\x.\\x.x");
        assert_eq!(s.to_syntax(n).to_string(), "\\x. \\x_1. x_1");
        assert!(s.is_well_bound(n));
    }

    #[test]
    fn binder_clashing_with_free_name_is_renamed() {
        let (s, n) = load("x (\\x. x)");
        assert_eq!(s.to_syntax(n).to_string(), "x (\\x_1. x_1)");
    }

    #[test]
    fn occurrences_are_tracked() {
        let (s, n) = load("\\x. x (\\y. x y) x");
        assert_eq!(s.occurrences(n).len(), 3);
        s.audit_tree(n).unwrap();
    }

    #[test]
    fn copy_keeps_free_declarations() {
        let (mut s, n) = load("\\x. x z");
        let c = s.rename(n);
        assert!(s.alpha_eq(n, c));
        assert_ne!(s.to_syntax(n), s.to_syntax(c));
        assert_eq!(s.free_decls(n), s.free_decls(c));
        s.audit_tree(c).unwrap();
        assert_eq!(s.occurrences(c).len(), 1);
    }

    #[test]
    fn freed_slots_are_reused() {
        let (mut s, n) = load("a b");
        let before = s.live_nodes();
        let (h, a) = s.open_app(n);
        assert_eq!(s.live_nodes(), before - 1);
        let m = s.mk_app(a, h);
        assert_eq!(m, n);
        assert_eq!(s.to_syntax(m).to_string(), "b a");
    }

    #[test]
    fn free_node_removes_occurrence() {
        let (mut s, n) = load("\\x. x x");
        let NodeKind::Abs { body, .. } = s.kind(n) else { unreachable!() };
        let (h, a) = s.open_app(body);
        s.free_node(h);
        s.replace_child_body(n, a);
        assert_eq!(s.occurrences(n), &[a]);
        s.audit_tree(n).unwrap();
    }

    impl TermStore {
        fn replace_child_body(&mut self, abs: NodeId, new: NodeId) {
            let NodeKind::Abs { decl, .. } = self.kind(abs) else { unreachable!() };
            self.nodes[abs.index()].kind = NodeKind::Abs { decl, body: new };
            self.set_parent(new, Some(abs));
        }
    }
}
