//! The Milner abstract machine by need (MAD) and its skeletal variant.
//!
//! A state is a chain, a code, a stack and a global environment. Terms
//! live in a [`TermStore`]; environment entries are the variable
//! declarations themselves, linked into a doubly-linked list through their
//! `prev`/`next` fields so that cutting and re-joining an environment is
//! constant time. Variable lookup reads the declaration an occurrence
//! points to, without scanning the environment.

mod audit;
mod readback;
mod trace;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::calculus::StepLabel;
use crate::skeleton::{self, SkeletonError};
use crate::term::{DeclId, Name, Naming, NodeId, NodeKind, SkTerm, Sub, TermError, TermStore};

pub use trace::format_state;

/// Which machine to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Copies whole values on every substitution.
    Mad,
    /// Copies only skeletons, sharing the flesh through the environment.
    Smad,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Mad => "mad",
            Variant::Smad => "smad",
        })
    }
}

/// Transition labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Sea1,
    Beta,
    Sea2,
    Sea3,
    Sub,
    Sk,
    Ss,
}

impl Label {
    /// Principal transitions correspond to calculus steps.
    pub fn principal(self) -> Option<StepLabel> {
        match self {
            Label::Beta => Some(StepLabel::Db),
            Label::Sub => Some(StepLabel::Lsnd),
            Label::Sk => Some(StepLabel::Sk),
            Label::Ss => Some(StepLabel::Ss),
            Label::Sea1 | Label::Sea2 | Label::Sea3 => None,
        }
    }

    /// Label as printed in traces.
    pub fn symbol(self) -> &'static str {
        match self {
            Label::Beta => "β",
            other => other.name(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Sea1 => "sea1",
            Label::Beta => "beta",
            Label::Sea2 => "sea2",
            Label::Sea3 => "sea3",
            Label::Sub => "sub",
            Label::Sk => "sk",
            Label::Ss => "ss",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("initial term is open: free variable {0}")]
    OpenTerm(Name),
    #[error("initial term is not pure")]
    NotPure(#[from] TermError),
    #[error("variable {0} has no environment entry")]
    Unbound(Name),
    #[error("variable {0} is needed while its own entry is being evaluated")]
    BlackHole(Name),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("invariant violated after transition {step}: {message}")]
    Audit { step: u64, message: String },
}

/// An entry saved while the machine evaluates inside an environment entry.
#[derive(Clone, Debug)]
pub struct ChainItem {
    pub var: DeclId,
    pub stack: Vec<NodeId>,
    /// Environment part newer than `var`: head and tail, or empty.
    pub segment: Option<(DeclId, DeclId)>,
    /// The occurrence of `var` that triggered the evaluation.
    pub occurrence: NodeId,
}

/// Transition counters and size statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub beta: u64,
    pub sub: u64,
    pub sk: u64,
    pub ss: u64,
    pub sea1: u64,
    pub sea2: u64,
    pub sea3: u64,
    /// Marking steps spent by skeleton extraction.
    pub marking_steps: u64,
    /// Environment entries created for flesh by skeletonization.
    pub flesh_entries: u64,
    /// Size of the initial term.
    pub initial_size: usize,
    /// Largest read-back size of a state along the run.
    pub max_state_size: usize,
    pub final_env_len: usize,
    pub wall: Duration,
}

impl RunStats {
    pub fn transitions(&self) -> u64 {
        self.beta + self.sub + self.sk + self.ss + self.sea1 + self.sea2 + self.sea3
    }

    fn count(&mut self, label: Label) {
        match label {
            Label::Sea1 => self.sea1 += 1,
            Label::Beta => self.beta += 1,
            Label::Sea2 => self.sea2 += 1,
            Label::Sea3 => self.sea3 += 1,
            Label::Sub => self.sub += 1,
            Label::Sk => self.sk += 1,
            Label::Ss => self.ss += 1,
        }
    }

    /// The bounds on transition counts stated relative to β, each with
    /// whether it holds. Copies (`sub` or `ss`) are bounded by `2β+1`,
    /// skeletonizations by copies, and `sea1` by `|t|·(copies + sea2 + 1)`.
    pub fn beta_bounds(&self) -> Vec<(&'static str, bool)> {
        let copies = self.ss + self.sub;
        vec![
            ("sea2 <= beta", self.sea2 <= self.beta),
            ("sea3 <= beta", self.sea3 <= self.beta),
            ("copies <= 2*beta + 1", copies <= 2 * self.beta + 1),
            ("sk <= ss", self.sk <= self.ss),
            ("sea1 <= |t|*(copies + sea2 + 1)", self.sea1 <= self.initial_size as u64 * (copies + self.sea2 + 1)),
        ]
    }

    /// Like [`Self::beta_bounds`], but entries to evaluate may come from β
    /// or from flesh, so `sea2` and `sea3` are bounded by their sum.
    pub fn entry_bounds(&self) -> Vec<(&'static str, bool)> {
        let entries = self.beta + self.flesh_entries;
        let mut out = self.beta_bounds();
        out[0] = ("sea2 <= beta + flesh", self.sea2 <= entries);
        out[1] = ("sea3 <= sea2", self.sea3 <= self.sea2);
        out
    }

    /// First violated bound of [`Self::beta_bounds`].
    pub fn check_beta_bounds(&self) -> Result<(), String> {
        first_violation(self.beta_bounds(), self)
    }

    /// First violated bound of [`Self::entry_bounds`].
    pub fn check_entry_bounds(&self) -> Result<(), String> {
        first_violation(self.entry_bounds(), self)
    }
}

fn first_violation(bounds: Vec<(&'static str, bool)>, stats: &RunStats) -> Result<(), String> {
    match bounds.into_iter().find(|(_, ok)| !ok) {
        Some((what, _)) => Err(format!("bound {what} fails on {stats:?}")),
        None => Ok(()),
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub fuel: u64,
    /// Check the state invariants after every transition.
    pub audit: bool,
    /// Record a printed state after every transition.
    pub trace: bool,
    /// Record the label of every transition.
    pub labels: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { fuel: 10_000_000, audit: false, trace: false, labels: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Final,
    OutOfFuel,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: RunOutcome,
    pub stats: RunStats,
    pub labels: Vec<Label>,
    /// The initial state followed by one line per transition.
    pub trace: Vec<String>,
}

/// A machine state together with the store holding its terms.
#[derive(Clone, Debug)]
pub struct Machine {
    variant: Variant,
    store: TermStore,
    chain: Vec<ChainItem>,
    code: NodeId,
    /// Top of the stack last.
    stack: Vec<NodeId>,
    env: Option<DeclId>,
    stats: RunStats,
    size: usize,
}

impl Machine {
    /// Load the closed term rooted at `root`. The code is a copy of it.
    pub fn new(variant: Variant, mut store: TermStore, root: NodeId) -> Result<Self, MachineError> {
        if let Some(&d) = store.free_decls(root).iter().min_by_key(|d| store.name(**d).clone()) {
            return Err(MachineError::OpenTerm(store.name(d).clone()));
        }
        let code = store.copy(root, Naming::Preserve);
        store.free_tree(root);
        let size = store.size(code);
        let stats = RunStats { initial_size: size, max_state_size: size, ..Default::default() };
        Ok(Machine { variant, store, chain: Vec::new(), code, stack: Vec::new(), env: None, stats, size })
    }

    /// Load a pure tree term.
    pub fn from_term(variant: Variant, t: &SkTerm) -> Result<Self, MachineError> {
        let mut store = TermStore::new();
        let root = store.insert(t)?;
        Self::new(variant, store, root)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn store(&self) -> &TermStore {
        &self.store
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn code(&self) -> NodeId {
        self.code
    }

    pub fn chain(&self) -> &[ChainItem] {
        &self.chain
    }

    /// Stack items, top last.
    pub fn stack(&self) -> &[NodeId] {
        &self.stack
    }

    /// Read-back size of the current state.
    pub fn state_size(&self) -> usize {
        self.size
    }

    /// Environment entries from the newest.
    pub fn env(&self) -> Vec<DeclId> {
        self.segment_from(self.env)
    }

    fn segment_from(&self, head: Option<DeclId>) -> Vec<DeclId> {
        let mut out = Vec::new();
        let mut cur = head;
        while let Some(d) = cur {
            out.push(d);
            cur = self.store.decl(d).next;
        }
        out
    }

    /// Entries of a saved segment, newest first.
    pub fn segment(&self, seg: Option<(DeclId, DeclId)>) -> Vec<DeclId> {
        seg.map(|(h, _)| self.segment_from(Some(h))).unwrap_or_default()
    }

    pub fn is_final(&self) -> bool {
        self.chain.is_empty() && self.stack.is_empty() && self.store.is_value(self.code)
    }

    /// The code as a tree term.
    pub fn code_term(&self) -> SkTerm {
        self.store.to_syntax(self.code)
    }

    /// Perform one transition. `None` on a final state.
    pub fn step(&mut self) -> Result<Option<Label>, MachineError> {
        let label = match self.store.kind(self.code) {
            NodeKind::App { .. } => {
                let (head, arg) = self.store.open_app(self.code);
                self.stack.push(arg);
                self.code = head;
                Label::Sea1
            }
            NodeKind::Abs { .. } => match self.stack.pop() {
                Some(arg) => {
                    let (x, body) = self.store.open_abs(self.code);
                    self.store.decl_mut(x).sub = Sub::Term(arg);
                    self.push_entry(x);
                    self.code = body;
                    self.size -= 1;
                    Label::Beta
                }
                None => match self.chain.pop() {
                    Some(item) => {
                        self.restore(item);
                        Label::Sea3
                    }
                    None => return Ok(None),
                },
            },
            NodeKind::Var(x) => match self.store.decl(x).sub {
                Sub::None => return Err(MachineError::Unbound(self.store.name(x).clone())),
                Sub::Hole => return Err(MachineError::BlackHole(self.store.name(x).clone())),
                Sub::Term(t) if !self.store.is_value(t) => {
                    self.save(x, t);
                    Label::Sea2
                }
                Sub::Term(v) => match self.variant {
                    Variant::Mad => {
                        self.substitute(v);
                        Label::Sub
                    }
                    Variant::Smad => {
                        self.skeletonize(x, v)?;
                        Label::Sk
                    }
                },
                Sub::Skel(v) => {
                    self.substitute(v);
                    Label::Ss
                }
            },
            NodeKind::Vacant => unreachable!("code is a freed node"),
        };
        self.stats.count(label);
        self.stats.max_state_size = self.stats.max_state_size.max(self.size);
        Ok(Some(label))
    }

    fn push_entry(&mut self, x: DeclId) {
        let old = self.env;
        {
            let d = self.store.decl_mut(x);
            d.prev = None;
            d.next = old;
        }
        if let Some(o) = old {
            self.store.decl_mut(o).prev = Some(x);
        }
        self.env = Some(x);
    }

    /// Cut the environment at `x` and start evaluating its entry `t`.
    fn save(&mut self, x: DeclId, t: NodeId) {
        let (prev, next) = {
            let d = self.store.decl(x);
            (d.prev, d.next)
        };
        let segment = prev.map(|tail| (self.env.expect("x is enrolled below the head"), tail));
        if let Some(tail) = prev {
            self.store.decl_mut(tail).next = None;
        }
        if let Some(n) = next {
            self.store.decl_mut(n).prev = None;
        }
        let d = self.store.decl_mut(x);
        d.prev = None;
        d.next = None;
        d.sub = Sub::Hole;
        let stack = std::mem::take(&mut self.stack);
        self.chain.push(ChainItem { var: x, stack, segment, occurrence: self.code });
        self.code = t;
        self.env = next;
    }

    /// Store the value in the code back into the saved entry.
    fn restore(&mut self, item: ChainItem) {
        let x = item.var;
        let v = self.code;
        let older = self.env;
        self.store.decl_mut(x).sub = Sub::Term(v);
        self.store.decl_mut(x).next = older;
        if let Some(o) = older {
            self.store.decl_mut(o).prev = Some(x);
        }
        match item.segment {
            Some((head, tail)) => {
                self.store.decl_mut(tail).next = Some(x);
                self.store.decl_mut(x).prev = Some(tail);
                self.env = Some(head);
            }
            None => {
                self.store.decl_mut(x).prev = None;
                self.env = Some(x);
            }
        }
        self.code = item.occurrence;
        self.stack = item.stack;
    }

    /// Replace the variable in the code by a fresh copy of `v`.
    fn substitute(&mut self, v: NodeId) {
        let copy = self.store.copy(v, Naming::Fresh);
        self.size += self.store.size(v) - 1;
        self.store.free_node(self.code);
        self.code = copy;
    }

    /// Split the value of entry `x` into skeleton and flesh; the flesh
    /// becomes new entries right after `x`.
    fn skeletonize(&mut self, x: DeclId, v: NodeId) -> Result<(), MachineError> {
        let (dec, steps) = skeleton::decompose(&mut self.store, v)?;
        self.stats.marking_steps += steps;
        self.store.decl_mut(x).sub = Sub::Skel(dec.skeleton);
        let mut last = x;
        let after = self.store.decl(x).next;
        for &(p, body) in &dec.flesh {
            let d = self.store.decl_mut(p);
            d.sub = Sub::Term(body);
            d.prev = Some(last);
            self.store.decl_mut(last).next = Some(p);
            last = p;
        }
        self.store.decl_mut(last).next = after;
        if let Some(a) = after {
            self.store.decl_mut(a).prev = Some(last);
        }
        self.size += 2 * dec.flesh.len();
        self.stats.flesh_entries += dec.flesh.len() as u64;
        Ok(())
    }

    /// Drive the machine to a final state or until the fuel runs out.
    pub fn run(&mut self, opts: &RunOptions) -> Result<Run, MachineError> {
        let start = Instant::now();
        let mut labels = Vec::new();
        let mut trace = Vec::new();
        if opts.trace {
            trace.push(format_state(self, None));
        }
        if opts.audit {
            self.audit().map_err(|message| MachineError::Audit { step: 0, message })?;
        }
        let outcome = loop {
            if self.stats.transitions() >= opts.fuel {
                break RunOutcome::OutOfFuel;
            }
            let Some(label) = self.step()? else {
                break RunOutcome::Final;
            };
            if opts.labels {
                labels.push(label);
            }
            if opts.trace {
                trace.push(format_state(self, Some(label)));
            }
            if opts.audit {
                let step = self.stats.transitions();
                self.audit().map_err(|message| MachineError::Audit { step, message })?;
            }
        };
        self.stats.final_env_len = self.env().len();
        self.stats.wall += start.elapsed();
        Ok(Run { outcome, stats: self.stats.clone(), labels, trace })
    }
}

/// Load and run a closed term.
pub fn run_term(variant: Variant, t: &SkTerm, opts: &RunOptions) -> Result<(Machine, Run), MachineError> {
    let mut m = Machine::from_term(variant, t)?;
    let run = m.run(opts)?;
    Ok((m, run))
}
