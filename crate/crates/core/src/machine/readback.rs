//! Decoding machine states into calculus terms.
//!
//! Stacks become applications, environments become substitution contexts
//! with the newest entry innermost, and each chain item wraps the state
//! below it as the argument of its open entry `[x\·]`.

use super::{ChainItem, Machine};
use crate::term::{DeclId, NodeId, SkTerm, Sub};

impl Machine {
    fn stack_wrap(&self, stack: &[NodeId], mut t: SkTerm) -> SkTerm {
        for &arg in stack.iter().rev() {
            t = SkTerm::app(t, self.store.to_syntax(arg));
        }
        t
    }

    fn env_wrap(&self, entries: &[DeclId], mut t: SkTerm) -> SkTerm {
        for &d in entries {
            let decl = self.store.decl(d);
            t = match decl.sub {
                Sub::Term(u) => SkTerm::Es(Box::new(t), decl.name.clone(), Box::new(self.store.to_syntax(u))),
                Sub::Skel(v) => SkTerm::SkEs(Box::new(t), decl.name.clone(), Box::new(self.store.to_syntax(v))),
                Sub::None | Sub::Hole => panic!("environment entry {} has no term", decl.name),
            };
        }
        t
    }

    fn chain_wrap(&self, chain: &[ChainItem], t: SkTerm) -> SkTerm {
        let Some((item, rest)) = chain.split_last() else {
            return t;
        };
        let x = self.store.name(item.var).clone();
        let inner = self.stack_wrap(&item.stack, SkTerm::Var(x.clone()));
        let inner = self.chain_wrap(rest, inner);
        let inner = self.env_wrap(&self.segment(item.segment), inner);
        SkTerm::Es(Box::new(inner), x, Box::new(t))
    }

    /// The term a state stands for.
    pub fn readback(&self) -> SkTerm {
        let t = self.stack_wrap(&self.stack, self.store.to_syntax(self.code));
        let t = self.chain_wrap(&self.chain, t);
        self.env_wrap(&self.env(), t)
    }
}
