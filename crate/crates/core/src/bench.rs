//! Step counts and sizes of both machines on the family `tₙ`.

use std::io;

use serde::{Deserialize, Serialize};

use crate::calculus::family::family_store;
use crate::calculus::{evaluate, EvalOptions, Outcome, Strategy};
use crate::machine::{Machine, MachineError, RunOptions, RunOutcome, Variant};

/// One benchmark measurement. For the plain machine the `ss` column
/// counts its copying transition `sub`, and `sk` is always zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRow {
    pub n: usize,
    pub machine: String,
    pub beta: u64,
    pub sk: u64,
    pub ss: u64,
    pub sea1: u64,
    pub sea2: u64,
    pub sea3: u64,
    pub final_env_len: usize,
    pub max_state_size: usize,
    /// Largest term along the matching calculus reduction, when requested.
    pub ink_space_calculus: Option<usize>,
    pub wall_nanos: u64,
}

impl BenchRow {
    /// All transitions, including the copying ones.
    pub fn transitions(&self) -> u64 {
        self.beta + self.sk + self.ss + self.sea1 + self.sea2 + self.sea3
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("{0} ran out of fuel on t_{1}")]
    OutOfFuel(&'static str, usize),
    #[error(transparent)]
    Calculus(#[from] crate::calculus::CalcError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Run `variant` on `tₙ`, and optionally the matching calculus.
pub fn bench_row(n: usize, variant: Variant, calculus: bool) -> Result<BenchRow, BenchError> {
    let (store, root) = family_store(n);
    let mut m = Machine::new(variant, store, root)?;
    let run = m.run(&RunOptions::default())?;
    if run.outcome != RunOutcome::Final {
        return Err(BenchError::OutOfFuel("machine", n));
    }
    let s = run.stats;
    let ink_space_calculus = if calculus {
        let strategy = match variant {
            Variant::Mad => Strategy::Need,
            Variant::Smad => Strategy::SkNeed,
        };
        let t = crate::calculus::family::family_term(n);
        let eval = crate::calculus::with_large_stack(move || evaluate(&t, strategy, &EvalOptions::default()))?;
        if eval.outcome != Outcome::Answer {
            return Err(BenchError::OutOfFuel("calculus", n));
        }
        Some(eval.stats.ink_space)
    } else {
        None
    };
    Ok(BenchRow {
        n,
        machine: variant.to_string(),
        beta: s.beta,
        sk: s.sk,
        ss: s.ss + s.sub,
        sea1: s.sea1,
        sea2: s.sea2,
        sea3: s.sea3,
        final_env_len: s.final_env_len,
        max_state_size: s.max_state_size,
        ink_space_calculus,
        wall_nanos: s.wall.as_nanos() as u64,
    })
}

/// Write rows as CSV with a header line.
pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Read rows written by [`write_csv`].
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
