//! Brute-force reference semantics.
//!
//! Open atoms and integer variables are enumerated; defined atoms are
//! computed from their definitions under the well-founded reading, so an
//! assignment is a model exactly when every constraint holds and every
//! definition has a total well-founded model agreeing with it. Nothing here
//! shares code with the linearizer.

mod compiled;
mod wfm;

pub use compiled::CompiledTheory;
pub use wfm::{well_founded_model, WellFounded};

use thiserror::Error;

use crate::ecnf::Theory;
use crate::par::Execution;

/// Enumeration guard rail: the search space must be strictly smaller.
pub const MAX_SPACE: u128 = 1 << 20;

const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space of {0} assignments is too large (must be below {MAX_SPACE})")]
    SpaceTooLarge(u128),
    #[error("theory not usable by the oracle: {0}")]
    Invalid(String),
    #[error("no value for `{0}`")]
    Unassigned(String),
}

/// Values for every atom and integer variable, indexed like
/// [`Theory::atoms`] and [`Theory::int_vars`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub atoms: Vec<bool>,
    pub ints: Vec<i64>,
}

impl Assignment {
    pub fn atom(&self, theory: &Theory, name: &str) -> Option<bool> {
        theory.atom_index(name).map(|i| self.atoms[i])
    }

    pub fn int(&self, theory: &Theory, name: &str) -> Option<i64> {
        theory.int_vars.iter().position(|v| v.name == name).map(|i| self.ints[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleStatus {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub models: Vec<Assignment>,
    /// Minimum objective over the models; `None` when unsat or when the
    /// theory has no objective.
    pub optimum: Option<i64>,
    pub status: OracleStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteForce {
    Unsat,
    /// Optimum, counting a missing objective as the constant 0.
    Optimal(i64),
}

/// Evaluates a full assignment against the theory.
pub fn is_model(theory: &Theory, assignment: &Assignment) -> Result<bool, OracleError> {
    let c = CompiledTheory::new(theory)?;
    Ok(c.is_model(assignment))
}

pub fn enumerate_models(theory: &Theory) -> Result<OracleOutcome, OracleError> {
    enumerate_models_with(theory, Execution::default())
}

pub fn enumerate_models_with(theory: &Theory, exec: Execution) -> Result<OracleOutcome, OracleError> {
    let c = CompiledTheory::new(theory)?;
    let space = c.checked_space()?;
    log::debug!("enumerating {space} assignments");
    let chunks = space.div_ceil(CHUNK);
    let parts = exec.map_range(chunks, |k| {
        let mut out = Vec::new();
        let mut buf = c.blank();
        for idx in k * CHUNK..((k + 1) * CHUNK).min(space) {
            if c.model_at(idx, &mut buf) {
                out.push(buf.clone());
            }
        }
        out
    });
    let models: Vec<Assignment> = parts.into_iter().flatten().collect();
    let status = if models.is_empty() { OracleStatus::Unsat } else { OracleStatus::Sat };
    let optimum = if theory.objective.is_some() {
        models.iter().map(|m| c.objective(m)).min()
    } else {
        None
    };
    Ok(OracleOutcome { models, optimum, status })
}

pub fn brute_force_optimum(theory: &Theory) -> Result<BruteForce, OracleError> {
    brute_force_optimum_with(theory, Execution::default())
}

pub fn brute_force_optimum_with(theory: &Theory, exec: Execution) -> Result<BruteForce, OracleError> {
    let c = CompiledTheory::new(theory)?;
    let space = c.checked_space()?;
    log::debug!("enumerating {space} assignments");
    let chunks = space.div_ceil(CHUNK);
    let best = exec
        .map_range(chunks, |k| {
            let mut buf = c.blank();
            let mut best: Option<i64> = None;
            for idx in k * CHUNK..((k + 1) * CHUNK).min(space) {
                if c.model_at(idx, &mut buf) {
                    let v = c.objective(&buf);
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            best
        })
        .into_iter()
        .flatten()
        .min();
    Ok(match best {
        Some(v) => BruteForce::Optimal(v),
        None => BruteForce::Unsat,
    })
}
