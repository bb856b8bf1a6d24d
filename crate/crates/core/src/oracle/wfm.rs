use std::collections::HashMap;

use super::compiled::{compile_definition, BodyLit, CDef, CompiledTheory};
use super::OracleError;
use crate::ecnf::Definition;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellFounded {
    /// Value of each head, in first-occurrence order.
    Total(Vec<(String, bool)>),
    NotTotal,
}

/// Well-founded model of `def` given values for every non-head atom in its
/// bodies.
pub fn well_founded_model(def: &Definition, params: &HashMap<String, bool>) -> Result<WellFounded, OracleError> {
    let mut names: Vec<&str> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for r in &def.rules {
        for name in std::iter::once(r.head.as_str()).chain(r.body.iter().map(|l| l.atom.as_str())) {
            index.entry(name).or_insert_with(|| {
                names.push(name);
                names.len() - 1
            });
        }
    }
    let lookup = |n: &str| Ok(index[n]);
    let cdef = compile_definition(def, &lookup)?;
    let mut atoms = vec![false; names.len()];
    for r in &cdef.rules {
        for b in &r.body {
            if let BodyLit::Param(l) = b {
                let name = names[l.atom];
                atoms[l.atom] = *params.get(name).ok_or_else(|| OracleError::Unassigned(name.to_string()))?;
            }
        }
    }
    Ok(match alternating_fixpoint(&cdef, &atoms).0 {
        Some(vals) => WellFounded::Total(cdef.heads.iter().map(|&h| names[h].to_string()).zip(vals).collect()),
        None => WellFounded::NotTotal,
    })
}

impl CompiledTheory {
    pub(super) fn wfm(&self, d: usize, atoms: &[bool]) -> Option<Vec<bool>> {
        alternating_fixpoint(&self.defs[d], atoms).0
    }
}

/// Least fixpoint of the rules with positive head literals read from the
/// growing set and negative ones from `assumed`.
fn gamma(def: &CDef, atoms: &[bool], assumed: &[bool]) -> Vec<bool> {
    let mut derived = vec![false; def.heads.len()];
    let holds = |b: &BodyLit, derived: &[bool]| match *b {
        BodyLit::Head { local, positive: true } => derived[local],
        BodyLit::Head { local, positive: false } => !assumed[local],
        BodyLit::Param(l) => l.eval(atoms),
    };
    loop {
        let mut changed = false;
        for r in &def.rules {
            if derived[r.head] {
                continue;
            }
            let fires = if r.and {
                r.body.iter().all(|b| holds(b, &derived))
            } else {
                r.body.iter().any(|b| holds(b, &derived))
            };
            if fires {
                derived[r.head] = true;
                changed = true;
            }
        }
        if !changed {
            return derived;
        }
    }
}

/// Returns the total model (if any) and the number of productive
/// alternation rounds.
pub(super) fn alternating_fixpoint(def: &CDef, atoms: &[bool]) -> (Option<Vec<bool>>, usize) {
    let negative_recursion = def
        .rules
        .iter()
        .any(|r| r.body.iter().any(|b| matches!(b, BodyLit::Head { positive: false, .. })));
    if !negative_recursion {
        return (Some(gamma(def, atoms, &[])), 0);
    }
    let trace = alternation_trace(def, atoms);
    let rounds = trace.len() - 1;
    let (under, over) = trace.into_iter().last().unwrap();
    let total = under == over;
    (total.then_some(under), rounds)
}

/// Successive (under, over) estimates, starting from (empty, gamma(empty)).
/// The under-estimate only grows and the over-estimate only shrinks.
pub(super) fn alternation_trace(def: &CDef, atoms: &[bool]) -> Vec<(Vec<bool>, Vec<bool>)> {
    let under = vec![false; def.heads.len()];
    let over = gamma(def, atoms, &under);
    let mut trace = vec![(under, over)];
    loop {
        let (under, over) = trace.last().unwrap();
        let next_under = gamma(def, atoms, over);
        let next_over = gamma(def, atoms, &next_under);
        if &next_under == under && &next_over == over {
            return trace;
        }
        trace.push((next_under, next_over));
    }
}
