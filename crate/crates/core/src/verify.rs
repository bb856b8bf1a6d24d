//! End-to-end checks of a translation against the brute-force oracle.
//!
//! * optimum: oracle status and optimum equal branch and bound on the MIP;
//! * soundness: the solver's point projects to a model, and assignments that
//!   are not models admit no feasible MIP completion;
//! * completeness: models extend to feasible MIP points.
//!
//! Projections use the columns that stand for source atoms and integer
//! variables. Non-models are enumerated exhaustively when the full
//! assignment space is small and sampled otherwise.

use std::fmt;

use thiserror::Error;

use crate::ecnf::{normalize_theory, NormalizeError, Theory};
use crate::linearize::{translate_theory, TranslateError, TranslateOptions};
use crate::mip::{ColumnOrigin, MipModel};
use crate::oracle::{enumerate_models_with, Assignment, CompiledTheory, OracleError};
use crate::par::Execution;
use crate::solver::{branch_and_bound, Limits, SimplexError, SolveStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solver(#[from] SimplexError),
    #[error("model has no column for `{0}`")]
    MissingColumn(String),
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub translate: TranslateOptions,
    pub limits: Limits,
    /// Full assignment spaces up to this size are checked exhaustively for
    /// soundness.
    pub exhaustive_limit: u128,
    /// Cap on sampled non-models and on checked models.
    pub samples: usize,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            translate: TranslateOptions::default(),
            limits: Limits::default(),
            exhaustive_limit: 256,
            samples: 32,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
}

impl Check {
    pub fn passed(&self) -> bool {
        *self == Check::Pass
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => write!(f, "PASS"),
            Check::Fail(why) => write!(f, "FAIL ({why})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub optimum: Check,
    pub soundness: Check,
    pub completeness: Check,
    /// `None` when the oracle found no model.
    pub oracle_optimum: Option<i64>,
    pub mip_status: SolveStatus,
    pub mip_objective: Option<f64>,
    pub models: usize,
    pub non_models_checked: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.optimum.passed() && self.soundness.passed() && self.completeness.passed()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "optimum      {}", self.optimum)?;
        writeln!(f, "soundness    {}", self.soundness)?;
        write!(f, "completeness {}", self.completeness)
    }
}

/// Normalizes and translates `theory`, then checks the translation.
pub fn verify_theory(theory: &Theory, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let normalized = normalize_theory(theory)?;
    let model = translate_theory(&normalized, opts.translate)?;
    verify_translation(&normalized, &model, opts)
}

/// Column of each atom and each integer variable of `theory`.
struct Projection {
    atom_cols: Vec<usize>,
    int_cols: Vec<usize>,
}

impl Projection {
    fn new(theory: &Theory, model: &MipModel) -> Result<Self, VerifyError> {
        let find = |want: &dyn Fn(&ColumnOrigin) -> bool, name: &str| {
            model
                .columns
                .iter()
                .position(|c| want(&c.origin))
                .ok_or_else(|| VerifyError::MissingColumn(name.to_string()))
        };
        let atom_cols = theory
            .atoms
            .iter()
            .map(|a| find(&|o| matches!(o, ColumnOrigin::Atom(n) if *n == a.name), &a.name))
            .collect::<Result<_, _>>()?;
        let int_cols = theory
            .int_vars
            .iter()
            .map(|v| find(&|o| matches!(o, ColumnOrigin::IntVar(n) if *n == v.name), &v.name))
            .collect::<Result<_, _>>()?;
        Ok(Projection { atom_cols, int_cols })
    }

    fn project(&self, point: &[f64]) -> Assignment {
        Assignment {
            atoms: self.atom_cols.iter().map(|&j| point[j] > 0.5).collect(),
            ints: self.int_cols.iter().map(|&j| point[j].round() as i64).collect(),
        }
    }

    /// The model with every original column fixed to `a` and no objective.
    fn fixed(&self, model: &MipModel, a: &Assignment) -> MipModel {
        let mut m = model.clone();
        m.objective.clear();
        m.objective_constant = 0.0;
        for (&j, &v) in self.atom_cols.iter().zip(&a.atoms) {
            let x = v as i64 as f64;
            m.columns[j].lower = x;
            m.columns[j].upper = x;
        }
        for (&j, &v) in self.int_cols.iter().zip(&a.ints) {
            m.columns[j].lower = v as f64;
            m.columns[j].upper = v as f64;
        }
        m
    }
}

fn extendable(model: &MipModel, proj: &Projection, a: &Assignment, limits: &Limits) -> Result<bool, SimplexError> {
    let r = branch_and_bound(&proj.fixed(model, a), limits)?;
    Ok(r.point.is_some())
}

/// Size of the space of all atom values times all integer boxes.
fn full_space(theory: &Theory) -> u128 {
    let mut s = 1u128.checked_shl(theory.atoms.len() as u32).unwrap_or(u128::MAX);
    for v in &theory.int_vars {
        if let Some((lo, up)) = v.bounds {
            s = s.saturating_mul((up - lo + 1).max(0) as u128);
        }
    }
    s
}

fn decode(theory: &Theory, mut idx: u128) -> Assignment {
    let atoms = (0..theory.atoms.len())
        .map(|_| {
            let b = idx & 1 == 1;
            idx >>= 1;
            b
        })
        .collect();
    let ints = theory
        .int_vars
        .iter()
        .map(|v| {
            let (lo, up) = v.bounds.unwrap_or((0, 0));
            let w = (up - lo + 1) as u128;
            let x = lo + (idx % w) as i64;
            idx /= w;
            x
        })
        .collect();
    Assignment { atoms, ints }
}

/// Assignments adjacent to `a`: one atom flipped or one integer moved by one.
fn neighbours(theory: &Theory, a: &Assignment) -> Vec<Assignment> {
    let mut out = Vec::new();
    for i in 0..a.atoms.len() {
        let mut b = a.clone();
        b.atoms[i] = !b.atoms[i];
        out.push(b);
    }
    for (k, v) in theory.int_vars.iter().enumerate() {
        let (lo, up) = v.bounds.unwrap_or((0, 0));
        for d in [-1, 1] {
            let x = a.ints[k] + d;
            if lo <= x && x <= up {
                let mut b = a.clone();
                b.ints[k] = x;
                out.push(b);
            }
        }
    }
    out
}

fn strided<T: Clone>(items: &[T], cap: usize) -> Vec<T> {
    if items.len() <= cap {
        return items.to_vec();
    }
    (0..cap).map(|k| items[k * items.len() / cap].clone()).collect()
}

/// Checks `model` as a translation of the normalized `theory`.
pub fn verify_translation(theory: &Theory, model: &MipModel, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let compiled = CompiledTheory::new(theory)?;
    let outcome = enumerate_models_with(theory, opts.execution)?;
    let oracle_optimum = if outcome.models.is_empty() {
        None
    } else {
        Some(outcome.models.iter().map(|m| compiled.objective(m)).min().unwrap_or(0))
    };
    let proj = Projection::new(theory, model)?;
    let solved = branch_and_bound(model, &opts.limits)?;

    let optimum = match (solved.status, oracle_optimum, solved.objective) {
        (SolveStatus::Limit, _, _) => Check::Fail("solver limit reached".into()),
        (SolveStatus::Unbounded, _, _) => Check::Fail("MIP reported unbounded".into()),
        (SolveStatus::Infeasible, None, _) => Check::Pass,
        (SolveStatus::Infeasible, Some(v), _) => Check::Fail(format!("oracle optimum {v}, MIP infeasible")),
        (SolveStatus::Optimal, None, _) => Check::Fail("oracle unsat, MIP feasible".into()),
        (SolveStatus::Optimal, Some(v), Some(z)) if (z - v as f64).abs() <= 1e-6 => Check::Pass,
        (SolveStatus::Optimal, Some(v), z) => Check::Fail(format!("oracle optimum {v}, MIP optimum {z:?}")),
    };

    let mut sound_failures = Vec::new();
    if let Some(p) = &solved.point {
        let a = proj.project(p);
        if !compiled.is_model(&a) {
            sound_failures.push(format!("solver point {a:?} is not a model"));
        }
    }
    let space = full_space(theory);
    let candidates: Vec<Assignment> = if space <= opts.exhaustive_limit {
        (0..space).map(|i| decode(theory, i)).collect()
    } else {
        let mut c: Vec<Assignment> = strided(&outcome.models, opts.samples)
            .iter()
            .flat_map(|m| neighbours(theory, m))
            .collect();
        let probes = opts.samples as u128 * 4;
        c.extend((0..probes).map(|k| decode(theory, k * space / probes)));
        c
    };
    let mut non_models: Vec<Assignment> = candidates.into_iter().filter(|a| !compiled.is_model(a)).collect();
    non_models.sort();
    non_models.dedup();
    if space > opts.exhaustive_limit {
        non_models = strided(&non_models, opts.samples);
    }
    let limits = &opts.limits;
    let extended = opts.execution.map(&non_models, |a| extendable(model, &proj, a, limits));
    for (a, r) in non_models.iter().zip(extended) {
        if r? {
            sound_failures.push(format!("non-model {a:?} extends to a feasible MIP point"));
        }
    }
    let soundness = match sound_failures.first() {
        None => Check::Pass,
        Some(first) => Check::Fail(format!("{} violation(s); first: {first}", sound_failures.len())),
    };

    let sample = strided(&outcome.models, opts.samples);
    let extended = opts.execution.map(&sample, |a| extendable(model, &proj, a, limits));
    let mut missing = Vec::new();
    for (a, r) in sample.iter().zip(extended) {
        if !r? {
            missing.push(a);
        }
    }
    let completeness = match missing.first() {
        None => Check::Pass,
        Some(a) => Check::Fail(format!("{} model(s) not extendable; first: {a:?}", missing.len())),
    };

    Ok(VerifyReport {
        optimum,
        soundness,
        completeness,
        oracle_optimum,
        mip_status: solved.status,
        mip_objective: solved.objective,
        models: outcome.models.len(),
        non_models_checked: non_models.len(),
    })
}
