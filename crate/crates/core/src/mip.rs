//! Mixed-integer program representation shared by the linearizer, the solver
//! and the MPS reader/writer.

use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Binary,
    Integer,
    Continuous,
}

impl ColumnKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, ColumnKind::Continuous)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EqSplit {
    W1,
    W2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AuxKind {
    /// Halves of an equality split (`w1 <=> sum >= b`, `w2 <=> sum <= b`).
    EqSplit(EqSplit),
    /// Support witness for one disjunct of a disjunctive rule.
    DisjWitness(usize),
    /// Guarded copy of a conditional-sum term.
    CondCopy(usize),
    /// Level of a defined atom.
    Level,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ColumnOrigin {
    Atom(String),
    IntVar(String),
    Aux { kind: AuxKind, source: SourceRef },
    /// Read from a file; provenance unknown.
    External,
}

impl ColumnOrigin {
    pub fn is_aux(&self) -> bool {
        matches!(self, ColumnOrigin::Aux { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub lower: f64,
    pub upper: f64,
    pub origin: ColumnOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowSense {
    Leq,
    Geq,
    Eq,
}

impl RowSense {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        self.violation(lhs, rhs) <= tol
    }

    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            RowSense::Leq => (lhs - rhs).max(0.0),
            RowSense::Geq => (rhs - lhs).max(0.0),
            RowSense::Eq => (lhs - rhs).abs(),
        }
    }
}

/// Source item a row or auxiliary column was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceRef {
    Constraint(usize),
    Rule { definition: usize, rule: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowRole {
    Clause,
    /// `guard => body holds` half of an equivalence.
    Forward,
    /// `not guard => body fails` half of an equivalence.
    Backward,
    CopyLinked,
    CopyZero,
    Level,
    WitnessCover,
    WitnessSupport,
    /// Read from a file.
    External,
}

/// The indicator of a Big-M row: with the guard literal false the row holds at
/// every point of the column box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guard {
    pub column: usize,
    pub positive: bool,
    pub big_m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowOrigin {
    pub source: Option<SourceRef>,
    pub role: RowRole,
}

impl RowOrigin {
    pub fn external() -> Self {
        RowOrigin { source: None, role: RowRole::External }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// Distinct columns, nonzero coefficients.
    pub terms: Vec<(f64, usize)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub origin: RowOrigin,
    pub guard: Option<Guard>,
}

impl Row {
    pub fn activity(&self, point: &[f64]) -> f64 {
        self.terms.iter().map(|&(a, j)| a * point[j]).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MipModel {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// Minimized.
    pub objective: Vec<(f64, usize)>,
    pub objective_constant: f64,
    pub provenance: BTreeMap<SourceRef, Vec<usize>>,
}

impl MipModel {
    pub fn new(name: impl Into<String>) -> Self {
        MipModel { name: name.into(), ..Default::default() }
    }

    pub fn add_column(&mut self, column: Column) -> usize {
        self.columns.push(column);
        self.columns.len() - 1
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Adds a row after merging duplicate columns and dropping zeros.
    pub fn push_row(
        &mut self,
        terms: Vec<(f64, usize)>,
        sense: RowSense,
        rhs: f64,
        origin: RowOrigin,
        guard: Option<Guard>,
    ) -> usize {
        let terms = merge_terms(terms);
        let idx = self.rows.len();
        self.rows.push(Row { terms, sense, rhs, origin, guard });
        if let Some(src) = origin.source {
            self.provenance.entry(src).or_default().push(idx);
        }
        idx
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().map(|&(c, j)| c * point[j]).sum::<f64>()
    }

    /// True when some row has no terms and cannot hold, e.g. an empty clause.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.rows
            .iter()
            .any(|r| r.terms.is_empty() && !r.sense.holds(0.0, r.rhs, 0.0))
    }

    /// Columns that stand for source atoms and integer variables, in order.
    pub fn original_columns(&self) -> impl Iterator<Item = (usize, &Column)> {
        self.columns.iter().enumerate().filter(|(_, c)| !c.origin.is_aux())
    }

    /// Comparison that ignores provenance, guards and the binary/integer
    /// distinction for integral columns (MPS cannot express those).
    pub fn same_structure(&self, other: &MipModel) -> bool {
        let cols = self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| {
                a.name == b.name
                    && a.kind.is_integral() == b.kind.is_integral()
                    && a.lower == b.lower
                    && a.upper == b.upper
            });
        let rows = self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.sense == b.sense && a.rhs == b.rhs && sorted(&a.terms) == sorted(&b.terms)
            });
        cols && rows
            && self.name == other.name
            && sorted(&self.objective) == sorted(&other.objective)
            && self.objective_constant == other.objective_constant
    }
}

fn sorted(terms: &[(f64, usize)]) -> Vec<(usize, u64)> {
    let mut v: Vec<_> = terms.iter().map(|&(a, j)| (j, a.to_bits())).collect();
    v.sort_unstable();
    v
}

/// Sums coefficients per column in first-occurrence order and drops zeros.
pub fn merge_terms(terms: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::with_capacity(terms.len());
    for (a, j) in terms {
        match out.iter_mut().find(|(_, k)| *k == j) {
            Some(slot) => slot.0 += a,
            None => out.push((a, j)),
        }
    }
    out.retain(|&(a, _)| a != 0.0);
    out
}
