use std::fmt;

use crate::mip::MipModel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub feasibility: f64,
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feasibility: 1e-6, integrality: super::bnb::INTEGRALITY_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ViolationKind {
    Row(usize),
    LowerBound(usize),
    UpperBound(usize),
    Integrality(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityViolation {
    pub kind: ViolationKind,
    pub magnitude: f64,
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Row(i) => write!(f, "row {} violated by {}", i, self.magnitude),
            ViolationKind::LowerBound(j) => write!(f, "column {} below lower bound by {}", j, self.magnitude),
            ViolationKind::UpperBound(j) => write!(f, "column {} above upper bound by {}", j, self.magnitude),
            ViolationKind::Integrality(j) => write!(f, "column {} fractional by {}", j, self.magnitude),
        }
    }
}

/// Lists every row, bound and integrality violation of `point`. An empty
/// list certifies feasibility at the given tolerances.
pub fn check_feasible(model: &MipModel, point: &[f64], tol: Tolerances) -> Vec<FeasibilityViolation> {
    assert_eq!(point.len(), model.columns.len(), "point must assign every column");
    let mut out = Vec::new();
    for (i, r) in model.rows.iter().enumerate() {
        let v = r.sense.violation(r.activity(point), r.rhs);
        if v > tol.feasibility {
            out.push(FeasibilityViolation { kind: ViolationKind::Row(i), magnitude: v });
        }
    }
    for (j, c) in model.columns.iter().enumerate() {
        let x = point[j];
        if c.lower - x > tol.feasibility {
            out.push(FeasibilityViolation { kind: ViolationKind::LowerBound(j), magnitude: c.lower - x });
        }
        if x - c.upper > tol.feasibility {
            out.push(FeasibilityViolation { kind: ViolationKind::UpperBound(j), magnitude: x - c.upper });
        }
        if c.kind.is_integral() {
            let frac = (x - x.round()).abs();
            if frac > tol.integrality {
                out.push(FeasibilityViolation { kind: ViolationKind::Integrality(j), magnitude: frac });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{Column, ColumnKind, ColumnOrigin, RowOrigin, RowSense};

    #[test]
    fn row_violation_magnitude() {
        let mut m = MipModel::new("m");
        m.add_column(Column {
            name: "x".into(),
            kind: ColumnKind::Integer,
            lower: 0.0,
            upper: 5.0,
            origin: ColumnOrigin::External,
        });
        m.push_row(vec![(1.0, 0)], RowSense::Leq, 1.0, RowOrigin::external(), None);
        let v = check_feasible(&m, &[2.0], Tolerances::default());
        assert_eq!(v, vec![FeasibilityViolation { kind: ViolationKind::Row(0), magnitude: 1.0 }]);
    }

    #[test]
    fn continuous_columns_skip_integrality() {
        let mut m = MipModel::new("m");
        m.add_column(Column {
            name: "lvl".into(),
            kind: ColumnKind::Continuous,
            lower: 0.0,
            upper: 3.0,
            origin: ColumnOrigin::External,
        });
        assert!(check_feasible(&m, &[2.5], Tolerances::default()).is_empty());
        m.columns[0].kind = ColumnKind::Integer;
        let v = check_feasible(&m, &[2.5], Tolerances::default());
        assert_eq!(v[0].kind, ViolationKind::Integrality(0));
    }
}
