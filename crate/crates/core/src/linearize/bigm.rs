use crate::mip::{Column, Guard, MipModel, Row, RowOrigin, RowSense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// Inequality direction of an implication consequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtLeast,
    AtMost,
}

/// A literal over a binary column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColLit {
    pub column: usize,
    pub positive: bool,
}

impl ColLit {
    pub fn negated(self) -> Self {
        ColLit { column: self.column, positive: !self.positive }
    }
}

/// Affine expression over model columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(f64, usize)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn add_term(&mut self, coef: f64, column: usize) {
        self.terms.push((coef, column));
    }

    /// Adds `coef * l*`, where `l* = v` or `1 - v`.
    pub fn add_literal(&mut self, coef: f64, lit: ColLit) {
        if lit.positive {
            self.terms.push((coef, lit.column));
        } else {
            self.constant += coef;
            self.terms.push((-coef, lit.column));
        }
    }

    pub fn from_literals(lits: &[ColLit]) -> Self {
        let mut e = LinExpr::default();
        for &l in lits {
            e.add_literal(1.0, l);
        }
        e
    }
}

/// Exact extremum of an affine expression over the column box.
pub fn box_bound(columns: &[Column], expr: &LinExpr, dir: Direction) -> f64 {
    box_bound_with(columns, expr, dir, None)
}

fn box_bound_with(
    columns: &[Column],
    expr: &LinExpr,
    dir: Direction,
    fixed: Option<(usize, f64)>,
) -> f64 {
    expr.constant
        + expr
            .terms
            .iter()
            .map(|&(a, j)| {
                let (lo, up) = match fixed {
                    Some((k, v)) if k == j => (v, v),
                    _ => (columns[j].lower, columns[j].upper),
                };
                let take_lower = (a > 0.0) == (dir == Direction::Min);
                a * if take_lower { lo } else { up }
            })
            .sum::<f64>()
}

/// Encodes `guard => expr (>=|<=) rhs` as one row.
///
/// `M` is the smallest constant that makes the row hold over the whole box
/// when the guard is false: `rhs - min(expr)` for `>=`, `max(expr) - rhs` for
/// `<=`. The bound is taken with the guard column pinned to its false value,
/// which only matters when the guard also occurs in `expr`. If `M <= 0` the
/// consequent already holds on the box and the guard is dropped.
pub fn big_m_implication(
    columns: &[Column],
    guard: ColLit,
    expr: &LinExpr,
    bound: Bound,
    rhs: f64,
    origin: RowOrigin,
) -> Row {
    // Repeated columns must be combined first or the bound is loose.
    let expr = &LinExpr { terms: crate::mip::merge_terms(expr.terms.clone()), constant: expr.constant };
    let false_value = if guard.positive { 0.0 } else { 1.0 };
    let pinned = Some((guard.column, false_value));
    let big_m = match bound {
        Bound::AtLeast => rhs - box_bound_with(columns, expr, Direction::Min, pinned),
        Bound::AtMost => box_bound_with(columns, expr, Direction::Max, pinned) - rhs,
    };
    let mut terms = expr.terms.clone();
    let mut rhs = rhs - expr.constant;
    let sense = match bound {
        Bound::AtLeast => RowSense::Geq,
        Bound::AtMost => RowSense::Leq,
    };
    let guard_info = if big_m > 0.0 {
        // AtLeast: expr - M*g* >= rhs - M ; AtMost: expr + M*g* <= rhs + M
        let sign = if bound == Bound::AtLeast { -1.0 } else { 1.0 };
        if guard.positive {
            terms.push((sign * big_m, guard.column));
            rhs += sign * big_m;
        } else {
            terms.push((-sign * big_m, guard.column));
        }
        Some(Guard { column: guard.column, positive: guard.positive, big_m })
    } else {
        None
    };
    Row {
        terms: crate::mip::merge_terms(terms),
        sense,
        rhs,
        origin,
        guard: guard_info,
    }
}

/// Pushes a prepared row into the model, recording provenance.
pub(crate) fn push(model: &mut MipModel, row: Row) -> usize {
    let Row { terms, sense, rhs, origin, guard } = row;
    model.push_row(terms, sense, rhs, origin, guard)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{ColumnKind, ColumnOrigin, RowRole};

    fn col(name: &str, kind: ColumnKind, lo: f64, up: f64) -> Column {
        Column { name: name.into(), kind, lower: lo, upper: up, origin: ColumnOrigin::External }
    }

    fn origin() -> RowOrigin {
        RowOrigin { source: None, role: RowRole::Forward }
    }

    fn expr(terms: &[(f64, usize)]) -> LinExpr {
        LinExpr { terms: terms.to_vec(), constant: 0.0 }
    }

    #[test]
    fn bounds_over_box() {
        let cols = vec![
            col("x", ColumnKind::Integer, 0.0, 5.0),
            col("y", ColumnKind::Integer, 0.0, 5.0),
        ];
        assert_eq!(box_bound(&cols, &expr(&[(2.0, 0), (3.0, 1)]), Direction::Min), 0.0);
        assert_eq!(box_bound(&cols, &expr(&[(2.0, 0), (3.0, 1)]), Direction::Max), 25.0);
        let cols3 = vec![
            col("x", ColumnKind::Integer, 0.0, 3.0),
            col("y", ColumnKind::Integer, 0.0, 3.0),
        ];
        // Frozen from enumerating the 16 points of [0,3]^2.
        assert_eq!(box_bound(&cols3, &expr(&[(1.0, 0), (-1.0, 1)]), Direction::Min), -3.0);
    }

    /// Checks the two implication properties by enumerating the box.
    fn check_semantics(cols: &[Column], row: &Row, guard: usize, e: &LinExpr, b: Bound, rhs: f64) {
        let ranges: Vec<Vec<f64>> = cols
            .iter()
            .map(|c| (c.lower as i64..=c.upper as i64).map(|v| v as f64).collect())
            .collect();
        let mut idx = vec![0usize; cols.len()];
        loop {
            let p: Vec<f64> = idx.iter().zip(&ranges).map(|(&i, r)| r[i]).collect();
            let lhs = row.activity(&p);
            let holds = row.sense.holds(lhs, row.rhs, 1e-9);
            let val = e.constant + e.terms.iter().map(|&(a, j)| a * p[j]).sum::<f64>();
            let consequent = match b {
                Bound::AtLeast => val >= rhs,
                Bound::AtMost => val <= rhs,
            };
            if p[guard] == 1.0 {
                assert_eq!(holds, consequent, "point {p:?}");
            } else {
                assert!(holds, "guard false must be vacuous at {p:?}");
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return;
                }
                idx[k] += 1;
                if idx[k] < ranges[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn geq_implication_example() {
        let cols = vec![
            col("x", ColumnKind::Integer, 0.0, 5.0),
            col("y", ColumnKind::Integer, 0.0, 5.0),
            col("l", ColumnKind::Binary, 0.0, 1.0),
        ];
        let e = expr(&[(2.0, 0), (3.0, 1)]);
        let g = ColLit { column: 2, positive: true };
        let row = big_m_implication(&cols, g, &e, Bound::AtLeast, 4.0, origin());
        assert_eq!(row.terms, vec![(2.0, 0), (3.0, 1), (-4.0, 2)]);
        assert_eq!(row.rhs, 0.0);
        assert_eq!(row.guard.unwrap().big_m, 4.0);
        check_semantics(&cols, &row, 2, &e, Bound::AtLeast, 4.0);
    }

    #[test]
    fn difference_implication_example() {
        let cols = vec![
            col("x", ColumnKind::Integer, 0.0, 3.0),
            col("y", ColumnKind::Integer, 0.0, 3.0),
            col("l", ColumnKind::Binary, 0.0, 1.0),
        ];
        let e = expr(&[(1.0, 0), (-1.0, 1)]);
        let row = big_m_implication(&cols, ColLit { column: 2, positive: true }, &e, Bound::AtLeast, 0.0, origin());
        assert_eq!(row.terms, vec![(1.0, 0), (-1.0, 1), (-3.0, 2)]);
        assert_eq!(row.rhs, -3.0);
        check_semantics(&cols, &row, 2, &e, Bound::AtLeast, 0.0);
    }

    #[test]
    fn vacuous_consequent_drops_guard() {
        let cols = vec![col("x", ColumnKind::Integer, 0.0, 5.0), col("l", ColumnKind::Binary, 0.0, 1.0)];
        let e = expr(&[(1.0, 0)]);
        let row = big_m_implication(&cols, ColLit { column: 1, positive: true }, &e, Bound::AtLeast, 0.0, origin());
        assert_eq!(row.terms, vec![(1.0, 0)]);
        assert_eq!(row.rhs, 0.0);
        assert!(row.guard.is_none());
    }

    #[test]
    fn negative_guard_and_leq() {
        let cols = vec![
            col("x", ColumnKind::Integer, -2.0, 4.0),
            col("y", ColumnKind::Integer, 0.0, 3.0),
            col("l", ColumnKind::Binary, 0.0, 1.0),
        ];
        let e = LinExpr { terms: vec![(1.0, 0), (2.0, 1)], constant: 1.0 };
        for rhs in -3..=9 {
            for b in [Bound::AtLeast, Bound::AtMost] {
                let neg = big_m_implication(&cols, ColLit { column: 2, positive: false }, &e, b, rhs as f64, origin());
                // Flip the column to reuse the positive-guard checker.
                let flipped_cols = cols.clone();
                let mut flipped = neg.clone();
                let mut rhs_f = flipped.rhs;
                for t in flipped.terms.iter_mut() {
                    if t.1 == 2 {
                        rhs_f -= t.0;
                        t.0 = -t.0;
                    }
                }
                flipped.rhs = rhs_f;
                check_semantics(&flipped_cols, &flipped, 2, &e, b, rhs as f64);
            }
        }
    }

    #[test]
    fn guard_inside_expression() {
        // v => v + x >= 2 with x in [0,1]: pinned v=0 gives M = 2.
        let cols = vec![col("v", ColumnKind::Binary, 0.0, 1.0), col("x", ColumnKind::Binary, 0.0, 1.0)];
        let e = expr(&[(1.0, 0), (1.0, 1)]);
        let row = big_m_implication(&cols, ColLit { column: 0, positive: true }, &e, Bound::AtLeast, 2.0, origin());
        assert_eq!(row.guard.unwrap().big_m, 2.0);
        check_semantics(&cols, &row, 0, &e, Bound::AtLeast, 2.0);
    }

    #[test]
    fn repeated_columns_are_combined() {
        // 2x - 2x + 3x <= -2 with x in [1,4] is 3x <= -2: M = 12 + 2.
        let cols = vec![col("x", ColumnKind::Integer, 1.0, 4.0), col("l", ColumnKind::Binary, 0.0, 1.0)];
        let e = expr(&[(2.0, 0), (-2.0, 0), (3.0, 0)]);
        let row = big_m_implication(&cols, ColLit { column: 1, positive: true }, &e, Bound::AtMost, -2.0, origin());
        assert_eq!(row.guard.unwrap().big_m, 14.0);
        assert_eq!(row.terms, vec![(3.0, 0), (14.0, 1)]);
    }
}
