#![allow(dead_code)]

use ecnf2mip::ecnf::{
    Comparator, Connective, Constraint, Definition, GuardedTerm, IntVar, LinearTerm, Literal, Objective, Rule,
    Theory,
};
use ecnf2mip::mip::{Column, ColumnKind, ColumnOrigin, Guard, MipModel, Row, RowOrigin, RowSense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small valid theory: up to 6 atoms, 2 integer variables, every
/// constraint kind and at most one definition with positive recursion only.
pub fn small_theory(seed: u64) -> Theory {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.gen_range(1..=6);
    let atoms: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut t = Theory::new(format!("t{seed}"));
    t.declare_atoms(atoms.iter().cloned());
    for k in 0..r.gen_range(0..=2) {
        let lo = r.gen_range(-2..=1);
        t.int_vars.push(IntVar::new(format!("x{k}"), lo, lo + r.gen_range(0..=4)));
    }
    let ints: Vec<String> = t.int_vars.iter().map(|v| v.name.clone()).collect();
    let heads: Vec<String> = if n >= 2 && r.gen_bool(0.5) { atoms[..r.gen_range(1..n)].to_vec() } else { vec![] };
    let lit = |r: &mut ChaCha8Rng| Literal { atom: atoms[r.gen_range(0..n)].clone(), positive: r.gen_bool(0.5) };
    let var = |r: &mut ChaCha8Rng| {
        if !ints.is_empty() && r.gen_bool(0.5) {
            ints[r.gen_range(0..ints.len())].clone()
        } else {
            atoms[r.gen_range(0..n)].clone()
        }
    };
    // A one-literal body reads back as AND.
    let connective = |r: &mut ChaCha8Rng, len: usize| {
        if len != 1 && r.gen_bool(0.5) { Connective::Or } else { Connective::And }
    };
    let coef = |r: &mut ChaCha8Rng| if r.gen_bool(0.3) { -r.gen_range(1..=3) } else { r.gen_range(1..=3) };
    let open: Vec<&String> = atoms.iter().filter(|a| !heads.contains(a)).collect();
    for _ in 0..r.gen_range(0..=6) {
        let c = match r.gen_range(0..4) {
            0 => Constraint::Clause((0..r.gen_range(1..=3)).map(|_| lit(&mut r)).collect()),
            1 if !open.is_empty() => {
                let head = open[r.gen_range(0..open.len())].clone();
                let body: Vec<Literal> = (0..r.gen_range(1..=3)).map(|_| lit(&mut r)).collect();
                Constraint::Equivalence { head, connective: connective(&mut r, body.len()), body }
            }
            1 | 2 => Constraint::ReifiedSum {
                head: lit(&mut r),
                terms: (0..r.gen_range(1..=3)).map(|_| LinearTerm::new(coef(&mut r), var(&mut r))).collect(),
                cmp: Comparator::ALL[r.gen_range(0..6)],
                rhs: r.gen_range(-3..=3),
            },
            _ => Constraint::ConditionalReifiedSum {
                head: lit(&mut r),
                terms: (0..r.gen_range(0..=3))
                    .map(|_| GuardedTerm { guard: lit(&mut r), term: LinearTerm::new(coef(&mut r), var(&mut r)) })
                    .collect(),
                cmp: Comparator::ALL[r.gen_range(0..6)],
                rhs: r.gen_range(-3..=3),
            },
        };
        t.constraints.push(c);
    }
    if !heads.is_empty() {
        let mut rules = Vec::new();
        for h in &heads {
            for _ in 0..r.gen_range(1..=2) {
                let body: Vec<Literal> = (0..r.gen_range(0..=3))
                    .map(|_| {
                        let a = atoms[r.gen_range(0..n)].clone();
                        let positive = heads.contains(&a) || r.gen_bool(0.6);
                        Literal { atom: a, positive }
                    })
                    .collect();
                rules.push(Rule { head: h.clone(), connective: connective(&mut r, body.len()), body });
            }
        }
        t.add_definition(Definition { rules });
    }
    if r.gen_bool(0.7) {
        t.objective = Some(Objective {
            terms: (0..r.gen_range(1..=3)).map(|_| LinearTerm::new(coef(&mut r), var(&mut r))).collect(),
            constant: r.gen_range(-2..=2),
        });
    }
    t
}

/// Small MIP over up to 6 integral columns of width at most 6 plus an
/// optional continuous column.
pub fn small_mip(seed: u64) -> MipModel {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut m = MipModel::new(format!("m{seed}"));
    let n = r.gen_range(1..=6);
    for j in 0..n {
        let lo = r.gen_range(-3..=2) as f64;
        let width = r.gen_range(0..=5) as f64;
        let kind = if lo == 0.0 && width == 1.0 { ColumnKind::Binary } else { ColumnKind::Integer };
        m.add_column(Column { name: format!("y{j}"), kind, lower: lo, upper: lo + width, origin: ColumnOrigin::External });
    }
    for _ in 0..r.gen_range(0..=5) {
        let terms: Vec<(f64, usize)> =
            (0..r.gen_range(1..=n)).map(|_| (r.gen_range(-4..=4) as f64, r.gen_range(0..n))).collect();
        let sense = [RowSense::Leq, RowSense::Geq, RowSense::Eq][r.gen_range(0..3)];
        let rhs = r.gen_range(-6..=6) as f64 + if r.gen_bool(0.2) { 0.5 } else { 0.0 };
        m.push_row(terms, sense, rhs, RowOrigin::external(), None);
    }
    m.objective = ecnf2mip::mip::merge_terms((0..n).map(|j| (r.gen_range(-5..=5) as f64, j)).collect());
    m.objective_constant = r.gen_range(-3..=3) as f64;
    m
}

/// Minimum objective over all integral points of the box that satisfy
/// every row; `None` when there is none.
pub fn enumerate_optimum(m: &MipModel) -> Option<f64> {
    let ranges: Vec<(i64, i64)> = m.columns.iter().map(|c| (c.lower as i64, c.upper as i64)).collect();
    let mut point: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut best: Option<f64> = None;
    loop {
        let x: Vec<f64> = point.iter().map(|&v| v as f64).collect();
        if m.rows.iter().all(|r| r.sense.holds(r.activity(&x), r.rhs, 1e-9)) {
            let v = m.objective_value(&x);
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
        let mut k = 0;
        loop {
            if k == point.len() {
                return best;
            }
            if point[k] < ranges[k].1 {
                point[k] += 1;
                break;
            }
            point[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Row terms at the guard's false value, with `shrink` subtracted from M.
fn at_guard_false(row: &Row, guard: Guard, shrink: f64) -> (Vec<(f64, usize)>, f64) {
    let false_value = if guard.positive { 0.0 } else { 1.0 };
    // Sign of the M part of the guard coefficient. The guard may also occur
    // in the expression, so the stored coefficient can even cancel to zero.
    let s = match (row.sense, guard.positive) {
        (RowSense::Geq, true) | (RowSense::Leq, false) => -1.0,
        _ => 1.0,
    };
    let a = row.terms.iter().find(|t| t.1 == guard.column).map_or(0.0, |t| t.0) - s * shrink;
    let mut rhs = row.rhs;
    if guard.positive {
        rhs -= s * shrink;
    }
    rhs -= a * false_value;
    let terms = row.terms.iter().copied().filter(|t| t.1 != guard.column).collect();
    (terms, rhs)
}

fn vertices(columns: &[Column], terms: &[(f64, usize)]) -> Vec<f64> {
    let mut out = vec![0.0];
    for &(a, j) in terms {
        let c = &columns[j];
        out = out.iter().flat_map(|&s| [s + a * c.lower, s + a * c.upper]).collect();
    }
    out
}

/// Whether the guarded row holds at every vertex of the box with the guard
/// false, and whether reducing M by one breaks that (checked when M >= 1).
pub fn vacuity_and_minimality(columns: &[Column], row: &Row) -> (bool, bool) {
    let g = row.guard.expect("guarded row");
    let (terms, rhs) = at_guard_false(row, g, 0.0);
    let vacuous = vertices(columns, &terms).iter().all(|&v| row.sense.holds(v, rhs, 1e-9));
    if g.big_m < 1.0 {
        return (vacuous, true);
    }
    let (terms, rhs) = at_guard_false(row, g, 1.0);
    let minimal = vertices(columns, &terms).iter().any(|&v| !row.sense.holds(v, rhs, 1e-9));
    (vacuous, minimal)
}
