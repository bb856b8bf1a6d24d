use std::collections::BTreeSet;

use super::*;
use crate::ecnf::{normalize_theory, Definition, IntVar};
use crate::io::parse_ecnf_text;
use crate::solver::{branch_and_bound, Limits, SolveStatus};

/// Every integral point of the column box that satisfies all rows.
fn feasible_points(m: &MipModel) -> Vec<Vec<i64>> {
    let ranges: Vec<(i64, i64)> = m
        .columns
        .iter()
        .map(|c| {
            assert!(c.kind.is_integral() && c.upper.is_finite(), "enumeration needs a finite integral box");
            (c.lower as i64, c.upper as i64)
        })
        .collect();
    let mut out = Vec::new();
    let mut point: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let x: Vec<f64> = point.iter().map(|&v| v as f64).collect();
        if m.rows.iter().all(|r| r.sense.holds(r.activity(&x), r.rhs, 1e-9)) {
            out.push(point.clone());
        }
        let mut k = 0;
        loop {
            if k == point.len() {
                return out;
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

fn project(points: &[Vec<i64>], cols: &[usize]) -> BTreeSet<Vec<i64>> {
    points.iter().map(|p| cols.iter().map(|&j| p[j]).collect()).collect()
}

fn theory(src: &str) -> Theory {
    normalize_theory(&parse_ecnf_text(src).unwrap()).unwrap()
}

fn translate(src: &str) -> MipModel {
    translate_theory(&theory(src), TranslateOptions::default()).unwrap()
}

fn col(m: &MipModel, name: &str) -> usize {
    m.column_index(name).unwrap()
}

fn optimum(m: &MipModel) -> Option<f64> {
    let r = branch_and_bound(m, &Limits::default()).unwrap();
    assert_ne!(r.status, SolveStatus::Limit);
    r.objective
}

#[test]
fn clause_row() {
    let m = translate("atom x y\nclause x | -y\n");
    assert_eq!(m.rows.len(), 1);
    let r = &m.rows[0];
    assert_eq!(r.terms, vec![(1.0, 0), (-1.0, 1)]);
    assert_eq!((r.sense, r.rhs), (RowSense::Geq, 0.0));
}

#[test]
fn unit_and_empty_clause() {
    let m = translate("atom x\nclause x\n");
    assert_eq!((m.rows[0].terms.clone(), m.rows[0].rhs), (vec![(1.0, 0)], 1.0));
    assert!(!m.is_trivially_infeasible());
    let m = translate("atom x\nclause\n");
    assert!(m.rows[0].terms.is_empty());
    assert!(m.is_trivially_infeasible());
}

#[test]
fn and_equivalence_rows() {
    let m = translate("atom v x y\nequiv v <=> x & y\n");
    let (v, x, y) = (0, 1, 2);
    let mut rows: Vec<(Vec<(f64, usize)>, RowSense, f64)> = m
        .rows
        .iter()
        .map(|r| {
            let mut t = r.terms.clone();
            t.sort_by_key(|p| p.1);
            (t, r.sense, r.rhs)
        })
        .collect();
    rows.sort_by(|a, b| a.2.total_cmp(&b.2));
    assert_eq!(rows[0], (vec![(-2.0, v), (1.0, x), (1.0, y)], RowSense::Geq, 0.0));
    assert_eq!(rows[1], (vec![(-1.0, v), (1.0, x), (1.0, y)], RowSense::Leq, 1.0));
    let pts = feasible_points(&m);
    assert_eq!(pts.len(), 4);
    assert!(pts.iter().all(|p| p[v] == (p[x] & p[y])));
}

#[test]
fn or_and_singleton_equivalences() {
    let m = translate("atom v x y\nequiv v <=> x | y\n");
    let pts = feasible_points(&m);
    assert_eq!(pts.len(), 4);
    assert!(pts.iter().all(|p| p[0] == (p[1] | p[2])));

    let m = translate("atom v x\nequiv v <=> x\n");
    assert_eq!(project(&feasible_points(&m), &[0, 1]), BTreeSet::from([vec![0, 0], vec![1, 1]]));
}

#[test]
fn strict_sum_is_shifted() {
    let m = translate("atom v\nint x [0,4]\nsum v <=> x > 2\n");
    let expected: BTreeSet<Vec<i64>> = (0..=4).map(|x| vec![(x > 2) as i64, x]).collect();
    assert_eq!(project(&feasible_points(&m), &[0, 1]), expected);
}

#[test]
fn equality_uses_two_binaries() {
    let m = translate("atom v\nint x [0,4]\nsum v <=> x = 2\n");
    assert!(m.column_index("w1_c1").is_some() && m.column_index("w2_c1").is_some());
    let expected: BTreeSet<Vec<i64>> = (0..=4).map(|x| vec![(x == 2) as i64, x]).collect();
    assert_eq!(project(&feasible_points(&m), &[0, 1]), expected);

    let n = translate("atom v\nint x [0,4]\nsum v <=> x != 2\n");
    let complement: BTreeSet<Vec<i64>> = (0..=4).map(|x| vec![(x != 2) as i64, x]).collect();
    assert_eq!(project(&feasible_points(&n), &[0, 1]), complement);
    assert_eq!(n.columns.len(), m.columns.len());
    assert_eq!(n.rows.len(), m.rows.len());
}

#[test]
fn every_comparator_matches_arithmetic() {
    for cmp in Comparator::ALL {
        let src = format!("atom v\nint x [-2,3]\nint y [0,2]\nsum v <=> 2 x - y {} 1\n", cmp.symbol());
        let m = translate(&src);
        let pts = feasible_points(&m);
        let got = project(&pts, &[0, 1, 2]);
        let mut expected = BTreeSet::new();
        for x in -2..=3 {
            for y in 0..=2 {
                expected.insert(vec![cmp.holds(2 * x - y, 1) as i64, x, y]);
            }
        }
        assert_eq!(got, expected, "{}", cmp.symbol());
        // Auxiliary values are determined by the originals.
        assert_eq!(pts.len(), expected.len(), "{}", cmp.symbol());
    }
}

#[test]
fn conditional_sum_over_24_points() {
    let m = translate("atom v l\nint x [0,5]\ncsum v <=> [l] x >= 3\n");
    let pts = feasible_points(&m);
    let mut expected = BTreeSet::new();
    for l in 0..=1 {
        for x in 0..=5 {
            expected.insert(vec![(l == 1 && x >= 3) as i64, l, x]);
        }
    }
    assert_eq!(project(&pts, &[0, 1, 2]), expected);
    assert_eq!(pts.len(), 12);
    let copy = col(&m, "xc1_c1");
    assert!(pts.iter().all(|p| p[copy] == p[1] * p[2]));
    assert_eq!((m.columns[copy].lower, m.columns[copy].upper), (0.0, 5.0));
}

#[test]
fn copy_bounds_include_zero() {
    let m = translate("atom v l\nint x [2,4]\nint y [-3,-1]\ncsum v <=> [l] x + [-l] y >= 0\n");
    let cx = &m.columns[col(&m, "xc1_c1")];
    let cy = &m.columns[col(&m, "xc2_c1")];
    assert_eq!((cx.lower, cx.upper), (0.0, 4.0));
    assert_eq!((cy.lower, cy.upper), (-3.0, 0.0));
    let pts = feasible_points(&m);
    let mut expected = BTreeSet::new();
    for l in 0..=1 {
        for x in 2..=4 {
            for y in -3..=-1 {
                let s = if l == 1 { x } else { y };
                expected.insert(vec![(s >= 0) as i64, l, x, y]);
            }
        }
    }
    assert_eq!(project(&pts, &[0, 1, 2, 3]), expected);
}

#[test]
fn empty_conditional_sum() {
    let m = translate("atom v\ncsum v <=> 0 >= 1\n");
    assert_eq!(project(&feasible_points(&m), &[0]), BTreeSet::from([vec![0]]));
    let m = translate("atom v\ncsum v <=> 0 >= 0\n");
    assert_eq!(project(&feasible_points(&m), &[0]), BTreeSet::from([vec![1]]));
}

#[test]
fn true_guards_reduce_to_plain_sum() {
    let guarded = translate("atom v g h\nint x [0,3]\nint y [0,2]\nclause g\nclause h\ncsum v <=> [g] 2 x + [h] y = 4\n");
    let plain = translate("atom v g h\nint x [0,3]\nint y [0,2]\nclause g\nclause h\nsum v <=> 2 x + y = 4\n");
    let cols = [0, 1, 2, 3, 4];
    assert_eq!(project(&feasible_points(&guarded), &cols), project(&feasible_points(&plain), &cols));
}

fn with_levels(src: &str, level_maps: bool) -> MipModel {
    let opts = TranslateOptions { level_maps, integer_levels: true };
    translate_theory(&theory(src), opts).unwrap()
}

#[test]
fn positive_loop_needs_levels() {
    let src = "atom p q\ndefine {\n  p <- q.\n  q <- p.\n}\n";
    let completion = with_levels(src, false);
    assert_eq!(project(&feasible_points(&completion), &[0, 1]), BTreeSet::from([vec![0, 0], vec![1, 1]]));
    let levelled = with_levels(src, true);
    assert_eq!(project(&feasible_points(&levelled), &[0, 1]), BTreeSet::from([vec![0, 0]]));
    // Level columns range over [0, H] with H = 2 heads.
    let z = &levelled.columns[col(&levelled, "lvl_p")];
    assert_eq!((z.lower, z.upper), (0.0, 2.0));
}

#[test]
fn non_recursive_rule_is_completion() {
    let m = with_levels("atom a p\ndefine { p <- a. }\n", true);
    assert_eq!(project(&feasible_points(&m), &[0, 1]), BTreeSet::from([vec![0, 0], vec![1, 1]]));
}

#[test]
fn disjunctive_rule_gets_witnesses() {
    let src = "atom a p q\ndefine {\n  p <- a | q.\n  q <- p.\n}\n";
    let m = with_levels(src, true);
    assert!(m.column_index("wit1_p").is_some() && m.column_index("wit2_p").is_some());
    let expected: BTreeSet<Vec<i64>> = [vec![0, 0, 0], vec![1, 1, 1]].into();
    assert_eq!(project(&feasible_points(&m), &[0, 1, 2]), expected);
    let loose = with_levels(src, false);
    assert!(project(&feasible_points(&loose), &[0, 1, 2]).contains(&vec![0, 1, 1]));
}

#[test]
fn unnormalized_definition_is_rejected() {
    let mut t = Theory::new("t");
    t.declare_atoms(["p", "a", "b"]);
    t.add_definition(Definition {
        rules: vec![Rule::and("p", vec![Literal::pos("a")]), Rule::and("p", vec![Literal::pos("b")])],
    });
    let e = translate_theory(&t, TranslateOptions::default()).unwrap_err();
    assert!(matches!(e, TranslateError::MalformedTheory(_)));
}

fn tsp() -> Theory {
    theory(include_str!("../../tests/data/tsp3.ecnf"))
}

/// The 9 Next columns fixed to the bijection `succ`.
fn fix_tour(m: &MipModel, succ: [usize; 3]) -> MipModel {
    let names = ["a", "b", "c"];
    let mut m = m.clone();
    for (i, from) in names.iter().enumerate() {
        for (k, to) in names.iter().enumerate() {
            let j = col(&m, &format!("Next({from},{to})"));
            let v = (succ[i] == k) as i64 as f64;
            m.columns[j].lower = v;
            m.columns[j].upper = v;
        }
    }
    m
}

#[test]
fn subtour_is_cut_by_levels() {
    let t = tsp();
    let subtour = [0, 2, 1];
    for (level_maps, feasible) in [(true, false), (false, true)] {
        let m = translate_theory(&t, TranslateOptions { level_maps, integer_levels: false }).unwrap();
        let r = branch_and_bound(&fix_tour(&m, subtour), &Limits::default()).unwrap();
        assert_eq!(r.point.is_some(), feasible, "level maps {level_maps}");
    }
}

#[test]
fn tsp_bijections_against_reachability() {
    // Frozen from a graph search over the 6 bijections of {a,b,c}: only the
    // two 3-cycles reach every city from a.
    let m = translate_theory(&tsp(), TranslateOptions::default()).unwrap();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for succ in perms {
        let mut seen = [true, false, false];
        let mut at = 0;
        for _ in 0..3 {
            at = succ[at];
            seen[at] = true;
        }
        let tour = seen.iter().all(|&s| s);
        let r = branch_and_bound(&fix_tour(&m, succ), &Limits::default()).unwrap();
        assert_eq!(r.point.is_some(), tour, "{succ:?}");
    }
}

#[test]
fn translate_examples() {
    let m = translate("atom p q\nclause p | q\nminimize p + q\n");
    assert_eq!((m.columns.len(), m.rows.len()), (2, 1));
    assert_eq!(optimum(&m), Some(1.0));

    let mut t = Theory::new("x");
    t.int_vars.push(IntVar::new("x", 2, 7));
    t.objective = Some(crate::ecnf::Objective { terms: vec![LinearTerm::new(1, "x")], constant: 0 });
    assert_eq!(optimum(&translate_theory(&t, TranslateOptions::default()).unwrap()), Some(2.0));

    let t = tsp();
    assert_eq!(optimum(&translate_theory(&t, TranslateOptions::default()).unwrap()), Some(11.0));
    let off = TranslateOptions { level_maps: false, integer_levels: false };
    assert_eq!(optimum(&translate_theory(&t, off).unwrap()), Some(2.0));
    let int = TranslateOptions { level_maps: true, integer_levels: true };
    assert_eq!(optimum(&translate_theory(&t, int).unwrap()), Some(11.0));
}

#[test]
fn layout_and_provenance() {
    let m = translate("atom v p\nint x [0,3]\nsum v <=> x = 1\nclause p\n");
    let names: Vec<&str> = m.columns.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["v", "p", "x", "w1_c1", "w2_c1"]);
    let rows_c1 = &m.provenance[&SourceRef::Constraint(0)];
    let rows_c2 = &m.provenance[&SourceRef::Constraint(1)];
    assert_eq!(rows_c2, &vec![m.rows.len() - 1]);
    assert_eq!(rows_c1.len() + rows_c2.len(), m.rows.len());
}

#[test]
fn translation_is_deterministic() {
    let t = tsp();
    let a = translate_theory(&t, TranslateOptions::default()).unwrap();
    let b = translate_theory(&t, TranslateOptions::default()).unwrap();
    assert_eq!(a, b);
}
