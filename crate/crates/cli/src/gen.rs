//! Seeded instance generators.
//!
//! | family          | size             | shape                                          |
//! |-----------------|------------------|------------------------------------------------|
//! | `random`        | atoms, 1..=10    | all constraint kinds plus positive definitions |
//! | `tsp`           | cities, 2..=6    | successor bijection and reachability rules     |
//! | `nqueens-logic` | board, 1..=8     | one atom per square, clauses and equivalences  |
//! | `nqueens-cp`    | board, 1..=8     | one integer per row, reified `!=` sums         |
//! | `knapsack`      | items, 1..=20    | one reified capacity row and an objective      |
//!
//! Every instance is a pure function of (family, size, seed).

use std::fmt;
use std::str::FromStr;

use ecnf2mip::ecnf::{
    Comparator, Connective, Constraint, Definition, GuardedTerm, IntVar, LinearTerm, Literal, Objective, Rule,
    Theory,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    Tsp,
    NQueensLogic,
    NQueensCp,
    Knapsack,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Random, Family::Tsp, Family::NQueensLogic, Family::NQueensCp, Family::Knapsack];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Tsp => "tsp",
            Family::NQueensLogic => "nqueens-logic",
            Family::NQueensCp => "nqueens-cp",
            Family::Knapsack => "knapsack",
        }
    }

    pub fn size_range(self) -> (usize, usize) {
        match self {
            Family::Random => (1, 10),
            Family::Tsp => (2, 6),
            Family::NQueensLogic | Family::NQueensCp => (1, 8),
            Family::Knapsack => (1, 20),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeError {
    pub family: Family,
    pub size: usize,
}

impl fmt::Display for SizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, up) = self.family.size_range();
        write!(f, "size {} out of range for {} (expected {lo}..={up})", self.size, self.family)
    }
}

/// A one-literal body is written as a conjunction, which is how it reads back.
fn connective(or: bool, len: usize) -> Connective {
    if or && len != 1 {
        Connective::Or
    } else {
        Connective::And
    }
}

pub fn generate(family: Family, size: usize, seed: u64) -> Result<Theory, SizeError> {
    let (lo, up) = family.size_range();
    if size < lo || size > up {
        return Err(SizeError { family, size });
    }
    Ok(match family {
        Family::Random => random(size, seed),
        Family::Tsp => tsp(size, seed),
        Family::NQueensLogic => nqueens_logic(size, seed),
        Family::NQueensCp => nqueens_cp(size, seed),
        Family::Knapsack => knapsack(size, seed),
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shuffles unless `seed` is 0, which keeps the natural order.
fn permute<T>(items: &mut [T], seed: u64) {
    if seed != 0 {
        items.shuffle(&mut rng(seed));
    }
}

fn at_most_one(out: &mut Vec<Constraint>, lits: &[String]) {
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            out.push(Constraint::Clause(vec![Literal::neg(lits[i].clone()), Literal::neg(lits[j].clone())]));
        }
    }
}

fn clause(lits: &[String]) -> Constraint {
    Constraint::Clause(lits.iter().map(|n| Literal::pos(n.clone())).collect())
}

const CITIES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Distances of the three-city fixture, indexed `[from][to]`.
const FIXTURE: [[i64; 3]; 3] = [[0, 5, 5], [5, 0, 1], [5, 1, 0]];

/// Tour through `n` cities starting at `a`. `Next(x,y)` says `y` follows
/// `x`; `R(x)` is defined as reachability from `a` along `Next` and is
/// required for every city.
pub fn tsp(n: usize, seed: u64) -> Theory {
    let cities = &CITIES[..n];
    let mut r = rng(seed);
    let dist = |i: usize, j: usize, r: &mut ChaCha8Rng| -> i64 {
        if i == j {
            0
        } else if n == 3 && seed == 0 {
            FIXTURE[i][j]
        } else {
            r.gen_range(1..=9)
        }
    };
    let next = |x: &str, y: &str| format!("Next({x},{y})");
    let reach = |x: &str| format!("R({x})");

    let mut t = Theory::new(if seed == 0 { format!("tsp{n}") } else { format!("tsp{n}_s{seed}") });
    for x in cities {
        t.declare_atoms(cities.iter().map(|y| next(x, y)));
    }
    t.declare_atoms(cities.iter().map(|x| reach(x)));
    for x in cities {
        let succ: Vec<String> = cities.iter().map(|y| next(x, y)).collect();
        t.constraints.push(clause(&succ));
        at_most_one(&mut t.constraints, &succ);
    }
    for y in cities {
        let pred: Vec<String> = cities.iter().map(|x| next(x, y)).collect();
        t.constraints.push(clause(&pred));
        at_most_one(&mut t.constraints, &pred);
    }
    for x in cities {
        t.constraints.push(Constraint::Clause(vec![Literal::pos(reach(x))]));
    }
    let mut rules = vec![Rule::and(reach(cities[0]), vec![])];
    for x in &cities[1..] {
        for y in cities.iter().filter(|y| *y != x) {
            rules.push(Rule::and(reach(x), vec![Literal::pos(reach(y)), Literal::pos(next(y, x))]));
        }
    }
    t.add_definition(Definition { rules });
    let mut terms = Vec::new();
    for (i, x) in cities.iter().enumerate() {
        for (j, y) in cities.iter().enumerate() {
            let d = dist(i, j, &mut r);
            if d != 0 {
                terms.push(LinearTerm::new(d, next(x, y)));
            }
        }
    }
    t.objective = Some(Objective { terms, constant: 0 });
    t
}

/// `Q(r,c)`: a queen on row r, column c. `Row(r)` is equivalent to the
/// disjunction of its squares and required; lines and diagonals hold at
/// most one queen.
pub fn nqueens_logic(n: usize, seed: u64) -> Theory {
    let q = |r: usize, c: usize| format!("Q({r},{c})");
    let mut t = Theory::new(format!("nqueens_logic{n}"));
    let mut atoms: Vec<String> = (1..=n).flat_map(|r| (1..=n).map(move |c| q(r, c))).collect();
    atoms.extend((1..=n).map(|r| format!("Row({r})")));
    permute(&mut atoms, seed);
    t.declare_atoms(atoms);

    let mut cs = Vec::new();
    for r in 1..=n {
        let row: Vec<Literal> = (1..=n).map(|c| Literal::pos(q(r, c))).collect();
        cs.push(Constraint::Equivalence { head: format!("Row({r})"), connective: connective(true, row.len()), body: row });
        cs.push(Constraint::Clause(vec![Literal::pos(format!("Row({r})"))]));
    }
    let mut lines: Vec<Vec<String>> = Vec::new();
    for k in 1..=n {
        lines.push((1..=n).map(|c| q(k, c)).collect());
        lines.push((1..=n).map(|r| q(r, k)).collect());
    }
    let n_i = n as i64;
    for d in -(n_i - 1)..n_i {
        let diag: Vec<String> = (1..=n_i)
            .filter(|r| (1..=n_i).contains(&(r + d)))
            .map(|r| q(r as usize, (r + d) as usize))
            .collect();
        let anti: Vec<String> = (1..=n_i)
            .filter(|r| (1..=n_i).contains(&(n_i + 1 - r + d)))
            .map(|r| q(r as usize, (n_i + 1 - r + d) as usize))
            .collect();
        lines.push(diag);
        lines.push(anti);
    }
    for line in &lines {
        at_most_one(&mut cs, line);
    }
    permute(&mut cs, seed);
    t.constraints = cs;
    t
}

/// `q_r` is the column of the queen on row r; `T` is required and reifies
/// every pairwise `!=` on columns and diagonals.
pub fn nqueens_cp(n: usize, seed: u64) -> Theory {
    let mut t = Theory::new(format!("nqueens_cp{n}"));
    let mut vars: Vec<IntVar> = (1..=n).map(|r| IntVar::new(format!("q{r}"), 1, n as i64)).collect();
    permute(&mut vars, seed);
    t.int_vars = vars;
    t.declare_atoms(["T"]);
    let mut cs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let diff = vec![LinearTerm::new(1, format!("q{i}")), LinearTerm::new(-1, format!("q{j}"))];
            let gap = (j - i) as i64;
            for rhs in [0, gap, -gap] {
                cs.push(Constraint::ReifiedSum { head: Literal::pos("T"), terms: diff.clone(), cmp: Comparator::Neq, rhs });
            }
        }
    }
    permute(&mut cs, seed);
    t.constraints.push(Constraint::Clause(vec![Literal::pos("T")]));
    t.constraints.extend(cs);
    t
}

/// Items `x_i` with weights and values in 1..=9 and capacity half the total
/// weight; the value is maximized.
pub fn knapsack(n: usize, seed: u64) -> Theory {
    let mut r = rng(seed);
    let items: Vec<(i64, i64)> = (0..n).map(|_| (r.gen_range(1..=9), r.gen_range(1..=9))).collect();
    let capacity = items.iter().map(|i| i.0).sum::<i64>() / 2;
    let mut t = Theory::new(format!("knapsack{n}_s{seed}"));
    t.declare_atoms((1..=n).map(|i| format!("x{i}")));
    t.declare_atoms(["T"]);
    t.constraints.push(Constraint::ReifiedSum {
        head: Literal::pos("T"),
        terms: items.iter().enumerate().map(|(i, it)| LinearTerm::new(it.0, format!("x{}", i + 1))).collect(),
        cmp: Comparator::Leq,
        rhs: capacity,
    });
    t.constraints.push(Constraint::Clause(vec![Literal::pos("T")]));
    t.objective = Some(Objective {
        terms: items.iter().enumerate().map(|(i, it)| LinearTerm::new(-it.1, format!("x{}", i + 1))).collect(),
        constant: 0,
    });
    t
}

const MAX_CONSTRAINTS: usize = 12;

/// Random theory over `n` atoms, up to three small integer variables and up
/// to twelve constraints including rules. Definitions never use their own
/// heads negatively.
pub fn random(n: usize, seed: u64) -> Theory {
    let mut r = rng(seed);
    let mut t = Theory::new(format!("random{n}_s{seed}"));
    let atoms: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    t.declare_atoms(atoms.iter().cloned());
    for k in 0..r.gen_range(0..=3) {
        let lo = r.gen_range(-2..=2);
        t.int_vars.push(IntVar::new(format!("x{k}"), lo, lo + r.gen_range(0..=5)));
    }
    let ints: Vec<String> = t.int_vars.iter().map(|v| v.name.clone()).collect();

    // Definitions first so equivalence heads can avoid defined atoms.
    let mut defined: Vec<String> = Vec::new();
    let mut definitions = Vec::new();
    let mut budget = MAX_CONSTRAINTS;
    let n_defs = if n >= 2 { r.gen_range(0..=2) } else { 0 };
    for _ in 0..n_defs {
        let free: Vec<&String> = atoms.iter().filter(|a| !defined.contains(a)).collect();
        if free.len() < 2 || budget < 4 {
            break;
        }
        let k = r.gen_range(1..=3.min(free.len() - 1));
        let heads: Vec<String> = free.choose_multiple(&mut r, k).map(|s| (*s).clone()).collect();
        let mut rules = Vec::new();
        for h in &heads {
            for _ in 0..r.gen_range(1..=2) {
                let len = r.gen_range(0..=3);
                let body: Vec<Literal> = (0..len)
                    .map(|_| {
                        let a = atoms[r.gen_range(0..n)].clone();
                        let positive = heads.contains(&a) || r.gen_bool(0.6);
                        Literal { atom: a, positive }
                    })
                    .collect();
                let connective = connective(!r.gen_bool(0.5), len);
                rules.push(Rule { head: h.clone(), connective, body });
            }
        }
        rules.truncate(budget - 2);
        budget -= rules.len();
        defined.extend(heads.iter().filter(|h| rules.iter().any(|r| &r.head == *h)).cloned());
        definitions.push(Definition { rules });
    }

    let lit = |r: &mut ChaCha8Rng| Literal { atom: atoms[r.gen_range(0..n)].clone(), positive: r.gen_bool(0.5) };
    let var = |r: &mut ChaCha8Rng| {
        if !ints.is_empty() && r.gen_bool(0.5) {
            ints[r.gen_range(0..ints.len())].clone()
        } else {
            atoms[r.gen_range(0..n)].clone()
        }
    };
    let coef = |r: &mut ChaCha8Rng| {
        let c: i64 = r.gen_range(1..=3);
        if r.gen_bool(0.3) {
            -c
        } else {
            c
        }
    };
    let open: Vec<String> = atoms.iter().filter(|a| !defined.contains(a)).cloned().collect();
    for _ in 0..r.gen_range(1..=budget) {
        let c = match r.gen_range(0..4) {
            0 => Constraint::Clause((0..r.gen_range(1..=3)).map(|_| lit(&mut r)).collect()),
            1 if !open.is_empty() => {
                let head = open[r.gen_range(0..open.len())].clone();
                let or = !r.gen_bool(0.5);
                let body: Vec<Literal> = (0..r.gen_range(1..=3)).map(|_| lit(&mut r)).collect();
                Constraint::Equivalence { head, connective: connective(or, body.len()), body }
            }
            1 | 2 => Constraint::ReifiedSum {
                head: lit(&mut r),
                terms: (0..r.gen_range(1..=3)).map(|_| LinearTerm::new(coef(&mut r), var(&mut r))).collect(),
                cmp: Comparator::ALL[r.gen_range(0..6)],
                rhs: r.gen_range(-3..=4),
            },
            _ => Constraint::ConditionalReifiedSum {
                head: lit(&mut r),
                terms: (0..r.gen_range(1..=3))
                    .map(|_| GuardedTerm { guard: lit(&mut r), term: LinearTerm::new(coef(&mut r), var(&mut r)) })
                    .collect(),
                cmp: Comparator::ALL[r.gen_range(0..6)],
                rhs: r.gen_range(-3..=4),
            },
        };
        t.constraints.push(c);
    }
    for d in definitions {
        t.add_definition(d);
    }
    if r.gen_bool(0.7) {
        t.objective = Some(Objective {
            terms: (0..r.gen_range(1..=4)).map(|_| LinearTerm::new(coef(&mut r), var(&mut r))).collect(),
            constant: r.gen_range(-2..=2),
        });
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use ecnf2mip::ecnf::validate_theory;
    use ecnf2mip::io::{parse_ecnf_text, print_ecnf_text};

    #[test]
    fn families_parse_by_name() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("queens".parse::<Family>().is_err());
    }

    #[test]
    fn sizes_are_checked() {
        assert!(generate(Family::Tsp, 7, 0).is_err());
        assert!(generate(Family::Random, 0, 0).is_err());
        assert!(generate(Family::Knapsack, 20, 0).is_ok());
    }

    #[test]
    fn random_theories_are_valid_and_small() {
        for seed in 0..300 {
            let t = random(1 + seed as usize % 10, seed);
            assert!(validate_theory(&t).is_ok(), "seed {seed}: {}", validate_theory(&t));
            assert!(t.constraint_count() <= MAX_CONSTRAINTS, "seed {seed}");
            assert!(t.int_vars.iter().all(|v| {
                let (lo, up) = v.bounds.unwrap();
                up - lo <= 5
            }));
            for d in &t.definitions {
                let heads = d.heads();
                for r in &d.rules {
                    assert!(r.body.iter().all(|l| l.positive || !heads.contains(&l.atom.as_str())));
                }
            }
        }
    }

    #[test]
    fn output_reads_back() {
        for f in Family::ALL {
            let (lo, up) = f.size_range();
            for size in lo..=up.min(6) {
                let t = generate(f, size, size as u64).unwrap();
                assert_eq!(parse_ecnf_text(&print_ecnf_text(&t)).unwrap(), t, "{f} {size}");
            }
        }
    }

    #[test]
    fn seed_zero_keeps_order() {
        let t = nqueens_cp(4, 0);
        let names: Vec<&str> = t.int_vars.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["q1", "q2", "q3", "q4"]);
        assert_eq!(t.constraints.len(), 1 + 3 * 6);
        assert_ne!(nqueens_cp(4, 1).constraints, t.constraints);
    }
}
