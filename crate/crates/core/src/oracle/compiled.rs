use std::collections::HashMap;

use super::{Assignment, OracleError, MAX_SPACE};
use crate::ecnf::{Comparator, Connective, Constraint, Definition, Literal, Symbol, Theory};

#[derive(Clone, Copy, Debug)]
pub(super) enum VarRef {
    Atom(usize),
    Int(usize),
}

#[derive(Clone, Copy, Debug)]
pub(super) struct Lit {
    pub atom: usize,
    pub positive: bool,
}

impl Lit {
    #[inline]
    pub fn eval(self, atoms: &[bool]) -> bool {
        atoms[self.atom] == self.positive
    }
}

#[derive(Clone, Debug)]
enum Check {
    Clause(Vec<Lit>),
    Equiv { head: usize, and: bool, body: Vec<Lit> },
    Sum { head: Lit, terms: Vec<(i64, VarRef)>, cmp: Comparator, rhs: i64 },
    CondSum { head: Lit, terms: Vec<(Lit, i64, VarRef)>, cmp: Comparator, rhs: i64 },
}

/// Body literal of a rule, relative to its definition.
#[derive(Clone, Copy, Debug)]
pub(super) enum BodyLit {
    /// A head of the same definition, by local index.
    Head { local: usize, positive: bool },
    Param(Lit),
}

#[derive(Clone, Debug)]
pub(super) struct CRule {
    pub head: usize,
    pub and: bool,
    pub body: Vec<BodyLit>,
}

#[derive(Clone, Debug)]
pub(super) struct CDef {
    /// Atom index of each local head.
    pub heads: Vec<usize>,
    pub rules: Vec<CRule>,
}

/// Index-based form of a theory for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledTheory {
    n_atoms: usize,
    int_bounds: Vec<(i64, i64)>,
    checks: Vec<Check>,
    pub(super) defs: Vec<CDef>,
    free_atoms: Vec<usize>,
    /// Definitions whose heads are derived, in dependency order.
    computed: Vec<usize>,
    /// Definitions in cycles with other definitions; their heads are
    /// enumerated and checked instead.
    enumerated: Vec<usize>,
    objective: Vec<(i64, VarRef)>,
    objective_constant: i64,
    space: u128,
}

impl CompiledTheory {
    pub fn new(theory: &Theory) -> Result<Self, OracleError> {
        let symbols = theory.symbols();
        let atom = |name: &str| match symbols.get(name) {
            Some(Symbol::Atom(i)) => Ok(*i),
            _ => Err(OracleError::Invalid(format!("`{name}` is not a declared atom"))),
        };
        let lit = |l: &Literal| atom(&l.atom).map(|a| Lit { atom: a, positive: l.positive });
        let var = |name: &str| match symbols.get(name) {
            Some(Symbol::Atom(i)) => Ok(VarRef::Atom(*i)),
            Some(Symbol::IntVar(i)) => Ok(VarRef::Int(*i)),
            None => Err(OracleError::Invalid(format!("`{name}` is not declared"))),
        };

        let mut int_bounds = Vec::with_capacity(theory.int_vars.len());
        for v in &theory.int_vars {
            match v.bounds {
                Some((lo, up)) if lo <= up => int_bounds.push((lo, up)),
                _ => return Err(OracleError::Invalid(format!("`{}` needs a non-empty bounded domain", v.name))),
            }
        }

        let mut checks = Vec::with_capacity(theory.constraints.len());
        for c in &theory.constraints {
            checks.push(match c {
                Constraint::Clause(ls) => Check::Clause(ls.iter().map(lit).collect::<Result<_, _>>()?),
                Constraint::Equivalence { head, connective, body } => Check::Equiv {
                    head: atom(head)?,
                    and: *connective == Connective::And,
                    body: body.iter().map(lit).collect::<Result<_, _>>()?,
                },
                Constraint::ReifiedSum { head, terms, cmp, rhs } => Check::Sum {
                    head: lit(head)?,
                    terms: terms
                        .iter()
                        .map(|t| var(&t.variable).map(|v| (t.coefficient, v)))
                        .collect::<Result<_, _>>()?,
                    cmp: *cmp,
                    rhs: *rhs,
                },
                Constraint::ConditionalReifiedSum { head, terms, cmp, rhs } => Check::CondSum {
                    head: lit(head)?,
                    terms: terms
                        .iter()
                        .map(|g| Ok((lit(&g.guard)?, g.term.coefficient, var(&g.term.variable)?)))
                        .collect::<Result<_, OracleError>>()?,
                    cmp: *cmp,
                    rhs: *rhs,
                },
            });
        }

        let mut head_owner: HashMap<usize, usize> = HashMap::new();
        let mut defs = Vec::with_capacity(theory.definitions.len());
        for (d, def) in theory.definitions.iter().enumerate() {
            let cdef = compile_definition(def, &atom)?;
            for &h in &cdef.heads {
                if head_owner.insert(h, d).is_some() {
                    return Err(OracleError::Invalid(format!(
                        "atom `{}` is defined twice",
                        theory.atoms[h].name
                    )));
                }
            }
            defs.push(cdef);
        }

        // Definition dependency graph (edges d -> e when d reads a head of e).
        let nd = defs.len();
        let mut reach = vec![vec![false; nd]; nd];
        for (d, def) in defs.iter().enumerate() {
            for r in &def.rules {
                for b in &r.body {
                    if let BodyLit::Param(l) = b {
                        if let Some(&e) = head_owner.get(&l.atom) {
                            reach[d][e] = true;
                        }
                    }
                }
            }
        }
        for k in 0..nd {
            for i in 0..nd {
                if reach[i][k] {
                    let via = reach[k].clone();
                    for (r, v) in reach[i].iter_mut().zip(via) {
                        *r |= v;
                    }
                }
            }
        }
        let enumerated: Vec<usize> = (0..nd).filter(|&d| reach[d][d]).collect();
        let mut computed = Vec::new();
        let mut done = vec![false; nd];
        for &d in &enumerated {
            done[d] = true;
        }
        while computed.len() + enumerated.len() < nd {
            let next = (0..nd)
                .find(|&d| !done[d] && (0..nd).all(|e| e == d || !reach[d][e] || done[e]))
                .expect("acyclic remainder has a source");
            done[next] = true;
            computed.push(next);
        }

        let mut derived = vec![false; theory.atoms.len()];
        for &d in &computed {
            for &h in &defs[d].heads {
                derived[h] = true;
            }
        }
        let free_atoms: Vec<usize> = (0..theory.atoms.len()).filter(|&a| !derived[a]).collect();

        let (objective, objective_constant) = match &theory.objective {
            Some(o) => (
                o.terms
                    .iter()
                    .map(|t| var(&t.variable).map(|v| (t.coefficient, v)))
                    .collect::<Result<_, _>>()?,
                o.constant,
            ),
            None => (Vec::new(), 0),
        };

        let mut space: u128 = 1u128.checked_shl(free_atoms.len() as u32).unwrap_or(u128::MAX);
        for &(lo, up) in &int_bounds {
            space = space.saturating_mul((up - lo + 1) as u128);
        }

        Ok(CompiledTheory {
            n_atoms: theory.atoms.len(),
            int_bounds,
            checks,
            defs,
            free_atoms,
            computed,
            enumerated,
            objective,
            objective_constant,
            space,
        })
    }

    /// Number of enumerated assignments: open atoms (plus heads of mutually
    /// dependent definitions) times the integer boxes.
    pub fn space(&self) -> u128 {
        self.space
    }

    pub(super) fn checked_space(&self) -> Result<usize, OracleError> {
        if self.space >= MAX_SPACE {
            Err(OracleError::SpaceTooLarge(self.space))
        } else {
            Ok(self.space as usize)
        }
    }

    pub(super) fn blank(&self) -> Assignment {
        Assignment {
            atoms: vec![false; self.n_atoms],
            ints: self.int_bounds.iter().map(|b| b.0).collect(),
        }
    }

    /// Decodes enumeration index `idx` into `buf`, derives defined atoms and
    /// reports whether the result is a model.
    pub(super) fn model_at(&self, mut idx: usize, buf: &mut Assignment) -> bool {
        for &a in &self.free_atoms {
            buf.atoms[a] = idx & 1 == 1;
            idx >>= 1;
        }
        for (k, &(lo, up)) in self.int_bounds.iter().enumerate() {
            let width = (up - lo + 1) as usize;
            buf.ints[k] = lo + (idx % width) as i64;
            idx /= width;
        }
        for &d in &self.computed {
            match self.wfm(d, &buf.atoms) {
                Some(vals) => {
                    for (&h, v) in self.defs[d].heads.iter().zip(vals) {
                        buf.atoms[h] = v;
                    }
                }
                None => return false,
            }
        }
        self.enumerated.iter().all(|&d| self.definition_holds(d, &buf.atoms)) && self.constraints_hold(buf)
    }

    pub fn is_model(&self, a: &Assignment) -> bool {
        if a.atoms.len() != self.n_atoms || a.ints.len() != self.int_bounds.len() {
            return false;
        }
        let in_box = a.ints.iter().zip(&self.int_bounds).all(|(&v, &(lo, up))| lo <= v && v <= up);
        in_box && (0..self.defs.len()).all(|d| self.definition_holds(d, &a.atoms)) && self.constraints_hold(a)
    }

    fn definition_holds(&self, d: usize, atoms: &[bool]) -> bool {
        match self.wfm(d, atoms) {
            Some(vals) => self.defs[d].heads.iter().zip(vals).all(|(&h, v)| atoms[h] == v),
            None => false,
        }
    }

    fn value(&self, v: VarRef, a: &Assignment) -> i64 {
        match v {
            VarRef::Atom(i) => a.atoms[i] as i64,
            VarRef::Int(i) => a.ints[i],
        }
    }

    fn constraints_hold(&self, a: &Assignment) -> bool {
        self.checks.iter().all(|c| match c {
            Check::Clause(ls) => ls.iter().any(|l| l.eval(&a.atoms)),
            Check::Equiv { head, and, body } => {
                let b = if *and {
                    body.iter().all(|l| l.eval(&a.atoms))
                } else {
                    body.iter().any(|l| l.eval(&a.atoms))
                };
                a.atoms[*head] == b
            }
            Check::Sum { head, terms, cmp, rhs } => {
                let s: i64 = terms.iter().map(|&(k, v)| k * self.value(v, a)).sum();
                head.eval(&a.atoms) == cmp.holds(s, *rhs)
            }
            Check::CondSum { head, terms, cmp, rhs } => {
                let s: i64 = terms
                    .iter()
                    .filter(|(g, _, _)| g.eval(&a.atoms))
                    .map(|&(_, k, v)| k * self.value(v, a))
                    .sum();
                head.eval(&a.atoms) == cmp.holds(s, *rhs)
            }
        })
    }

    pub fn objective(&self, a: &Assignment) -> i64 {
        self.objective_constant + self.objective.iter().map(|&(k, v)| k * self.value(v, a)).sum::<i64>()
    }
}

pub(super) fn compile_definition(
    def: &Definition,
    atom: &dyn Fn(&str) -> Result<usize, OracleError>,
) -> Result<CDef, OracleError> {
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut heads = Vec::new();
    for r in &def.rules {
        let h = atom(&r.head)?;
        local.entry(h).or_insert_with(|| {
            heads.push(h);
            heads.len() - 1
        });
    }
    let mut rules = Vec::with_capacity(def.rules.len());
    for r in &def.rules {
        let head = local[&atom(&r.head)?];
        let mut body = Vec::with_capacity(r.body.len());
        for l in &r.body {
            let a = atom(&l.atom)?;
            body.push(match local.get(&a) {
                Some(&k) => BodyLit::Head { local: k, positive: l.positive },
                None => BodyLit::Param(Lit { atom: a, positive: l.positive }),
            });
        }
        rules.push(CRule { head, and: r.connective == Connective::And, body });
    }
    Ok(CDef { heads, rules })
}
