//! In-memory model of ground ECNF theories.
//!
//! References between items are by name so that a theory can be built (or
//! parsed) before it is known to be well formed; [`validate_theory`] reports
//! every unresolved name and [`normalize_theory`] brings rule sets into
//! definitional normal form.

mod normalize;
mod validate;

pub use normalize::{normalize_theory, NormalizeError};
pub use validate::{validate_theory, ValidationReport, Violation};

use std::collections::HashMap;
use std::fmt;

/// Whether an atom is a free (open) symbol or is determined by a definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Open,
    /// Index into [`Theory::definitions`].
    Defined(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub kind: AtomKind,
}

impl Atom {
    pub fn open(name: impl Into<String>) -> Self {
        Atom { name: name.into(), kind: AtomKind::Open }
    }
}

/// A bounded integer variable. Bounds are optional only so that a missing
/// declaration can be reported; translation requires both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntVar {
    pub name: String,
    pub bounds: Option<(i64, i64)>,
}

impl IntVar {
    pub fn new(name: impl Into<String>, lower: i64, upper: i64) -> Self {
        IntVar { name: name.into(), bounds: Some((lower, upper)) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<String>) -> Self {
        Literal { atom: atom.into(), positive: true }
    }

    pub fn neg(atom: impl Into<String>) -> Self {
        Literal { atom: atom.into(), positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "-{}", self.atom)
        }
    }
}

/// `coefficient * variable`, where the variable is an integer variable or an
/// atom read as 0/1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearTerm {
    pub coefficient: i64,
    pub variable: String,
}

impl LinearTerm {
    pub fn new(coefficient: i64, variable: impl Into<String>) -> Self {
        LinearTerm { coefficient, variable: variable.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedTerm {
    pub guard: Literal,
    pub term: LinearTerm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Leq,
    Eq,
    Geq,
    Gt,
    Neq,
}

impl Comparator {
    pub const ALL: [Comparator; 6] = [
        Comparator::Lt,
        Comparator::Leq,
        Comparator::Eq,
        Comparator::Geq,
        Comparator::Gt,
        Comparator::Neq,
    ];

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Leq => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
            Comparator::Geq => lhs >= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Neq => lhs != rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Leq => "<=",
            Comparator::Eq => "=",
            Comparator::Geq => ">=",
            Comparator::Gt => ">",
            Comparator::Neq => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Clause(Vec<Literal>),
    Equivalence {
        head: String,
        connective: Connective,
        body: Vec<Literal>,
    },
    ReifiedSum {
        head: Literal,
        terms: Vec<LinearTerm>,
        cmp: Comparator,
        rhs: i64,
    },
    /// Terms only contribute when their guard literal is true.
    ConditionalReifiedSum {
        head: Literal,
        terms: Vec<GuardedTerm>,
        cmp: Comparator,
        rhs: i64,
    },
}

impl Constraint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Constraint::Clause(_) => "clause",
            Constraint::Equivalence { .. } => "equiv",
            Constraint::ReifiedSum { .. } => "sum",
            Constraint::ConditionalReifiedSum { .. } => "csum",
        }
    }
}

/// `head <- body`. An empty conjunction is true, an empty disjunction false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub connective: Connective,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn and(head: impl Into<String>, body: Vec<Literal>) -> Self {
        Rule { head: head.into(), connective: Connective::And, body }
    }

    pub fn or(head: impl Into<String>, body: Vec<Literal>) -> Self {
        Rule { head: head.into(), connective: Connective::Or, body }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definition {
    pub rules: Vec<Rule>,
}

impl Definition {
    /// Distinct heads in first-occurrence order.
    pub fn heads(&self) -> Vec<&str> {
        let mut seen = std::collections::HashSet::new();
        self.rules
            .iter()
            .filter(|r| seen.insert(r.head.as_str()))
            .map(|r| r.head.as_str())
            .collect()
    }
}

/// Linear objective, always minimized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Objective {
    pub terms: Vec<LinearTerm>,
    pub constant: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub int_vars: Vec<IntVar>,
    pub atoms: Vec<Atom>,
    pub constraints: Vec<Constraint>,
    pub definitions: Vec<Definition>,
    pub objective: Option<Objective>,
}

/// What a name refers to inside a theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Atom(usize),
    IntVar(usize),
}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory { name: name.into(), ..Default::default() }
    }

    /// Name lookup table. Later duplicates are ignored.
    pub fn symbols(&self) -> HashMap<&str, Symbol> {
        let mut map = HashMap::with_capacity(self.atoms.len() + self.int_vars.len());
        for (i, a) in self.atoms.iter().enumerate() {
            map.entry(a.name.as_str()).or_insert(Symbol::Atom(i));
        }
        for (i, v) in self.int_vars.iter().enumerate() {
            map.entry(v.name.as_str()).or_insert(Symbol::IntVar(i));
        }
        map
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    /// Adds an open atom per name.
    pub fn declare_atoms<I, S>(&mut self, names: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.atoms.extend(names.into_iter().map(Atom::open));
    }

    /// Appends a definition and marks its heads as defined.
    pub fn add_definition(&mut self, def: Definition) -> usize {
        let id = self.definitions.len();
        for head in def.heads() {
            if let Some(a) = self.atoms.iter_mut().find(|a| a.name == head) {
                a.kind = AtomKind::Defined(id);
            }
        }
        self.definitions.push(def);
        id
    }

    /// Number of source constraints, counting each rule as one.
    pub fn constraint_count(&self) -> usize {
        self.constraints.len() + self.definitions.iter().map(|d| d.rules.len()).sum::<usize>()
    }

    pub fn variable_count(&self) -> usize {
        self.atoms.len() + self.int_vars.len()
    }
}
