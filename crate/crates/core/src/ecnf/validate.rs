use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{AtomKind, Constraint, Literal, Symbol, Theory};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateId(String),
    DanglingReference { name: String, context: String },
    /// A literal, rule head or equivalence head names an integer variable.
    NotAnAtom { name: String, context: String },
    UnboundedVariable(String),
    EmptyDomain(String),
    /// The same atom heads rules in two different definitions.
    HeadInSeveralDefinitions(String),
    DefinedEquivalenceHead(String),
    KindMismatch(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(n) => write!(f, "duplicate identifier `{n}`"),
            Violation::DanglingReference { name, context } => {
                write!(f, "undeclared symbol `{name}` in {context}")
            }
            Violation::NotAnAtom { name, context } => {
                write!(f, "`{name}` is an integer variable but is used as an atom in {context}")
            }
            Violation::UnboundedVariable(n) => write!(f, "integer variable `{n}` has no bounds"),
            Violation::EmptyDomain(n) => write!(f, "integer variable `{n}` has lower > upper"),
            Violation::HeadInSeveralDefinitions(n) => {
                write!(f, "atom `{n}` is defined in more than one definition")
            }
            Violation::DefinedEquivalenceHead(n) => {
                write!(f, "defined atom `{n}` is also an equivalence head")
            }
            Violation::KindMismatch(n) => {
                write!(f, "atom `{n}` has a kind inconsistent with the definitions")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collects every well-formedness violation; never stops at the first.
pub fn validate_theory(theory: &Theory) -> ValidationReport {
    let mut out = Vec::new();
    let symbols = theory.symbols();

    let mut seen = HashSet::new();
    let names = theory
        .atoms
        .iter()
        .map(|a| &a.name)
        .chain(theory.int_vars.iter().map(|v| &v.name));
    for name in names {
        if !seen.insert(name.as_str()) {
            out.push(Violation::DuplicateId(name.clone()));
        }
    }

    for v in &theory.int_vars {
        match v.bounds {
            None => out.push(Violation::UnboundedVariable(v.name.clone())),
            Some((lo, up)) if lo > up => out.push(Violation::EmptyDomain(v.name.clone())),
            Some(_) => {}
        }
    }

    let atom_ref = |name: &str, context: &str, out: &mut Vec<Violation>| match symbols.get(name) {
        Some(Symbol::Atom(_)) => {}
        Some(Symbol::IntVar(_)) => out.push(Violation::NotAnAtom {
            name: name.to_string(),
            context: context.to_string(),
        }),
        None => out.push(Violation::DanglingReference {
            name: name.to_string(),
            context: context.to_string(),
        }),
    };
    let lits = |lits: &[Literal], context: &str, out: &mut Vec<Violation>| {
        for l in lits {
            atom_ref(&l.atom, context, out);
        }
    };
    let var_ref = |name: &str, context: &str, out: &mut Vec<Violation>| {
        if !symbols.contains_key(name) {
            out.push(Violation::DanglingReference {
                name: name.to_string(),
                context: context.to_string(),
            });
        }
    };

    let mut head_def: HashMap<&str, usize> = HashMap::new();
    for (i, def) in theory.definitions.iter().enumerate() {
        let context = format!("definition {}", i + 1);
        for rule in &def.rules {
            atom_ref(&rule.head, &context, &mut out);
            lits(&rule.body, &context, &mut out);
            match head_def.get(rule.head.as_str()) {
                Some(&j) if j != i => {
                    let v = Violation::HeadInSeveralDefinitions(rule.head.clone());
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                Some(_) => {}
                None => {
                    head_def.insert(&rule.head, i);
                }
            }
        }
    }

    for (i, c) in theory.constraints.iter().enumerate() {
        let context = format!("constraint {} ({})", i + 1, c.kind_name());
        match c {
            Constraint::Clause(l) => lits(l, &context, &mut out),
            Constraint::Equivalence { head, body, .. } => {
                atom_ref(head, &context, &mut out);
                lits(body, &context, &mut out);
                if head_def.contains_key(head.as_str()) {
                    out.push(Violation::DefinedEquivalenceHead(head.clone()));
                }
            }
            Constraint::ReifiedSum { head, terms, .. } => {
                atom_ref(&head.atom, &context, &mut out);
                for t in terms {
                    var_ref(&t.variable, &context, &mut out);
                }
            }
            Constraint::ConditionalReifiedSum { head, terms, .. } => {
                atom_ref(&head.atom, &context, &mut out);
                for g in terms {
                    atom_ref(&g.guard.atom, &context, &mut out);
                    var_ref(&g.term.variable, &context, &mut out);
                }
            }
        }
    }

    if let Some(obj) = &theory.objective {
        for t in &obj.terms {
            var_ref(&t.variable, "objective", &mut out);
        }
    }

    for a in &theory.atoms {
        let expected = head_def.get(a.name.as_str()).copied();
        let consistent = match (a.kind, expected) {
            (AtomKind::Open, None) => true,
            (AtomKind::Defined(i), Some(j)) => i == j,
            _ => false,
        };
        if !consistent {
            out.push(Violation::KindMismatch(a.name.clone()));
        }
    }

    ValidationReport { violations: out }
}
