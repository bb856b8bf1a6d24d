use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{Atom, AtomKind, Connective, Constraint, Literal, Rule, Theory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("malformed theory: {0}")]
    MalformedTheory(String),
}

/// Brings a theory into the form the linearizer expects.
///
/// * every defined atom heads exactly one rule; rules sharing a head are
///   merged into a disjunction, with conjunctive bodies of two or more
///   literals moved behind fresh defined atoms,
/// * zero coefficients are dropped,
/// * clause literals are deduplicated and tautological clauses removed,
/// * single-literal bodies use the conjunctive connective.
///
/// Atom kinds are recomputed from the definitions.
pub fn normalize_theory(theory: &Theory) -> Result<Theory, NormalizeError> {
    let mut out = theory.clone();

    let defined: HashSet<&str> = theory
        .definitions
        .iter()
        .flat_map(|d| d.rules.iter().map(|r| r.head.as_str()))
        .collect();
    for c in &theory.constraints {
        if let Constraint::Equivalence { head, .. } = c {
            if defined.contains(head.as_str()) {
                return Err(NormalizeError::MalformedTheory(format!(
                    "atom `{head}` is both a definition head and an equivalence head"
                )));
            }
        }
    }

    let mut taken: HashSet<String> = theory
        .atoms
        .iter()
        .map(|a| a.name.clone())
        .chain(theory.int_vars.iter().map(|v| v.name.clone()))
        .collect();

    let mut aux_atoms: Vec<Atom> = Vec::new();
    for (def_id, def) in out.definitions.iter_mut().enumerate() {
        let mut grouped: Vec<(String, Vec<Rule>)> = Vec::new();
        let mut slot: HashMap<String, usize> = HashMap::new();
        for rule in def.rules.drain(..) {
            let idx = *slot.entry(rule.head.clone()).or_insert_with(|| {
                grouped.push((rule.head.clone(), Vec::new()));
                grouped.len() - 1
            });
            grouped[idx].1.push(rule);
        }

        let mut rules = Vec::new();
        for (head, group) in grouped {
            if group.len() == 1 {
                let mut rule = group.into_iter().next().unwrap();
                dedup_literals(&mut rule.body);
                canonical_connective(&mut rule.connective, &rule.body);
                rules.push(rule);
                continue;
            }
            if group.iter().any(|r| r.connective == Connective::And && r.body.is_empty()) {
                rules.push(Rule::and(head, Vec::new()));
                continue;
            }
            let mut disjuncts: Vec<Literal> = Vec::new();
            for rule in group {
                match (rule.connective, rule.body.len()) {
                    (Connective::Or, _) | (_, 1) => disjuncts.extend(rule.body),
                    (Connective::And, _) => {
                        let aux = fresh_name(&head, &mut taken);
                        aux_atoms.push(Atom { name: aux.clone(), kind: AtomKind::Defined(def_id) });
                        let mut body = rule.body;
                        dedup_literals(&mut body);
                        rules.push(Rule::and(aux.clone(), body));
                        disjuncts.push(Literal::pos(aux));
                    }
                }
            }
            dedup_literals(&mut disjuncts);
            let mut connective = Connective::Or;
            canonical_connective(&mut connective, &disjuncts);
            rules.push(Rule { head, connective, body: disjuncts });
        }
        def.rules = rules;
    }
    out.atoms.extend(aux_atoms);

    let head_of: HashMap<String, usize> = out
        .definitions
        .iter()
        .enumerate()
        .flat_map(|(i, d)| d.rules.iter().map(move |r| (r.head.clone(), i)))
        .collect();
    for atom in &mut out.atoms {
        atom.kind = match head_of.get(&atom.name) {
            Some(&i) => AtomKind::Defined(i),
            None => AtomKind::Open,
        };
    }

    let mut constraints = Vec::with_capacity(out.constraints.len());
    for mut c in out.constraints.drain(..) {
        match &mut c {
            Constraint::Clause(lits) => {
                dedup_literals(lits);
                if is_tautology(lits) {
                    continue;
                }
            }
            Constraint::Equivalence { connective, body, .. } => {
                dedup_literals(body);
                canonical_connective(connective, body);
            }
            Constraint::ReifiedSum { terms, .. } => terms.retain(|t| t.coefficient != 0),
            Constraint::ConditionalReifiedSum { terms, .. } => {
                terms.retain(|t| t.term.coefficient != 0)
            }
        }
        constraints.push(c);
    }
    out.constraints = constraints;

    if let Some(obj) = &mut out.objective {
        obj.terms.retain(|t| t.coefficient != 0);
    }
    Ok(out)
}

fn dedup_literals(lits: &mut Vec<Literal>) {
    let mut seen = HashSet::new();
    lits.retain(|l| seen.insert(l.clone()));
}

fn is_tautology(lits: &[Literal]) -> bool {
    lits.iter().any(|l| lits.contains(&l.negated()))
}

fn canonical_connective(connective: &mut Connective, body: &[Literal]) {
    if body.len() == 1 {
        *connective = Connective::And;
    }
}

fn fresh_name(head: &str, taken: &mut HashSet<String>) -> String {
    let mut k = 1;
    loop {
        let candidate = format!("{head}__b{k}");
        if taken.insert(candidate.clone()) {
            return candidate;
        }
        k += 1;
    }
}
