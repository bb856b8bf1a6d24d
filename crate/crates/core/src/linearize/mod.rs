//! Translation of normalized ECNF theories into mixed-integer programs.
//!
//! Every logical construct is reduced to implications `l => sum >= b` (or
//! `<= b`) which [`big_m_implication`] turns into single rows. Definitions are
//! translated by Clark completion plus level-mapping rows that rule out
//! unsupported positive loops.

mod bigm;

pub use bigm::{big_m_implication, box_bound, Bound, ColLit, Direction, LinExpr};

use std::collections::HashMap;

use thiserror::Error;

use crate::ecnf::{Comparator, Connective, Constraint, GuardedTerm, LinearTerm, Literal, Rule, Symbol, Theory};
use crate::mip::{
    AuxKind, Column, ColumnKind, ColumnOrigin, EqSplit, MipModel, RowOrigin, RowRole, RowSense, SourceRef,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("malformed theory: {0}")]
    MalformedTheory(String),
    #[error("integer variable `{0}` needs finite bounds")]
    UnboundedVariable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Emit level-mapping columns and rows for definitions.
    pub level_maps: bool,
    /// Make level columns integer instead of continuous.
    pub integer_levels: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions { level_maps: true, integer_levels: false }
    }
}

/// Exact minimum or maximum of `sum a_i x_i` over the declared bounds; atoms
/// range over `[0, 1]`.
pub fn bound_of_sum(theory: &Theory, terms: &[LinearTerm], dir: Direction) -> Result<i64, TranslateError> {
    let symbols = theory.symbols();
    let mut total = 0i64;
    for t in terms {
        let (lo, up) = match symbols.get(t.variable.as_str()) {
            Some(Symbol::Atom(_)) => (0, 1),
            Some(Symbol::IntVar(i)) => theory.int_vars[*i]
                .bounds
                .ok_or_else(|| TranslateError::UnboundedVariable(t.variable.clone()))?,
            None => {
                return Err(TranslateError::MalformedTheory(format!("undeclared `{}`", t.variable)))
            }
        };
        let take_lower = (t.coefficient > 0) == (dir == Direction::Min);
        total += t.coefficient * if take_lower { lo } else { up };
    }
    Ok(total)
}

/// Translates a normalized, valid theory.
///
/// Columns are laid out as atoms, integer variables, then auxiliaries in
/// creation order; rows follow constraint order and then definition order.
pub fn translate_theory(theory: &Theory, opts: TranslateOptions) -> Result<MipModel, TranslateError> {
    let mut lin = Linearizer::new(theory, opts)?;
    for (i, c) in theory.constraints.iter().enumerate() {
        lin.constraint(SourceRef::Constraint(i), c)?;
    }
    for (i, _) in theory.definitions.iter().enumerate() {
        lin.definition(i)?;
    }
    if let Some(obj) = &theory.objective {
        let mut terms = Vec::with_capacity(obj.terms.len());
        for t in &obj.terms {
            terms.push((t.coefficient as f64, lin.var(&t.variable)?));
        }
        lin.model.objective = crate::mip::merge_terms(terms);
        lin.model.objective_constant = obj.constant as f64;
    }
    Ok(lin.model)
}

/// Incremental translator; one instance per theory.
pub struct Linearizer<'a> {
    theory: &'a Theory,
    opts: TranslateOptions,
    model: MipModel,
    by_name: HashMap<&'a str, usize>,
}

impl<'a> Linearizer<'a> {
    /// Creates one binary column per atom and one integer column per
    /// integer variable.
    pub fn new(theory: &'a Theory, opts: TranslateOptions) -> Result<Self, TranslateError> {
        let mut model = MipModel::new(theory.name.clone());
        let mut by_name = HashMap::new();
        for a in &theory.atoms {
            let j = model.add_column(Column {
                name: a.name.clone(),
                kind: ColumnKind::Binary,
                lower: 0.0,
                upper: 1.0,
                origin: ColumnOrigin::Atom(a.name.clone()),
            });
            if by_name.insert(a.name.as_str(), j).is_some() {
                return Err(TranslateError::MalformedTheory(format!("duplicate id `{}`", a.name)));
            }
        }
        for v in &theory.int_vars {
            let (lo, up) = v.bounds.ok_or_else(|| TranslateError::UnboundedVariable(v.name.clone()))?;
            if lo > up {
                return Err(TranslateError::MalformedTheory(format!("empty domain for `{}`", v.name)));
            }
            let j = model.add_column(Column {
                name: v.name.clone(),
                kind: ColumnKind::Integer,
                lower: lo as f64,
                upper: up as f64,
                origin: ColumnOrigin::IntVar(v.name.clone()),
            });
            if by_name.insert(v.name.as_str(), j).is_some() {
                return Err(TranslateError::MalformedTheory(format!("duplicate id `{}`", v.name)));
            }
        }
        Ok(Linearizer { theory, opts, model, by_name })
    }

    pub fn model(&self) -> &MipModel {
        &self.model
    }

    pub fn into_model(self) -> MipModel {
        self.model
    }

    fn var(&self, name: &str) -> Result<usize, TranslateError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| TranslateError::MalformedTheory(format!("undeclared `{name}`")))
    }

    fn lit(&self, l: &Literal) -> Result<ColLit, TranslateError> {
        let column = self.var(&l.atom)?;
        if self.model.columns[column].kind != ColumnKind::Binary {
            return Err(TranslateError::MalformedTheory(format!("`{}` is not an atom", l.atom)));
        }
        Ok(ColLit { column, positive: l.positive })
    }

    fn lits(&self, ls: &[Literal]) -> Result<Vec<ColLit>, TranslateError> {
        ls.iter().map(|l| self.lit(l)).collect()
    }

    fn aux(&mut self, name: String, kind: ColumnKind, lower: f64, upper: f64, aux: AuxKind, source: SourceRef) -> usize {
        self.model.add_column(Column {
            name,
            kind,
            lower,
            upper,
            origin: ColumnOrigin::Aux { kind: aux, source },
        })
    }

    fn implication(&mut self, guard: ColLit, expr: &LinExpr, bound: Bound, rhs: f64, origin: RowOrigin) -> usize {
        let row = big_m_implication(&self.model.columns, guard, expr, bound, rhs, origin);
        bigm::push(&mut self.model, row)
    }

    /// Translates one source constraint and returns the indices of its rows.
    pub fn constraint(&mut self, src: SourceRef, c: &Constraint) -> Result<Vec<usize>, TranslateError> {
        let first = self.model.rows.len();
        match c {
            Constraint::Clause(lits) => {
                let lits = self.lits(lits)?;
                self.clause(src, &lits);
            }
            Constraint::Equivalence { head, connective, body } => {
                let head = self.lit(&Literal::pos(head.clone()))?;
                let body = self.lits(body)?;
                self.equivalence(src, head, *connective, &body);
            }
            Constraint::ReifiedSum { head, terms, cmp, rhs } => {
                let head = self.lit(head)?;
                let mut expr = LinExpr::default();
                for t in terms {
                    expr.add_term(t.coefficient as f64, self.var(&t.variable)?);
                }
                self.reified_sum(src, head, &expr, *cmp, *rhs as f64);
            }
            Constraint::ConditionalReifiedSum { head, terms, cmp, rhs } => {
                let head = self.lit(head)?;
                self.conditional_sum(src, head, terms, *cmp, *rhs as f64)?;
            }
        }
        Ok((first..self.model.rows.len()).collect())
    }

    /// `sum l_i* >= 1`. The empty clause becomes the infeasible row `0 >= 1`.
    pub fn clause(&mut self, src: SourceRef, lits: &[ColLit]) -> usize {
        let e = LinExpr::from_literals(lits);
        self.model.push_row(
            e.terms,
            RowSense::Geq,
            1.0 - e.constant,
            RowOrigin { source: Some(src), role: RowRole::Clause },
            None,
        )
    }

    /// `head <=> l_1 & .. & l_n` as `head <=> sum l* >= n`, or the
    /// disjunction as `head <=> sum l* >= 1`.
    pub fn equivalence(&mut self, src: SourceRef, head: ColLit, connective: Connective, body: &[ColLit]) -> [usize; 2] {
        let e = LinExpr::from_literals(body);
        let threshold = match connective {
            Connective::And => body.len() as f64,
            Connective::Or => 1.0,
        };
        let fwd = RowOrigin { source: Some(src), role: RowRole::Forward };
        let bwd = RowOrigin { source: Some(src), role: RowRole::Backward };
        [
            self.implication(head, &e, Bound::AtLeast, threshold, fwd),
            self.implication(head.negated(), &e, Bound::AtMost, threshold - 1.0, bwd),
        ]
    }

    fn reify_at_least(&mut self, src: SourceRef, head: ColLit, e: &LinExpr, b: f64) {
        let fwd = RowOrigin { source: Some(src), role: RowRole::Forward };
        let bwd = RowOrigin { source: Some(src), role: RowRole::Backward };
        self.implication(head, e, Bound::AtLeast, b, fwd);
        self.implication(head.negated(), e, Bound::AtMost, b - 1.0, bwd);
    }

    fn reify_at_most(&mut self, src: SourceRef, head: ColLit, e: &LinExpr, b: f64) {
        let fwd = RowOrigin { source: Some(src), role: RowRole::Forward };
        let bwd = RowOrigin { source: Some(src), role: RowRole::Backward };
        self.implication(head, e, Bound::AtMost, b, fwd);
        self.implication(head.negated(), e, Bound::AtLeast, b + 1.0, bwd);
    }

    /// `head <=> expr ~ rhs` over integer-valued expressions.
    pub fn reified_sum(&mut self, src: SourceRef, head: ColLit, e: &LinExpr, cmp: Comparator, rhs: f64) {
        match cmp {
            Comparator::Geq => self.reify_at_least(src, head, e, rhs),
            Comparator::Gt => self.reify_at_least(src, head, e, rhs + 1.0),
            Comparator::Leq => self.reify_at_most(src, head, e, rhs),
            Comparator::Lt => self.reify_at_most(src, head, e, rhs - 1.0),
            Comparator::Eq => self.reified_equality(src, head, e, rhs),
            Comparator::Neq => self.reified_equality(src, head.negated(), e, rhs),
        }
    }

    fn reified_equality(&mut self, src: SourceRef, head: ColLit, e: &LinExpr, rhs: f64) {
        let tag = source_tag(src);
        let w1 = self.aux(format!("w1_{tag}"), ColumnKind::Binary, 0.0, 1.0, AuxKind::EqSplit(EqSplit::W1), src);
        let w2 = self.aux(format!("w2_{tag}"), ColumnKind::Binary, 0.0, 1.0, AuxKind::EqSplit(EqSplit::W2), src);
        let w1 = ColLit { column: w1, positive: true };
        let w2 = ColLit { column: w2, positive: true };
        self.reify_at_least(src, w1, e, rhs);
        self.reify_at_most(src, w2, e, rhs);
        self.equivalence(src, head, Connective::And, &[w1, w2]);
    }

    /// Replaces each guarded term `[l_i] a_i x_i` by `a_i x_i'` with
    /// `l_i => x_i' = x_i` and `not l_i => x_i' = 0`.
    pub fn conditional_sum(
        &mut self,
        src: SourceRef,
        head: ColLit,
        terms: &[GuardedTerm],
        cmp: Comparator,
        rhs: f64,
    ) -> Result<(), TranslateError> {
        let tag = source_tag(src);
        let mut sum = LinExpr::default();
        for (i, g) in terms.iter().enumerate() {
            let guard = self.lit(&g.guard)?;
            let x = self.var(&g.term.variable)?;
            let (lo, up) = (self.model.columns[x].lower, self.model.columns[x].upper);
            let copy = self.aux(
                format!("xc{}_{tag}", i + 1),
                ColumnKind::Integer,
                lo.min(0.0),
                up.max(0.0),
                AuxKind::CondCopy(i),
                src,
            );
            let linked = RowOrigin { source: Some(src), role: RowRole::CopyLinked };
            let zero = RowOrigin { source: Some(src), role: RowRole::CopyZero };
            let diff = LinExpr { terms: vec![(1.0, copy), (-1.0, x)], constant: 0.0 };
            let alone = LinExpr { terms: vec![(1.0, copy)], constant: 0.0 };
            self.implication(guard, &diff, Bound::AtLeast, 0.0, linked);
            self.implication(guard, &diff, Bound::AtMost, 0.0, linked);
            self.implication(guard.negated(), &alone, Bound::AtLeast, 0.0, zero);
            self.implication(guard.negated(), &alone, Bound::AtMost, 0.0, zero);
            sum.add_term(g.term.coefficient as f64, copy);
        }
        self.reified_sum(src, head, &sum, cmp, rhs);
        Ok(())
    }

    /// Completion rows for every rule plus, when enabled, level columns
    /// `z_v in [0, H]` and rows forcing a true head above the same-definition
    /// atoms that support it.
    pub fn definition(&mut self, def_id: usize) -> Result<(), TranslateError> {
        let theory = self.theory;
        let def = &theory.definitions[def_id];
        let mut head_pos: HashMap<&str, usize> = HashMap::new();
        for (i, r) in def.rules.iter().enumerate() {
            if head_pos.insert(r.head.as_str(), i).is_some() {
                return Err(TranslateError::MalformedTheory(format!(
                    "atom `{}` heads several rules; normalize first",
                    r.head
                )));
            }
        }

        let levels: Vec<usize> = if self.opts.level_maps {
            let h = def.rules.len() as f64;
            let kind = if self.opts.integer_levels { ColumnKind::Integer } else { ColumnKind::Continuous };
            def.rules
                .iter()
                .enumerate()
                .map(|(ri, r)| {
                    let src = SourceRef::Rule { definition: def_id, rule: ri };
                    self.aux(format!("lvl_{}", r.head), kind, 0.0, h, AuxKind::Level, src)
                })
                .collect()
        } else {
            Vec::new()
        };

        for (ri, rule) in def.rules.iter().enumerate() {
            let src = SourceRef::Rule { definition: def_id, rule: ri };
            let head = self.lit(&Literal::pos(rule.head.clone()))?;
            let body = self.lits(&rule.body)?;
            self.equivalence(src, head, rule.connective, &body);
            if self.opts.level_maps {
                self.level_rows(src, rule, head, &body, &head_pos, &levels);
            }
        }
        Ok(())
    }

    fn level_rows(
        &mut self,
        src: SourceRef,
        rule: &Rule,
        head: ColLit,
        body: &[ColLit],
        head_pos: &HashMap<&'a str, usize>,
        levels: &[usize],
    ) {
        const EPS: f64 = 1.0;
        let z_head = levels[head_pos[rule.head.as_str()]];
        let recursive = |l: &Literal| -> Option<usize> {
            if l.positive {
                head_pos.get(l.atom.as_str()).map(|&k| levels[k])
            } else {
                None
            }
        };
        let level = RowOrigin { source: Some(src), role: RowRole::Level };
        match rule.connective {
            Connective::And => {
                for l in &rule.body {
                    if let Some(z_body) = recursive(l) {
                        let e = LinExpr { terms: vec![(1.0, z_head), (-1.0, z_body)], constant: 0.0 };
                        self.implication(head, &e, Bound::AtLeast, EPS, level);
                    }
                }
            }
            Connective::Or => {
                let witnesses: Vec<ColLit> = (0..body.len())
                    .map(|i| {
                        let name = format!("wit{}_{}", i + 1, rule.head);
                        let column = self.aux(name, ColumnKind::Binary, 0.0, 1.0, AuxKind::DisjWitness(i), src);
                        ColLit { column, positive: true }
                    })
                    .collect();
                let cover = RowOrigin { source: Some(src), role: RowRole::WitnessCover };
                let support = RowOrigin { source: Some(src), role: RowRole::WitnessSupport };
                self.implication(head, &LinExpr::from_literals(&witnesses), Bound::AtLeast, 1.0, cover);
                for (i, (&w, &l)) in witnesses.iter().zip(body).enumerate() {
                    let e = LinExpr::from_literals(&[w.negated(), l]);
                    self.model.push_row(e.terms, RowSense::Geq, 1.0 - e.constant, support, None);
                    if let Some(z_body) = recursive(&rule.body[i]) {
                        let e = LinExpr { terms: vec![(1.0, z_head), (-1.0, z_body)], constant: 0.0 };
                        self.implication(w, &e, Bound::AtLeast, EPS, level);
                    }
                }
            }
        }
    }
}

fn source_tag(src: SourceRef) -> String {
    match src {
        SourceRef::Constraint(i) => format!("c{}", i + 1),
        SourceRef::Rule { definition, rule } => format!("d{}r{}", definition + 1, rule + 1),
    }
}

#[cfg(test)]
mod tests;
