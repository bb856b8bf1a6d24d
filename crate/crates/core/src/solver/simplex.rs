//! Dense bounded-variable primal simplex.
//!
//! Rows are turned into equalities with one slack each; a slack whose
//! starting value violates its bounds is replaced in the initial basis by an
//! artificial column. Phase one minimizes the artificials, phase two the
//! model objective. Columns fixed by their bounds are substituted out before
//! the tableau is built.

use thiserror::Error;

use crate::mip::{MipModel, RowSense};

pub const FEASIBILITY_TOL: f64 = 1e-7;
pub const REDUCED_COST_TOL: f64 = 1e-7;
pub const PIVOT_TOL: f64 = 1e-10;

/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 25;
const REFRESH_EVERY: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// One value per model column; meaningful when optimal.
    pub point: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("numeric breakdown after {iterations} iterations: no pivot above {PIVOT_TOL:e}")]
    NumericBreakdown { iterations: usize },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
}

/// Solves the LP relaxation of `model`. `bounds`, when given, replaces the
/// column bounds (one pair per column).
pub fn simplex_solve(model: &MipModel, bounds: Option<&[(f64, f64)]>) -> Result<LpResult, SimplexError> {
    let n_cols = model.columns.len();
    let col_bounds: Vec<(f64, f64)> = match bounds {
        Some(b) => b.to_vec(),
        None => model.columns.iter().map(|c| (c.lower, c.upper)).collect(),
    };
    let infeasible = |iterations| LpResult {
        status: LpStatus::Infeasible,
        point: Vec::new(),
        objective: f64::NAN,
        iterations,
    };
    if col_bounds.iter().any(|&(l, u)| l > u + FEASIBILITY_TOL) {
        return Ok(infeasible(0));
    }

    // Substitute fixed columns.
    let mut position = vec![usize::MAX; n_cols];
    let mut free_cols = Vec::new();
    let mut base_point = vec![0.0; n_cols];
    for (j, &(l, u)) in col_bounds.iter().enumerate() {
        if u - l <= 1e-12 {
            base_point[j] = l;
        } else {
            position[j] = free_cols.len();
            free_cols.push(j);
        }
    }
    let n = free_cols.len();
    let mut rows: Vec<DenseRow> = Vec::with_capacity(model.rows.len());
    for r in &model.rows {
        let mut rhs = r.rhs;
        let mut terms = Vec::with_capacity(r.terms.len());
        for &(a, j) in &r.terms {
            if position[j] == usize::MAX {
                rhs -= a * base_point[j];
            } else {
                terms.push((a, position[j]));
            }
        }
        if terms.is_empty() {
            if r.sense.violation(0.0, rhs) > FEASIBILITY_TOL {
                return Ok(infeasible(0));
            }
            continue;
        }
        rows.push((terms, r.sense, rhs));
    }
    let mut cost = vec![0.0; n];
    for &(c, j) in &model.objective {
        if position[j] != usize::MAX {
            cost[position[j]] += c;
        }
    }
    let lower: Vec<f64> = free_cols.iter().map(|&j| col_bounds[j].0).collect();
    let upper: Vec<f64> = free_cols.iter().map(|&j| col_bounds[j].1).collect();

    let mut tab = Tableau::build(&rows, &cost, &lower, &upper);
    let status = tab.solve()?;
    let mut point = base_point;
    if status == LpStatus::Optimal {
        for (k, &j) in free_cols.iter().enumerate() {
            let (l, u) = col_bounds[j];
            point[j] = tab.x[k].clamp(l, u);
        }
    }
    let objective = if status == LpStatus::Optimal { model.objective_value(&point) } else { f64::NAN };
    Ok(LpResult { status, point, objective, iterations: tab.iterations })
}

/// Row over the free columns after substituting fixed ones.
type DenseRow = (Vec<(f64, usize)>, RowSense, f64);

struct Tableau {
    m: usize,
    /// Structural columns, slacks, artificials.
    width: usize,
    first_art: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    limit: usize,
}

impl Tableau {
    fn build(rows: &[DenseRow], cost: &[f64], lower: &[f64], upper: &[f64]) -> Self {
        let n = cost.len();
        let m = rows.len();
        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                if lower[j].is_finite() {
                    lower[j]
                } else if upper[j].is_finite() {
                    upper[j]
                } else {
                    0.0
                }
            })
            .collect();

        // Decide which rows need an artificial.
        let mut needs_art = Vec::with_capacity(m);
        let mut residual = Vec::with_capacity(m);
        for (terms, sense, rhs) in rows {
            let act: f64 = terms.iter().map(|&(a, j)| a * x[j]).sum();
            let s = rhs - act;
            let (sl, su) = slack_bounds(*sense);
            residual.push(s);
            needs_art.push(s < sl - FEASIBILITY_TOL || s > su + FEASIBILITY_TOL);
        }
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let width = n + m + n_art;
        let first_art = n + m;

        let mut t = vec![0.0; m * width];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        let mut full_cost = cost.to_vec();
        full_cost.resize(width, 0.0);
        x.resize(width, 0.0);
        let mut art = first_art;
        for (i, (terms, sense, rhs)) in rows.iter().enumerate() {
            let (sl, su) = slack_bounds(*sense);
            lo.push(sl);
            up.push(su);
            let row = &mut t[i * width..(i + 1) * width];
            if needs_art[i] {
                let sigma = if residual[i] > su { 1.0 } else { -1.0 };
                let s_val = if residual[i] > su { su } else { sl };
                for &(a, j) in terms {
                    row[j] = sigma * a;
                }
                row[n + i] = sigma;
                row[art] = 1.0;
                beta[i] = sigma * rhs;
                x[n + i] = s_val;
                basis[i] = art;
                art += 1;
            } else {
                for &(a, j) in terms {
                    row[j] = a;
                }
                row[n + i] = 1.0;
                beta[i] = *rhs;
                basis[i] = n + i;
            }
        }
        lo.resize(width, 0.0);
        up.resize(width, f64::INFINITY);
        let mut is_basic = vec![false; width];
        for &b in &basis {
            is_basic[b] = true;
        }
        let limit = 50 * (m + width) + 1000;
        let mut tab = Tableau {
            m,
            width,
            first_art,
            t,
            beta,
            basis,
            is_basic,
            lower: lo,
            upper: up,
            x,
            cost: full_cost,
            d: vec![0.0; width],
            iterations: 0,
            limit,
        };
        tab.refresh_basics();
        tab
    }

    fn solve(&mut self) -> Result<LpStatus, SimplexError> {
        if self.first_art < self.width {
            let phase2_cost = std::mem::replace(&mut self.cost, vec![0.0; self.width]);
            for j in self.first_art..self.width {
                self.cost[j] = 1.0;
            }
            self.recompute_reduced_costs();
            let st = self.iterate()?;
            debug_assert_ne!(st, LpStatus::Unbounded);
            self.refresh_basics();
            let infeas: f64 = (self.first_art..self.width).map(|j| self.x[j]).sum();
            if infeas > FEASIBILITY_TOL {
                return Ok(LpStatus::Infeasible);
            }
            for j in self.first_art..self.width {
                self.upper[j] = 0.0;
                if !self.is_basic[j] {
                    self.x[j] = 0.0;
                }
            }
            self.cost = phase2_cost;
        }
        self.recompute_reduced_costs();
        let st = self.iterate()?;
        self.refresh_basics();
        Ok(st)
    }

    fn recompute_reduced_costs(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.width..(i + 1) * self.width];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for i in 0..self.m {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn refresh_basics(&mut self) {
        for i in 0..self.m {
            let row = &self.t[i * self.width..(i + 1) * self.width];
            let mut v = self.beta[i];
            for (j, &tij) in row.iter().enumerate() {
                if tij != 0.0 && !self.is_basic[j] {
                    v -= tij * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Entering candidates ordered by preference.
    fn candidates(&self, bland: bool) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.width {
            if self.is_basic[j] || self.upper[j] - self.lower[j] <= 1e-12 {
                continue;
            }
            let dj = self.d[j];
            if dj < -REDUCED_COST_TOL && self.x[j] < self.upper[j] {
                out.push((j, 1.0));
            } else if dj > REDUCED_COST_TOL && self.x[j] > self.lower[j] {
                out.push((j, -1.0));
            }
        }
        if !bland {
            out.sort_by(|a, b| self.d[b.0].abs().total_cmp(&self.d[a.0].abs()).then(a.0.cmp(&b.0)));
        }
        out
    }

    /// Returns the step length and the leaving row (`None` for a bound flip).
    /// Only entries of magnitude at least `PIVOT_TOL` may pivot; `Err(())`
    /// means a smaller entry would block the step by more than the
    /// feasibility tolerance.
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> Result<Option<(f64, Option<usize>)>, ()> {
        let mut best_t = f64::INFINITY;
        let mut best_row: Option<usize> = None;
        if self.lower[q].is_finite() && self.upper[q].is_finite() {
            best_t = self.upper[q] - self.lower[q];
        }
        let mut best_alpha = 0.0f64;
        let mut tiny: Vec<(f64, f64)> = Vec::new();
        for i in 0..self.m {
            let alpha = self.t[i * self.width + q];
            if alpha.abs() <= 1e-13 {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * alpha;
            let limit = if rate < 0.0 {
                if !self.lower[b].is_finite() {
                    continue;
                }
                ((self.x[b] - self.lower[b]) / -rate).max(0.0)
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                ((self.upper[b] - self.x[b]) / rate).max(0.0)
            };
            if alpha.abs() < PIVOT_TOL {
                tiny.push((limit, alpha.abs()));
                continue;
            }
            let take = if limit < best_t - 1e-12 {
                true
            } else if limit <= best_t + 1e-12 {
                match best_row {
                    None => false,
                    Some(r) if bland => b < self.basis[r],
                    Some(_) => alpha.abs() > best_alpha,
                }
            } else {
                false
            };
            if take {
                best_t = limit;
                best_row = Some(i);
                best_alpha = alpha.abs();
            }
        }
        if tiny.iter().any(|&(limit, a)| a * (best_t - limit) > FEASIBILITY_TOL) {
            return Err(());
        }
        if best_t.is_infinite() {
            return Ok(None);
        }
        Ok(Some((best_t, best_row)))
    }

    fn iterate(&mut self) -> Result<LpStatus, SimplexError> {
        let mut degenerate = 0usize;
        let mut since_refresh = 0usize;
        loop {
            if self.iterations >= self.limit {
                return Err(SimplexError::IterationLimit(self.limit));
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let cands = self.candidates(bland);
            if cands.is_empty() {
                return Ok(LpStatus::Optimal);
            }
            let mut chosen = None;
            for &(q, dir) in &cands {
                match self.ratio_test(q, dir, bland) {
                    Ok(None) => return Ok(LpStatus::Unbounded),
                    Ok(Some((step, row))) => {
                        chosen = Some((q, dir, step, row));
                        break;
                    }
                    Err(()) => continue,
                }
            }
            let Some((q, dir, step, row)) = chosen else {
                return Err(SimplexError::NumericBreakdown { iterations: self.iterations });
            };
            self.iterations += 1;
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }

            // Move the entering variable and the basics.
            if step > 0.0 {
                self.x[q] += dir * step;
                for i in 0..self.m {
                    let alpha = self.t[i * self.width + q];
                    if alpha != 0.0 {
                        self.x[self.basis[i]] -= dir * alpha * step;
                    }
                }
            }
            match row {
                None => {
                    // Bound flip: snap to the opposite bound.
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    let alpha = self.t[r * self.width + q];
                    let rate = -dir * alpha;
                    self.x[leaving] = if rate < 0.0 { self.lower[leaving] } else { self.upper[leaving] };
                    self.pivot(r, q);
                }
            }
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                since_refresh = 0;
                self.refresh_basics();
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            self.beta[r] /= piv;
        }
        let (pivot_row, beta_r) = (self.t[r * w..(r + 1) * w].to_vec(), self.beta[r]);
        let nz: Vec<usize> = (0..w).filter(|&j| pivot_row[j] != 0.0).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for &j in &nz {
                row[j] -= f * pivot_row[j];
            }
            row[q] = 0.0;
            self.beta[i] -= f * beta_r;
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for &j in &nz {
                self.d[j] -= dq * pivot_row[j];
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }
}

fn slack_bounds(sense: RowSense) -> (f64, f64) {
    match sense {
        RowSense::Leq => (0.0, f64::INFINITY),
        RowSense::Geq => (f64::NEG_INFINITY, 0.0),
        RowSense::Eq => (0.0, 0.0),
    }
}
