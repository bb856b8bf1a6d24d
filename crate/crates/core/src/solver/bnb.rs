use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::simplex::{simplex_solve, LpStatus, SimplexError};
use crate::mip::MipModel;

pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node or time budget exhausted; the incumbent, if any, is kept.
    Limit,
}

#[derive(Clone, Debug)]
pub struct Limits {
    pub max_nodes: usize,
    pub time: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 1_000_000, time: Some(Duration::from_secs(60)) }
    }
}

/// A node that was discarded because its bound could not beat the incumbent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PruneRecord {
    pub node: usize,
    pub bound: f64,
    pub incumbent: f64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub point: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Objective of the root LP relaxation, when it was solved to optimality.
    pub root_bound: Option<f64>,
    pub pruned: Vec<PruneRecord>,
}

#[derive(Clone, Debug)]
struct Node {
    id: usize,
    depth: usize,
    bound: f64,
    bounds: Vec<(f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap order: smallest bound first, then deepest, then newest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.id.cmp(&other.id))
    }
}

/// Best-bound branch and bound over the integral columns of `model`.
///
/// Branches on the integral column whose LP value has fractional part
/// closest to 0.5 (lowest index on ties); a node is pruned when its parent
/// bound is no better than the incumbent.
pub fn branch_and_bound(model: &MipModel, limits: &Limits) -> Result<SolveResult, SimplexError> {
    let start = Instant::now();
    let mut result = SolveResult {
        status: SolveStatus::Infeasible,
        point: None,
        objective: None,
        nodes: 0,
        lp_iterations: 0,
        root_bound: None,
        pruned: Vec::new(),
    };
    if model.is_trivially_infeasible() {
        return Ok(result);
    }

    let root_bounds: Vec<(f64, f64)> = model
        .columns
        .iter()
        .map(|c| {
            if c.kind.is_integral() {
                (c.lower.ceil(), c.upper.floor())
            } else {
                (c.lower, c.upper)
            }
        })
        .collect();
    let mut open = BinaryHeap::new();
    open.push(Node { id: 0, depth: 0, bound: f64::NEG_INFINITY, bounds: root_bounds });
    let mut next_id = 1;
    let mut incumbent = f64::INFINITY;

    while let Some(node) = open.pop() {
        if node.bound >= incumbent - 1e-9 {
            result.pruned.push(PruneRecord { node: node.id, bound: node.bound, incumbent });
            continue;
        }
        let out_of_time = limits.time.is_some_and(|t| start.elapsed() >= t);
        if result.nodes >= limits.max_nodes || out_of_time {
            result.status = SolveStatus::Limit;
            return Ok(result);
        }
        result.nodes += 1;
        let lp = simplex_solve(model, Some(&node.bounds))?;
        result.lp_iterations += lp.iterations;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                result.status = SolveStatus::Unbounded;
                result.point = None;
                result.objective = None;
                return Ok(result);
            }
            LpStatus::Optimal => {}
        }
        if node.id == 0 {
            result.root_bound = Some(lp.objective);
        }
        if lp.objective >= incumbent - 1e-9 {
            result.pruned.push(PruneRecord { node: node.id, bound: lp.objective, incumbent });
            continue;
        }

        match branching_column(model, &lp.point) {
            None => {
                let mut point = lp.point;
                for (j, c) in model.columns.iter().enumerate() {
                    if c.kind.is_integral() {
                        point[j] = point[j].round();
                    }
                }
                incumbent = model.objective_value(&point);
                log::debug!("node {}: incumbent {incumbent}", node.id);
                result.objective = Some(incumbent);
                result.point = Some(point);
            }
            Some(j) => {
                let v = lp.point[j];
                let mut down = node.bounds.clone();
                down[j].1 = v.floor();
                let mut up = node.bounds;
                up[j].0 = v.ceil();
                for bounds in [down, up] {
                    open.push(Node { id: next_id, depth: node.depth + 1, bound: lp.objective, bounds });
                    next_id += 1;
                }
            }
        }
    }

    result.status = if result.point.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
    Ok(result)
}

fn branching_column(model: &MipModel, point: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, c) in model.columns.iter().enumerate() {
        if !c.kind.is_integral() {
            continue;
        }
        let frac = point[j] - point[j].floor();
        if frac <= INTEGRALITY_TOL || frac >= 1.0 - INTEGRALITY_TOL {
            continue;
        }
        let dist = (frac - 0.5).abs();
        if best.is_none_or(|(_, d)| dist < d - 1e-12) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{Column, ColumnKind, ColumnOrigin, RowOrigin, RowSense};

    fn int_model() -> MipModel {
        let mut m = MipModel::new("m");
        for name in ["x", "y"] {
            m.add_column(Column {
                name: name.into(),
                kind: ColumnKind::Integer,
                lower: 0.0,
                upper: 1.0,
                origin: ColumnOrigin::External,
            });
        }
        m.push_row(vec![(1.0, 0), (1.0, 1)], RowSense::Leq, 1.5, RowOrigin::external(), None);
        m.objective = vec![(-1.0, 0), (-1.0, 1)];
        m
    }

    #[test]
    fn small_integer_program() {
        let r = branch_and_bound(&int_model(), &Limits::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(-1.0));
        assert!((r.root_bound.unwrap() + 1.5).abs() < 1e-9);
    }

    #[test]
    fn node_limit_reports_limit() {
        let r = branch_and_bound(&int_model(), &Limits { max_nodes: 1, time: None }).unwrap();
        assert_eq!(r.status, SolveStatus::Limit);
        assert_eq!(r.nodes, 1);
    }

    #[test]
    fn empty_row_is_infeasible() {
        let mut m = int_model();
        m.push_row(vec![], RowSense::Geq, 1.0, RowOrigin::external(), None);
        let r = branch_and_bound(&m, &Limits::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.nodes, 0);
    }

    #[test]
    fn branching_prefers_half() {
        let m = int_model();
        assert_eq!(branching_column(&m, &[0.9, 0.5]), Some(1));
        assert_eq!(branching_column(&m, &[0.3, 0.7]), Some(0));
        assert_eq!(branching_column(&m, &[1.0, 0.0]), None);
    }
}
