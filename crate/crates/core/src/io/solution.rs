use std::fmt::Write as _;

use super::mps::format_number;
use crate::mip::{Column, MipModel};
use crate::solver::{SolveResult, SolveStatus};

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::Limit => "limit",
    }
}

/// `status`, `objective` and one `name value` line per original column.
/// Auxiliary columns are omitted; without an incumbent only the status is
/// written.
pub fn write_solution(model: &MipModel, result: &SolveResult) -> String {
    write_solution_with(model, result, |_| true)
}

/// Like [`write_solution`], listing only the original columns accepted by
/// `keep`.
pub fn write_solution_with(model: &MipModel, result: &SolveResult, keep: impl Fn(&Column) -> bool) -> String {
    let mut out = format!("status {}\n", status_name(result.status));
    if let (Some(point), Some(obj)) = (&result.point, result.objective) {
        let _ = writeln!(out, "objective {}", format_number(obj));
        for (j, c) in model.original_columns().filter(|(_, c)| keep(c)) {
            let _ = writeln!(out, "{} {}", c.name, format_number(point[j]));
        }
    }
    out
}
