//! Exact desk-scale MIP solving: LP relaxations by bounded primal simplex,
//! integrality by best-bound branch and bound.

mod bnb;
mod feasibility;
mod simplex;

pub use bnb::{branch_and_bound, Limits, PruneRecord, SolveResult, SolveStatus, INTEGRALITY_TOL};
pub use feasibility::{check_feasible, FeasibilityViolation, Tolerances, ViolationKind};
pub use simplex::{simplex_solve, LpResult, LpStatus, SimplexError, FEASIBILITY_TOL, PIVOT_TOL, REDUCED_COST_TOL};
