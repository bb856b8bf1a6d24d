//! Compiler from ECNF constraint theories to mixed-integer programs.
//!
//! The pipeline is [`ecnf::normalize_theory`] → [`linearize::translate_theory`]
//! → [`io::write_mps`] or [`solver::branch_and_bound`]. The [`oracle`]
//! module gives an independent brute-force semantics and [`verify`] checks a
//! translation against it.

pub mod ecnf;
pub mod io;
pub mod linearize;
pub mod mip;
pub mod oracle;
pub mod par;
pub mod solver;
pub mod verify;
