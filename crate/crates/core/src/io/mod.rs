//! Text formats: the ECNF theory grammar, free-format MPS and solution files.

mod ecnf;
mod mps;
mod solution;

pub use ecnf::{parse_ecnf_text, print_ecnf_text, ParseError};
pub use mps::{format_number, mps_column_names, read_mps, write_mps, MpsError};
pub use solution::{status_name, write_solution, write_solution_with};
