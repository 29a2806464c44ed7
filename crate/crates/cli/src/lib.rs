//! Command-line front end: theory-file parsing, command dispatch and
//! report rendering for the `lawvere` binary.

pub mod parse;
pub mod run;

pub use parse::{parse_sub, parse_term, parse_theory, ParseError};
pub use run::{run_args, Outcome};
