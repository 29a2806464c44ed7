//! Finite semantic instances: clones, interpretations, telescopes.

pub mod clone;
pub mod interp;
pub mod telescope;

pub use clone::{clone, CloneMor, FiniteClone};
pub use interp::{check_model, enumerate_models, eval_term, Interpretation, OpTable};
pub use telescope::{const_family, telescope_csystem, TeleMor, Telescope, TelescopeCSystem, TelescopeSpec};
