//! Finitely presented Lawvere theories, l-bijective C-systems, and the two
//! constructions translating between them.
//!
//! The crate is organised around three interfaces: [`Category`] (objects,
//! morphisms, diagrammatic composition), [`Lawvere`] (a structure map from
//! finite sets with push-out witnesses) and [`CSystem`] (length, `ft`,
//! display maps, canonical pullbacks and sections). Instances are the
//! syntactic category of a presented theory, the full clone on a finite
//! carrier, and the category of finite telescopes.

pub mod bridge;
pub mod category;
pub mod csystem;
pub mod error;
pub mod models;
pub mod report;
pub mod subsystem;
pub mod term;
pub mod term_model;
pub mod theory;

pub use category::{Category, MorOf, ObOf};
pub use csystem::{CSystem, LBijective};
pub use error::{Error, Result};
pub use report::{CheckReport, ProbeSpec, Status};
pub use theory::{FinFun, Lawvere};
pub use bridge::{cl, lc, ClTheory, CsHomomorphism, LcSystem, OpAssignment};
pub use subsystem::{generate_subsystem, Subsystem, Tower};
