//! Labelled transition systems derived from reactive contexts for the
//! λ-calculus and combinatory logic, and a bounded weak bisimulation checker.

pub mod bisim;
pub mod error;
pub mod ipo;
pub mod props;
pub mod reduction;
pub mod terms;
pub mod translate;
pub mod unify;

pub use error::{Error, Result};
