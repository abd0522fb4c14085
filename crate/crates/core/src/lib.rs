//! Inferentialist logic of information: derivability in inferonic bases,
//! base-extension support over a finite universe, an NJ prover with the
//! inferon axiom, and information flow along inferomorphisms and sites.

pub mod derive;
pub mod error;
pub mod flow;
pub mod prover;
pub mod scenarios;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
