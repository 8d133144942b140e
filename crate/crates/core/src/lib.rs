//! Parametric timed automata: exact constraint algebra, symbolic semantics,
//! trace-preservation synthesis and the decision procedures for restricted
//! subclasses.

pub mod concrete;
pub mod constraints;
pub mod gadgets;
pub mod model;
pub mod symbolic;
pub mod synthesis;

#[cfg(test)]
mod testutil;
