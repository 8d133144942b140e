//! Exact linear constraints over clocks and parameters.

mod disjunctive;
mod fm;
mod linear;
mod polyhedron;
mod render;

#[cfg(test)]
mod tests;

pub use disjunctive::DisjunctiveConstraint;
pub(crate) use linear::from_rational_row;
pub use linear::{
    int, rat, CompOp, Context, Inequality, LinearTerm, Rational, Relation, VarKind, Variable,
};
pub use polyhedron::Polyhedron;
pub use render::{
    disjunctive_json, format_rational, inequality_json, polyhedron_json, rational_json,
    render_disjunctive, render_inequality, render_polyhedron, VarNames,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("valuation does not assign {0:?}")]
    MissingVariable(Variable),
    #[error("constraints belong to different variable contexts")]
    ContextMismatch,
    #[error("parameter constraint still mentions a clock")]
    ClockInParameterConstraint,
    #[error("point does not satisfy the constraint")]
    PointOutside,
}
