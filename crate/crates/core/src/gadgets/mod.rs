//! Two-counter machine encodings into parametric timed automata, the
//! one-location transform, and their end-to-end validation.

mod compile;
mod machine;
mod onelocation;
mod validate;

#[cfg(test)]
mod tests;

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{parse, ModelError, PtaModel};

pub use compile::{compile, EncodingKind};
pub use machine::{Counter, CounterMachine, Instruction, MachineRun};
pub use onelocation::one_location_transform;
pub use validate::{validate_encoding, with_time_bound, ValidationOptions, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("machine line {line}: {msg}")]
    Machine { line: usize, msg: String },
    #[error("zero-delay bound must be at least 1")]
    ZeroDelayBound,
    #[error("machine does not match the ground truth: {0}")]
    GroundTruth(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("generated model is invalid: {0}")]
    Generated(#[from] ModelError),
}

/// `(source, target, action, guard atoms, resets)`
type EdgeSpec = (String, String, String, Vec<String>, Vec<String>);

/// Accumulates a model in the text format; parsing the text at the end
/// runs the ordinary validation on generated models.
#[derive(Clone, Debug, Default)]
pub(crate) struct Builder {
    name: String,
    diagonals: bool,
    clocks: Vec<String>,
    params: Vec<String>,
    actions: Vec<String>,
    locations: Vec<(String, Option<String>)>,
    edges: Vec<EdgeSpec>,
}

impl Builder {
    pub(crate) fn new(name: &str, clocks: &[&str], params: &[&str], actions: &[&str]) -> Self {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        Builder {
            name: name.into(),
            clocks: own(clocks),
            params: own(params),
            actions: own(actions),
            ..Default::default()
        }
    }

    pub(crate) fn owned(
        name: &str,
        clocks: Vec<String>,
        params: Vec<String>,
        actions: Vec<String>,
    ) -> Self {
        Builder {
            name: name.into(),
            clocks,
            params,
            actions,
            ..Default::default()
        }
    }

    pub(crate) fn diagonals(&mut self) {
        self.diagonals = true;
    }

    /// The first location added is initial.
    pub(crate) fn location(&mut self, name: &str, invariant: Option<&str>) {
        self.locations
            .push((name.into(), invariant.map(str::to_string)));
    }

    pub(crate) fn edge(
        &mut self,
        from: &str,
        to: &str,
        action: &str,
        guard: &[String],
        resets: &[&str],
    ) {
        self.edges.push((
            from.into(),
            to.into(),
            action.into(),
            guard.to_vec(),
            resets.iter().map(|s| s.to_string()).collect(),
        ));
    }

    pub(crate) fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pta {};", self.name);
        if self.diagonals {
            out.push_str("allow-diagonals;\n");
        }
        for (kw, list) in [
            ("clocks", &self.clocks),
            ("parameters", &self.params),
            ("actions", &self.actions),
        ] {
            if !list.is_empty() {
                let _ = writeln!(out, "{kw} {};", list.join(", "));
            }
        }
        out.push('\n');
        for (i, (name, inv)) in self.locations.iter().enumerate() {
            let mut body = String::new();
            if i == 0 {
                body.push_str(" initial;");
            }
            if let Some(inv) = inv {
                let _ = write!(body, " invariant {inv};");
            }
            let _ = writeln!(out, "location {name} {{{body} }}");
        }
        out.push('\n');
        for (from, to, action, guard, resets) in &self.edges {
            let mut body = format!(" sync {action};");
            if !guard.is_empty() {
                let _ = write!(body, " guard {};", guard.join(" & "));
            }
            if !resets.is_empty() {
                let _ = write!(body, " reset {};", resets.join(", "));
            }
            let _ = writeln!(out, "edge {from} -> {to} {{{body} }}");
        }
        out
    }

    pub(crate) fn build(&self) -> Result<PtaModel, GadgetError> {
        let m = parse(&self.text())?;
        m.validate()?;
        Ok(m)
    }
}
