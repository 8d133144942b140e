//! Parametric timed automata: data model, text format and structural
//! classification.

mod parse;
mod write;

#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::constraints::{Context, Inequality, Polyhedron, Rational, VarNames};

pub use parse::parse;
pub use write::render;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: undeclared identifier `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: non-linear expression")]
    NonLinear { line: usize, col: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type LocId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub id: LocId,
    pub name: String,
    pub invariant: Polyhedron,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub source: LocId,
    pub target: LocId,
    pub action: usize,
    pub guard: Polyhedron,
    /// Sorted clock indices.
    pub resets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtaModel {
    pub name: String,
    pub allow_diagonals: bool,
    pub actions: Vec<String>,
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub locations: Vec<Location>,
    pub initial: LocId,
    pub edges: Vec<Edge>,
}

impl PtaModel {
    pub fn context(&self) -> Context {
        Context::new(self.clocks.len(), self.params.len())
    }

    pub fn names(&self) -> VarNames {
        VarNames::new(&self.clocks, &self.params)
    }

    pub fn param_names(&self) -> VarNames {
        VarNames::new(&[], &self.params)
    }

    pub fn location_by_name(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn clock_index(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|c| c == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|c| c == name)
    }

    pub fn outgoing(&self, loc: LocId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == loc)
    }

    /// Every guard and invariant atom, in declaration order.
    pub fn atoms(&self) -> impl Iterator<Item = &Inequality> {
        self.locations
            .iter()
            .flat_map(|l| l.invariant.inequalities())
            .chain(self.edges.iter().flat_map(|e| e.guard.inequalities()))
    }

    /// Checks the structural invariants a well-formed model satisfies.
    pub fn validate(&self) -> Result<(), ModelError> {
        let ctx = self.context();
        if self.initial >= self.locations.len() {
            return Err(ModelError::Invalid("initial location out of range".into()));
        }
        for (i, l) in self.locations.iter().enumerate() {
            if l.id != i {
                return Err(ModelError::Invalid(format!(
                    "location `{}` has id {} at position {i}",
                    l.name, l.id
                )));
            }
            if l.invariant.context() != ctx {
                return Err(ModelError::Invalid(format!(
                    "invariant of `{}` uses a foreign context",
                    l.name
                )));
            }
        }
        let mut names = BTreeSet::new();
        for l in &self.locations {
            if !names.insert(&l.name) {
                return Err(ModelError::Invalid(format!(
                    "duplicate location `{}`",
                    l.name
                )));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return Err(ModelError::Invalid(format!(
                    "edge at position {i} has id {}",
                    e.id
                )));
            }
            if e.source >= self.locations.len() || e.target >= self.locations.len() {
                return Err(ModelError::Invalid(format!(
                    "edge {i} has an invalid endpoint"
                )));
            }
            if e.action >= self.actions.len() {
                return Err(ModelError::Invalid(format!(
                    "edge {i} has an invalid action"
                )));
            }
            if e.resets.iter().any(|&r| r >= self.clocks.len()) {
                return Err(ModelError::Invalid(format!(
                    "edge {i} resets an undeclared clock"
                )));
            }
            if e.guard.context() != ctx {
                return Err(ModelError::Invalid(format!(
                    "guard of edge {i} uses a foreign context"
                )));
            }
        }
        for a in self.atoms() {
            check_atom_shape(a, &ctx, self.allow_diagonals).map_err(ModelError::Invalid)?;
        }
        Ok(())
    }

    /// Substitutes a parameter valuation, producing a parameter-free model.
    pub fn valuate(&self, v: &[Rational]) -> Result<PtaModel, ModelError> {
        if v.len() != self.params.len() {
            return Err(ModelError::Invalid(format!(
                "valuation assigns {} values but the model has {} parameters",
                v.len(),
                self.params.len()
            )));
        }
        if let Some(i) = v.iter().position(|x| x.is_negative()) {
            return Err(ModelError::Invalid(format!(
                "negative value for parameter `{}`",
                self.params[i]
            )));
        }
        let src = self.context();
        let dst = Context::new(self.clocks.len(), 0);
        let subst = |p: &Polyhedron| -> Polyhedron {
            let atoms = p
                .inequalities()
                .iter()
                .map(|a| substitute_params(a, &src, v))
                .collect();
            Polyhedron::from_inequalities(dst, atoms).expect("dimension preserved")
        };
        Ok(PtaModel {
            name: self.name.clone(),
            allow_diagonals: self.allow_diagonals,
            actions: self.actions.clone(),
            clocks: self.clocks.clone(),
            params: Vec::new(),
            locations: self
                .locations
                .iter()
                .map(|l| Location {
                    id: l.id,
                    name: l.name.clone(),
                    invariant: subst(&l.invariant),
                })
                .collect(),
            initial: self.initial,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    guard: subst(&e.guard),
                    ..e.clone()
                })
                .collect(),
        })
    }

    pub fn classify(&self) -> ModelClass {
        classify(self)
    }
}

/// Replaces parameters by their values, clearing denominators.
fn substitute_params(a: &Inequality, ctx: &Context, v: &[Rational]) -> Inequality {
    let c = ctx.clocks;
    let mut constant = Rational::from_integer(a.constant().clone());
    for (i, val) in v.iter().enumerate() {
        let coeff = &a.coefficients()[c + i];
        if !coeff.is_zero() {
            constant += val * Rational::from_integer(coeff.clone());
        }
    }
    let coeffs: Vec<Rational> = a.coefficients()[..c]
        .iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect();
    let mut l = constant.denom().clone();
    for x in &coeffs {
        l = num_integer::Integer::lcm(&l, x.denom());
    }
    let scale = Rational::from_integer(l);
    Inequality::new(
        coeffs.iter().map(|x| (x * &scale).to_integer()).collect(),
        (constant * scale).to_integer(),
        a.relation(),
    )
}

/// At most one clock per atom, or a difference of two clocks when
/// diagonals are allowed.
pub(crate) fn check_atom_shape(
    a: &Inequality,
    ctx: &Context,
    allow_diagonals: bool,
) -> Result<(), String> {
    let clocks: Vec<&BigInt> = a.coefficients()[..ctx.clocks]
        .iter()
        .filter(|c| !c.is_zero())
        .collect();
    match clocks.len() {
        0 | 1 => Ok(()),
        2 if allow_diagonals => {
            if clocks[0] == &-clocks[1] {
                Ok(())
            } else {
                Err("a two-clock atom must compare a clock difference".into())
            }
        }
        2 => Err("diagonal constraint requires `allow-diagonals`".into()),
        _ => Err("an atom may mention at most two clocks".into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fragment {
    /// Every atom is `x ⋈ c` or `x ⋈ p + c`.
    Atomic,
    /// Clock atoms against integer linear parameter terms.
    Linear,
    /// Some atom compares a clock difference.
    Diagonal,
}

/// Bound side of every parameter that is compared with a clock.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LuStatus {
    pub lower: Vec<String>,
    pub upper: Vec<String>,
    pub both: Vec<String>,
}

impl LuStatus {
    pub fn is_lu(&self) -> bool {
        self.both.is_empty()
    }

    pub fn is_l(&self) -> bool {
        self.is_lu() && self.upper.is_empty()
    }

    pub fn is_u(&self) -> bool {
        self.is_lu() && self.lower.is_empty()
    }

    pub fn label(&self) -> &'static str {
        if !self.is_lu() {
            "neither"
        } else if self.lower.is_empty() && !self.upper.is_empty() {
            "U"
        } else if self.upper.is_empty() && !self.lower.is_empty() {
            "L"
        } else {
            "L/U"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelClass {
    pub deterministic: bool,
    pub lu: LuStatus,
    pub clock_count: usize,
    pub parametric_clocks: Vec<String>,
    pub parameter_count: usize,
    pub has_diagonal_guards: bool,
    pub fragment: Fragment,
}

impl ModelClass {
    pub fn one_clock(&self) -> bool {
        self.clock_count == 1
    }
}

fn classify(m: &PtaModel) -> ModelClass {
    let ctx = m.context();
    let c = ctx.clocks;
    let mut seen = BTreeSet::new();
    let mut deterministic = true;
    for e in &m.edges {
        if !seen.insert((e.source, e.action)) {
            deterministic = false;
        }
    }

    let mut side: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
    let mut parametric = BTreeSet::new();
    let mut diagonal = false;
    let mut atomic = true;
    for a in m.atoms() {
        let coeffs = a.coefficients();
        let clock_terms: Vec<usize> = (0..c).filter(|&i| !coeffs[i].is_zero()).collect();
        let param_terms: Vec<usize> = (0..ctx.params)
            .filter(|&i| !coeffs[c + i].is_zero())
            .collect();
        if clock_terms.len() >= 2 {
            diagonal = true;
        }
        let shape_atomic = clock_terms.len() == 1
            && coeffs[clock_terms[0]].abs() == BigInt::from(1)
            && (param_terms.is_empty()
                || (param_terms.len() == 1
                    && coeffs[c + param_terms[0]] == -&coeffs[clock_terms[0]]));
        if !shape_atomic {
            atomic = false;
        }
        if clock_terms.is_empty() {
            continue;
        }
        for &p in &param_terms {
            for &x in &clock_terms {
                parametric.insert(x);
            }
            let entry = side.entry(p).or_insert((false, false));
            // raising p raises the term: the atom gets harder (lower bound)
            match a.relation() {
                crate::constraints::Relation::Eq => {
                    entry.0 = true;
                    entry.1 = true;
                }
                _ => {
                    if coeffs[c + p].is_positive() {
                        entry.0 = true;
                    } else {
                        entry.1 = true;
                    }
                }
            }
        }
    }
    let mut lu = LuStatus {
        lower: Vec::new(),
        upper: Vec::new(),
        both: Vec::new(),
    };
    for (p, (lo, up)) in side {
        let name = m.params[p].clone();
        match (lo, up) {
            (true, true) => lu.both.push(name),
            (true, false) => lu.lower.push(name),
            (false, true) => lu.upper.push(name),
            (false, false) => {}
        }
    }
    ModelClass {
        deterministic,
        lu,
        clock_count: c,
        parametric_clocks: parametric
            .into_iter()
            .map(|i| m.clocks[i].clone())
            .collect(),
        parameter_count: ctx.params,
        has_diagonal_guards: diagonal,
        fragment: if diagonal {
            Fragment::Diagonal
        } else if atomic {
            Fragment::Atomic
        } else {
            Fragment::Linear
        },
    }
}
