//! Parametric symbolic semantics: symbolic states over clocks and
//! parameters, the successor operator and breadth-first exploration of the
//! parametric zone graph.

mod export;
mod shape;


use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::constraints::{Inequality, Polyhedron, Relation, Variable};
use crate::model::{EdgeId, LocId, PtaModel};

pub use export::{zone_graph_dot, zone_graph_json};
pub use shape::{in_one_clock_shape, linear_terms, one_clock_state_bound};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("initial symbolic state is empty")]
    EmptyInitial,
    #[error("parameter projection grew along edge {edge} from state {state}")]
    Monotonicity { state: usize, edge: EdgeId },
}

/// A location with a canonical, nonempty constraint over clocks and parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicState {
    pub location: LocId,
    pub constraint: Polyhedron,
}

impl SymbolicState {
    /// Parameter projection, in the parameter-only context.
    pub fn parameter_constraint(&self) -> Polyhedron {
        self.constraint
            .project_params()
            .restrict_to_params()
            .expect("projection leaves no clock")
    }
}

/// `(X = 0)` intersected with the initial invariant, let time elapse, then
/// the invariant again.
pub fn initial_state(m: &PtaModel) -> Result<SymbolicState, SymbolicError> {
    let ctx = m.context();
    let zeros = (0..m.clocks.len())
        .map(|i| {
            let mut c = vec![BigInt::zero(); ctx.dim()];
            c[i] = BigInt::from(1);
            Inequality::new(c, BigInt::zero(), Relation::Eq)
        })
        .collect();
    let inv = &m.locations[m.initial].invariant;
    let z = Polyhedron::from_inequalities(ctx, zeros)
        .expect("dimension matches")
        .intersect(inv)
        .time_elapse()
        .intersect(inv);
    if z.is_empty() {
        return Err(SymbolicError::EmptyInitial);
    }
    Ok(SymbolicState {
        location: m.initial,
        constraint: z,
    })
}

/// Successor through one edge; `None` when the result is empty.
///
/// The target invariant is applied right after the reset as well as after
/// the delay, so a transition into a location whose invariant is already
/// violated is blocked.
pub fn succ(m: &PtaModel, s: &SymbolicState, edge: EdgeId) -> Option<SymbolicState> {
    let e = &m.edges[edge];
    debug_assert_eq!(e.source, s.location, "edge leaves another location");
    let g = s.constraint.intersect(&e.guard);
    if g.is_empty() {
        return None;
    }
    let resets: Vec<Variable> = e.resets.iter().map(|&r| Variable::clock(r)).collect();
    let inv = &m.locations[e.target].invariant;
    let z = g.reset(&resets).intersect(inv);
    if z.is_empty() {
        return None;
    }
    let z = z.time_elapse().intersect(inv);
    (!z.is_empty()).then_some(SymbolicState {
        location: e.target,
        constraint: z,
    })
}

/// Exploration limits; `None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub depth: Option<usize>,
    pub state_cap: Option<usize>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            depth: Some(256),
            state_cap: Some(100_000),
        }
    }
}

impl ExploreOptions {
    pub fn unbounded() -> Self {
        ExploreOptions {
            depth: None,
            state_cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    Depth,
    States,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTransition {
    pub source: usize,
    pub edge: EdgeId,
    pub target: usize,
}

/// Reachable symbolic states, deduplicated on `(location, constraint)`.
#[derive(Clone, Debug)]
pub struct ZoneGraph {
    pub states: Vec<SymbolicState>,
    /// BFS layer of each state.
    pub depth: Vec<usize>,
    pub transitions: Vec<SymTransition>,
    /// States recorded but not expanded by the exploration filter.
    pub pruned: Vec<bool>,
    /// Set when a cap cut the exploration short.
    pub truncation: Option<Truncation>,
    pub location_names: Vec<String>,
    pub names: crate::constraints::VarNames,
}

impl ZoneGraph {
    pub fn initial(&self) -> usize {
        0
    }

    /// Whether the fixpoint was reached within the caps.
    pub fn complete(&self) -> bool {
        self.truncation.is_none()
    }

    pub fn states_in(&self, location: &str) -> impl Iterator<Item = usize> + '_ {
        let loc = self.location_names.iter().position(|l| l == location);
        (0..self.states.len()).filter(move |&s| Some(self.states[s].location) == loc)
    }

    pub fn layers(&self) -> usize {
        self.depth.iter().max().map_or(0, |d| d + 1)
    }
}

/// Breadth-first exploration in declaration order.
pub fn explore(m: &PtaModel, opts: ExploreOptions) -> Result<ZoneGraph, SymbolicError> {
    explore_filtered(m, opts, |_, _| true)
}

/// Exploration where `expand(id, state)` decides, when a state is first
/// met, whether its successors are computed. It is called exactly once per
/// state, in the deterministic insertion order.
pub fn explore_filtered(
    m: &PtaModel,
    opts: ExploreOptions,
    mut expand: impl FnMut(usize, &SymbolicState) -> bool,
) -> Result<ZoneGraph, SymbolicError> {
    let s0 = initial_state(m)?;
    let mut g = ZoneGraph {
        states: Vec::new(),
        depth: Vec::new(),
        transitions: Vec::new(),
        pruned: Vec::new(),
        truncation: None,
        location_names: m.locations.iter().map(|l| l.name.clone()).collect(),
        names: m.names(),
    };
    // the only interior mutability is the emptiness cache, which hashing ignores
    #[allow(clippy::mutable_key_type)]
    let mut index: HashMap<SymbolicState, usize> = HashMap::new();
    let mut frontier = Vec::new();
    let keep = expand(0, &s0);
    index.insert(s0.clone(), 0);
    g.states.push(s0);
    g.depth.push(0);
    g.pruned.push(!keep);
    if keep {
        frontier.push(0);
    }
    let mut layer = 0usize;
    while !frontier.is_empty() {
        let at_depth_cap = opts.depth.is_some_and(|d| layer >= d);
        let states = &g.states;
        // pure per-state work; order is restored by the indexed collect
        let expanded: Vec<Result<Vec<(EdgeId, SymbolicState)>, SymbolicError>> = frontier
            .par_iter()
            .map(|&s| {
                let st = &states[s];
                let before = st.constraint.project_params();
                let mut out = Vec::new();
                for e in m.outgoing(st.location) {
                    if let Some(n) = succ(m, st, e.id) {
                        if !before.includes(&n.constraint.project_params()) {
                            return Err(SymbolicError::Monotonicity {
                                state: s,
                                edge: e.id,
                            });
                        }
                        out.push((e.id, n));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut next = Vec::new();
        'layer: for (&s, succs) in frontier.iter().zip(expanded) {
            for (edge, n) in succs? {
                let target = match index.get(&n) {
                    Some(&t) => t,
                    None => {
                        if at_depth_cap {
                            g.truncation = Some(Truncation::Depth);
                            continue;
                        }
                        if opts.state_cap.is_some_and(|c| g.states.len() >= c) {
                            g.truncation = Some(Truncation::States);
                            break 'layer;
                        }
                        let t = g.states.len();
                        let keep = expand(t, &n);
                        index.insert(n.clone(), t);
                        g.states.push(n);
                        g.depth.push(layer + 1);
                        g.pruned.push(!keep);
                        if keep {
                            next.push(t);
                        }
                        t
                    }
                };
                g.transitions.push(SymTransition {
                    source: s,
                    edge,
                    target,
                });
            }
        }
        if g.truncation.is_some() {
            break;
        }
        frontier = next;
        layer += 1;
    }
    Ok(g)
}
