//! Semantics of parameter-free automata: zone graphs, trace automata and
//! the trace/language comparisons used as oracles.

mod compare;
mod dbm;
mod export;
mod sim;

#[cfg(test)]
mod tests;

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use compare::{
    label_sets_contained, model_language_included, trace_sets_equal, untimed_language_included,
    Inclusion, LanguageSemantics, TraceComparison,
};
pub use dbm::ClockZone;
pub use export::{trace_automaton_dot, trace_automaton_json};
pub use sim::{DigitalSim, Step, TimedRun};

use crate::constraints::{Inequality, Rational};
use crate::model::{LocId, PtaModel};
use dbm::{bound, DiffBound};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConcreteError {
    #[error("model still has {0} parameter(s); valuate it first")]
    Parametric(usize),
    #[error("trace automaton is truncated; comparison refused")]
    Truncated,
    #[error("constant too large for the zone representation")]
    Overflow,
}

/// Exploration limits for zone-graph construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub depth: Option<usize>,
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            depth: None,
            state_cap: 100_000,
        }
    }
}

/// A guard or invariant lowered to difference bounds; `None` if some atom
/// is unsatisfiable on its own.
type Lowered = Option<Vec<DiffBound>>;

/// A parameter-free automaton with every constant rescaled to an integer.
#[derive(Clone, Debug)]
pub(crate) struct TimedSystem {
    pub clocks: usize,
    /// Clock values here are `scale` times the model's.
    pub scale: i64,
    pub invariants: Vec<Lowered>,
    pub edges: Vec<LoweredEdge>,
    pub max_const: Vec<i64>,
    pub diagonal: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct LoweredEdge {
    pub source: LocId,
    pub target: LocId,
    pub action: usize,
    pub guard: Lowered,
    pub resets: Vec<usize>,
}

/// `coeff·(x_p - x_q) + k ⋈ 0` split into its clock pair and bound value.
fn atom_parts(a: &Inequality, clocks: usize) -> Option<(usize, usize, Rational)> {
    let nz: Vec<usize> = (0..clocks)
        .filter(|&i| !a.coefficients()[i].is_zero())
        .collect();
    let k = a.constant();
    match nz.as_slice() {
        [] => None,
        [i] => {
            let c = &a.coefficients()[*i];
            let val = Rational::new(-k, c.abs());
            if c.is_positive() {
                Some((i + 1, 0, val))
            } else {
                Some((0, i + 1, val))
            }
        }
        [i, j] => {
            let (ci, cj) = (&a.coefficients()[*i], &a.coefficients()[*j]);
            assert!(ci == &-cj, "two-clock atom must be a difference");
            let val = Rational::new(-k, ci.abs());
            if ci.is_positive() {
                Some((i + 1, j + 1, val))
            } else {
                Some((j + 1, i + 1, val))
            }
        }
        _ => panic!("atom over more than two clocks"),
    }
}

impl TimedSystem {
    pub(crate) fn new(m: &PtaModel) -> Result<Self, ConcreteError> {
        if !m.params.is_empty() {
            return Err(ConcreteError::Parametric(m.params.len()));
        }
        let n = m.clocks.len();
        let mut denom = BigInt::from(1);
        for a in m.atoms() {
            if let Some((_, _, v)) = atom_parts(a, n) {
                denom = denom.lcm(v.denom());
            }
        }
        let scale = denom.to_i64().ok_or(ConcreteError::Overflow)?;
        let mut max_const = vec![0i64; n];
        let mut diagonal = false;
        let mut lower = |atoms: &[Inequality]| -> Result<Lowered, ConcreteError> {
            let mut out = Vec::new();
            for a in atoms {
                let Some((p, q, v)) = atom_parts(a, n) else {
                    if a.trivially_true() == Some(false) {
                        return Ok(None);
                    }
                    continue;
                };
                let scaled = v * Rational::from_integer(BigInt::from(scale));
                let c = scaled
                    .to_integer()
                    .to_i64()
                    .ok_or(ConcreteError::Overflow)?;
                if c.abs() > i64::MAX / 8 {
                    return Err(ConcreteError::Overflow);
                }
                if p != 0 && q != 0 {
                    diagonal = true;
                } else {
                    let clock = p.max(q) - 1;
                    max_const[clock] = max_const[clock].max(c.abs());
                }
                match a.relation() {
                    crate::constraints::Relation::Lt => out.push(DiffBound {
                        p,
                        q,
                        b: bound(c, true),
                    }),
                    crate::constraints::Relation::Le => out.push(DiffBound {
                        p,
                        q,
                        b: bound(c, false),
                    }),
                    crate::constraints::Relation::Eq => {
                        out.push(DiffBound {
                            p,
                            q,
                            b: bound(c, false),
                        });
                        out.push(DiffBound {
                            p: q,
                            q: p,
                            b: bound(-c, false),
                        });
                    }
                }
            }
            Ok(Some(out))
        };
        let invariants = m
            .locations
            .iter()
            .map(|l| lower(l.invariant.inequalities()))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = m
            .edges
            .iter()
            .map(|e| {
                Ok(LoweredEdge {
                    source: e.source,
                    target: e.target,
                    action: e.action,
                    guard: lower(e.guard.inequalities())?,
                    resets: e.resets.clone(),
                })
            })
            .collect::<Result<Vec<_>, ConcreteError>>()?;
        Ok(TimedSystem {
            clocks: n,
            scale,
            invariants,
            edges,
            max_const,
            diagonal,
        })
    }

    fn normalize(&self, z: ClockZone) -> ClockZone {
        if self.diagonal {
            z
        } else {
            z.extrapolate(&self.max_const)
        }
    }

    pub(crate) fn initial_zone(&self, loc: LocId) -> Option<ClockZone> {
        let inv = self.invariants[loc].as_ref()?;
        let z = ClockZone::zero(self.clocks).constrain(inv)?;
        let z = z.up().constrain(inv)?;
        Some(self.normalize(z))
    }

    pub(crate) fn successor(&self, zone: &ClockZone, edge: &LoweredEdge) -> Option<ClockZone> {
        let g = edge.guard.as_ref()?;
        let inv = self.invariants[edge.target].as_ref()?;
        let z = zone.constrain(g)?;
        let z = z.reset(&edge.resets).constrain(inv)?;
        let z = z.up().constrain(inv)?;
        Some(self.normalize(z))
    }

    /// `|L| · 2^R` with `R` the region count, saturating.
    fn region_ceiling(&self, locations: usize) -> u128 {
        let n = self.clocks as u128;
        let mut regions: u128 = 1;
        for k in 1..=n {
            regions = regions.saturating_mul(k);
        }
        regions =
            regions.saturating_mul(1u128.checked_shl(self.clocks as u32).unwrap_or(u128::MAX));
        for &m in &self.max_const {
            regions = regions.saturating_mul(2 * m as u128 + 2);
        }
        let pow = if regions >= 120 {
            u128::MAX
        } else {
            1u128 << regions
        };
        pow.saturating_mul(locations as u128)
    }
}

/// A transition label: an action and the location it enters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub action: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaState {
    pub location: LocId,
    pub zone: ClockZone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaTransition {
    pub action: usize,
    pub edge: usize,
    pub target: usize,
}

/// Reachable zone graph of a parameter-free automaton.
#[derive(Clone, Debug)]
pub struct TraceAutomaton {
    pub states: Vec<TaState>,
    pub transitions: Vec<Vec<TaTransition>>,
    pub truncated: bool,
    /// Hard state limit that was in force (`min(cap, |L|·2^R)`).
    pub ceiling: u128,
    pub scale: i64,
    pub action_names: Vec<String>,
    pub location_names: Vec<String>,
    pub clock_names: Vec<String>,
    /// Set when the initial location admits no valuation at all.
    pub empty: bool,
}

impl TraceAutomaton {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn is_deadlock(&self, s: usize) -> bool {
        self.transitions[s].is_empty()
    }

    pub fn label(&self, t: &TaTransition) -> Label {
        Label {
            action: self.action_names[t.action].clone(),
            target: self.location_names[self.states[t.target].location].clone(),
        }
    }

    pub fn location_name(&self, s: usize) -> &str {
        &self.location_names[self.states[s].location]
    }

    /// Whether any reachable state sits in the named location.
    pub fn reaches(&self, location: &str) -> bool {
        self.states
            .iter()
            .any(|s| self.location_names[s.location] == location)
    }

    pub fn has_action(&self, action: &str) -> bool {
        self.transitions
            .iter()
            .flatten()
            .any(|t| self.action_names[t.action] == action)
    }
}

/// Breadth-first zone-graph construction with extrapolation.
pub fn build_trace_automaton(
    ta: &PtaModel,
    opts: BuildOptions,
) -> Result<TraceAutomaton, ConcreteError> {
    let sys = TimedSystem::new(ta)?;
    let ceiling = sys
        .region_ceiling(ta.locations.len())
        .min(opts.state_cap as u128);
    let mut out = TraceAutomaton {
        states: Vec::new(),
        transitions: Vec::new(),
        truncated: false,
        ceiling,
        scale: sys.scale,
        action_names: ta.actions.clone(),
        location_names: ta.locations.iter().map(|l| l.name.clone()).collect(),
        clock_names: ta.clocks.clone(),
        empty: false,
    };
    let Some(z0) = sys.initial_zone(ta.initial) else {
        // an empty initial constraint leaves a single deadlocked state
        out.empty = true;
        out.states.push(TaState {
            location: ta.initial,
            zone: ClockZone::zero(sys.clocks),
        });
        out.transitions.push(Vec::new());
        return Ok(out);
    };
    let mut index: HashMap<(LocId, ClockZone), usize> = HashMap::new();
    index.insert((ta.initial, z0.clone()), 0);
    out.states.push(TaState {
        location: ta.initial,
        zone: z0,
    });
    out.transitions.push(Vec::new());
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((s, depth)) = queue.pop_front() {
        if opts.depth.is_some_and(|d| depth >= d) {
            out.truncated = true;
            continue;
        }
        let (loc, zone) = (out.states[s].location, out.states[s].zone.clone());
        let mut trans = Vec::new();
        for (eid, e) in sys.edges.iter().enumerate() {
            if e.source != loc {
                continue;
            }
            let Some(nz) = sys.successor(&zone, e) else {
                continue;
            };
            let key = (e.target, nz);
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    if out.states.len() as u128 >= ceiling {
                        out.truncated = true;
                        continue;
                    }
                    let t = out.states.len();
                    out.states.push(TaState {
                        location: key.0,
                        zone: key.1.clone(),
                    });
                    out.transitions.push(Vec::new());
                    index.insert(key, t);
                    queue.push_back((t, depth + 1));
                    t
                }
            };
            trans.push(TaTransition {
                action: e.action,
                edge: eid,
                target,
            });
        }
        out.transitions[s] = trans;
    }
    Ok(out)
}
