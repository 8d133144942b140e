//! End-to-end checks of an encoding against the machine's own run.

use num_bigint::BigInt;
use num_traits::Zero;

use super::compile::{compile, EncodingKind};
use super::machine::CounterMachine;
use super::{Builder, GadgetError};
use crate::concrete::DigitalSim;
use crate::constraints::{render_polyhedron, Rational};
use crate::model::PtaModel;
use crate::symbolic::{explore_filtered, ExploreOptions};

#[derive(Clone, Copy, Debug)]
pub struct ValidationOptions {
    /// Also look for the halting location in the zone graph.
    pub symbolic: bool,
    /// The depth is lowered to the length of the concrete run.
    pub explore: ExploreOptions,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            symbolic: true,
            explore: ExploreOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub kind: EncodingKind,
    /// Parameter valuation the encoding was run at.
    pub valuation: Vec<Rational>,
    /// Configurations of the machine run.
    pub machine_length: usize,
    pub concrete_reached: bool,
    /// Time of the concrete run up to the halting location.
    pub duration: Option<Rational>,
    /// Every main location is entered with the clocks encoding the
    /// machine's counters, in the machine's order.
    pub correspondence_ok: bool,
    pub symbolic_reached: Option<bool>,
    /// Some reached halting state has the valuation in its projection.
    pub projection_contains: Option<bool>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.concrete_reached && self.correspondence_ok && self.projection_contains != Some(false)
    }
}

/// Adds a clock `_T` that is never reset and bounds every location by
/// `_T <= bound`.
pub fn with_time_bound(m: &PtaModel, bound: u64) -> Result<PtaModel, GadgetError> {
    let names = m.names();
    let mut clocks = m.clocks.clone();
    clocks.push("_T".into());
    let mut b = Builder::owned(&m.name, clocks, m.params.clone(), m.actions.clone());
    if m.allow_diagonals {
        b.diagonals();
    }
    let order =
        std::iter::once(m.initial).chain((0..m.locations.len()).filter(|&l| l != m.initial));
    for l in order {
        let loc = &m.locations[l];
        let inv = format!(
            "{} & _T <= {bound}",
            render_polyhedron(&loc.invariant, &names)
        );
        b.location(&loc.name, Some(&inv));
    }
    for e in &m.edges {
        let guard = vec![render_polyhedron(&e.guard, &names)];
        let resets: Vec<&str> = e.resets.iter().map(|&r| m.clocks[r].as_str()).collect();
        b.edge(
            &m.locations[e.source].name,
            &m.locations[e.target].name,
            &m.actions[e.action],
            &guard,
            &resets,
        );
    }
    b.build()
}

fn rat(n: usize, d: usize) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Valuation for a run of `n` configurations with counters at most `c`,
/// and the clock value encoding counter value `k` while `t = 0`.
fn setting(
    kind: EncodingKind,
    n: usize,
    c: usize,
) -> (Vec<Rational>, Box<dyn Fn(u64) -> Rational>) {
    match kind {
        EncodingKind::Basic | EncodingKind::Wrapper => {
            let p = rat(n + 1, 1);
            (vec![p], Box::new(|k| rat(k as usize, 1)))
        }
        EncodingKind::Robust => {
            let p = rat(1, c + 1);
            let q = p.clone();
            (
                vec![p],
                Box::new(move |k| rat(1, 1) - &q * rat(k as usize, 1)),
            )
        }
        EncodingKind::BoundedTime | EncodingKind::OneLocation => {
            let p2 = rat(1, (c + 1) * n);
            let p1 = &p2 * rat(c, 1);
            let (a, b) = (p1.clone(), p2.clone());
            (
                vec![p1, p2],
                Box::new(move |k| &a - &b * rat(k as usize, 1)),
            )
        }
    }
}

/// Compiles `cm`, checks that it halts within `n` configurations with
/// counters at most `c`, and replays it in the encoding.
pub fn validate_encoding(
    cm: &CounterMachine,
    kind: EncodingKind,
    n: usize,
    c: usize,
    opts: ValidationOptions,
) -> Result<ValidationReport, GadgetError> {
    if kind == EncodingKind::OneLocation {
        return Err(GadgetError::Unsupported(
            "the one-location encoding has no machine-level locations to validate".into(),
        ));
    }
    let run = cm.simulate(n.saturating_sub(1));
    if !run.halted || run.length() > n {
        return Err(GadgetError::GroundTruth(format!(
            "machine does not halt within {n} configurations"
        )));
    }
    if run.max_counter() > c as u64 {
        return Err(GadgetError::GroundTruth(format!("a counter exceeds {c}")));
    }
    let (n, c) = (n.max(1), c.max(1));
    let mut m = compile(cm, kind)?;
    if kind == EncodingKind::BoundedTime {
        m = with_time_bound(&m, 1)?;
    }
    let (valuation, encode) = setting(kind, n, c);
    let concrete = m.valuate(&valuation)?;
    let sim = DigitalSim::new(&concrete, 1).map_err(|e| GadgetError::Unsupported(e.to_string()))?;
    let halt = &cm.states[cm.halt];
    let found = sim.find_run(halt);

    let mut correspondence_ok = false;
    let mut duration = None;
    if let Some(r) = &found {
        duration = Some(r.duration());
        let (t, x1, x2) = (
            m.clock_index("t").expect("encodings have t"),
            m.clock_index("x1").expect("encodings have x1"),
            m.clock_index("x2").expect("encodings have x2"),
        );
        let mut entries: Vec<(usize, Vec<Rational>)> = Vec::new();
        if cm.states[cm.initial()] == m.locations[m.initial].name {
            entries.push((cm.initial(), vec![Rational::zero(); m.clocks.len()]));
        }
        for s in &r.steps {
            let target = &m.locations[m.edges[s.edge].target].name;
            if let Some(q) = cm.states.iter().position(|x| x == target) {
                entries.push((q, s.valuation.clone()));
            }
        }
        correspondence_ok = entries.len() == run.trace.len()
            && entries
                .iter()
                .zip(&run.trace)
                .all(|((q, v), &(state, c1, c2))| {
                    *q == state && v[t].is_zero() && v[x1] == encode(c1) && v[x2] == encode(c2)
                });
    }

    let (mut symbolic_reached, mut projection_contains) = (None, None);
    if opts.symbolic {
        let depth = found.as_ref().map_or(n * 8, |r| r.steps.len());
        let explore = ExploreOptions {
            depth: Some(opts.explore.depth.map_or(depth, |d| d.min(depth))),
            ..opts.explore
        };
        let halt_loc = m.location_by_name(halt).expect("halt location exists");
        let (mut reached, mut contains) = (false, false);
        let graph = explore_filtered(&m, explore, |_, s| {
            if contains {
                return false;
            }
            let proj = s.parameter_constraint();
            let inside = proj.contains_point(&valuation);
            if s.location == halt_loc {
                reached = true;
                contains |= inside;
            }
            inside
        });
        graph.map_err(|e| GadgetError::Unsupported(e.to_string()))?;
        symbolic_reached = Some(reached);
        projection_contains = Some(contains);
    }

    Ok(ValidationReport {
        kind,
        valuation,
        machine_length: run.length(),
        concrete_reached: found.is_some(),
        duration,
        correspondence_ok,
        symbolic_reached,
        projection_contains,
    })
}
