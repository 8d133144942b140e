//! Digital-time simulation: delays restricted to a grid of `1/resolution`
//! model units. For closed guards and integer constants, resolution 1 finds
//! every reachable location; strict bounds need a finer grid.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;

use super::dbm::{constant, is_strict, DiffBound};
use super::{ConcreteError, TimedSystem};
use crate::constraints::Rational;
use crate::model::{LocId, PtaModel};

/// One discrete transition preceded by a delay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub delay: Rational,
    pub edge: usize,
    /// Clock values right after the transition.
    pub valuation: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedRun {
    pub steps: Vec<Step>,
    /// Delay spent in the last location before it was recognised.
    pub final_delay: Rational,
    pub location: LocId,
}

impl TimedRun {
    pub fn duration(&self) -> Rational {
        self.steps.iter().map(|s| &s.delay).sum::<Rational>() + &self.final_delay
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Tick,
    Edge(usize),
}

/// Concrete simulator over integer ticks of `1/(scale·resolution)`.
#[derive(Clone, Debug)]
pub struct DigitalSim {
    sys: TimedSystem,
    res: i64,
    initial: LocId,
    locations: Vec<String>,
    actions: Vec<String>,
    /// Largest value a clock needs to be told apart, `None` with diagonals.
    caps: Option<Vec<i64>>,
    /// Give up after this many distinct configurations.
    pub state_limit: usize,
}

type Config = (LocId, Vec<i64>);

impl DigitalSim {
    pub fn new(m: &PtaModel, resolution: i64) -> Result<Self, ConcreteError> {
        assert!(resolution >= 1, "resolution must be positive");
        let sys = TimedSystem::new(m)?;
        let caps =
            (!sys.diagonal).then(|| sys.max_const.iter().map(|c| c * resolution + 1).collect());
        Ok(DigitalSim {
            sys,
            res: resolution,
            initial: m.initial,
            locations: m.locations.iter().map(|l| l.name.clone()).collect(),
            actions: m.actions.clone(),
            caps,
            state_limit: 2_000_000,
        })
    }

    fn ticks_per_unit(&self) -> i64 {
        self.sys.scale * self.res
    }

    fn to_model(&self, ticks: i64) -> Rational {
        Rational::new(BigInt::from(ticks), BigInt::from(self.ticks_per_unit()))
    }

    fn holds(&self, bounds: &[DiffBound], v: &[i64]) -> bool {
        bounds.iter().all(|d| {
            let val = |i: usize| if i == 0 { 0 } else { v[i - 1] };
            let diff = val(d.p) - val(d.q);
            let c = constant(d.b) * self.res;
            if is_strict(d.b) {
                diff < c
            } else {
                diff <= c
            }
        })
    }

    fn invariant_holds(&self, loc: LocId, v: &[i64]) -> bool {
        self.sys.invariants[loc]
            .as_ref()
            .is_some_and(|inv| self.holds(inv, v))
    }

    fn cap(&self, mut v: Vec<i64>) -> Vec<i64> {
        if let Some(caps) = &self.caps {
            for (x, c) in v.iter_mut().zip(caps) {
                *x = (*x).min(*c);
            }
        }
        v
    }

    /// Uncapped successor under a move; invariants are checked on arrival.
    fn apply(&self, (loc, v): &Config, mv: Move) -> Option<Config> {
        match mv {
            Move::Tick => {
                let w: Vec<i64> = v.iter().map(|x| x + 1).collect();
                self.invariant_holds(*loc, &w).then_some((*loc, w))
            }
            Move::Edge(e) => {
                let edge = &self.sys.edges[e];
                if edge.source != *loc || !edge.guard.as_ref().is_some_and(|g| self.holds(g, v)) {
                    return None;
                }
                let mut w = v.clone();
                for &r in &edge.resets {
                    w[r] = 0;
                }
                self.invariant_holds(edge.target, &w)
                    .then_some((edge.target, w))
            }
        }
    }

    fn moves(&self) -> impl Iterator<Item = Move> + '_ {
        std::iter::once(Move::Tick).chain((0..self.sys.edges.len()).map(Move::Edge))
    }

    fn start(&self) -> Option<Config> {
        let v = vec![0; self.sys.clocks];
        self.invariant_holds(self.initial, &v)
            .then_some((self.initial, v))
    }

    /// A run with the fewest moves (ticks and transitions) into `target`.
    pub fn find_run(&self, target: &str) -> Option<TimedRun> {
        self.find_run_where(|loc, _| self.locations[loc] == target)
    }

    /// Like [`Self::find_run`] with a predicate on location and clock ticks.
    pub fn find_run_where(&self, goal: impl Fn(LocId, &[Rational]) -> bool) -> Option<TimedRun> {
        let start = self.start()?;
        let as_model = |v: &[i64]| v.iter().map(|&t| self.to_model(t)).collect::<Vec<_>>();
        let mut parent: HashMap<Config, (Config, Move)> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        let mut seen: BTreeSet<Config> = BTreeSet::from([start.clone()]);
        let mut found = None;
        while let Some(c) = queue.pop_front() {
            // capped values are only exact below the cap; replay below fixes them
            if goal(c.0, &as_model(&c.1)) {
                found = Some(c);
                break;
            }
            for mv in self.moves() {
                let Some(n) = self.apply(&c, mv) else {
                    continue;
                };
                let n = (n.0, self.cap(n.1));
                if seen.insert(n.clone()) {
                    if seen.len() > self.state_limit {
                        return None;
                    }
                    parent.insert(n.clone(), (c.clone(), mv));
                    queue.push_back(n);
                }
            }
        }
        let mut c = found?;
        let mut moves = Vec::new();
        while let Some((p, mv)) = parent.get(&c) {
            moves.push(*mv);
            c = p.clone();
        }
        moves.reverse();
        Some(self.replay(&start, &moves))
    }

    fn replay(&self, start: &Config, moves: &[Move]) -> TimedRun {
        let mut cur = start.clone();
        let mut steps = Vec::new();
        let mut waited = 0i64;
        for &mv in moves {
            cur = self.apply(&cur, mv).expect("replayed move is enabled");
            match mv {
                Move::Tick => waited += 1,
                Move::Edge(e) => {
                    steps.push(Step {
                        delay: self.to_model(waited),
                        edge: e,
                        valuation: cur.1.iter().map(|&t| self.to_model(t)).collect(),
                    });
                    waited = 0;
                }
            }
        }
        TimedRun {
            steps,
            final_delay: self.to_model(waited),
            location: cur.0,
        }
    }

    /// All timed words with at most `max_len` actions whose timestamps lie on
    /// the grid and do not exceed `horizon`; prefix-closed.
    pub fn timed_words(
        &self,
        max_len: usize,
        horizon: &Rational,
    ) -> BTreeSet<Vec<(String, Rational)>> {
        let limit = (horizon * Rational::from_integer(BigInt::from(self.ticks_per_unit())))
            .floor()
            .to_integer();
        let limit: i64 = i64::try_from(limit).unwrap_or(i64::MAX);
        let mut words = BTreeSet::new();
        let Some(start) = self.start() else {
            return words;
        };
        words.insert(Vec::new());
        // (word as (action, tick) pairs, location, clocks, elapsed ticks)
        type Entry = (Vec<(usize, i64)>, LocId, Vec<i64>, i64);
        let mut layer: BTreeSet<Entry> = BTreeSet::new();
        layer.insert((Vec::new(), start.0, start.1, 0));
        for _ in 0..max_len {
            let mut next = BTreeSet::new();
            for (word, loc, v, now) in &layer {
                let mut cfg = (*loc, v.clone());
                let mut t = *now;
                loop {
                    for e in 0..self.sys.edges.len() {
                        if let Some((l2, v2)) = self.apply(&cfg, Move::Edge(e)) {
                            let mut w = word.clone();
                            w.push((self.sys.edges[e].action, t));
                            next.insert((w, l2, self.cap(v2), t));
                        }
                    }
                    if t >= limit {
                        break;
                    }
                    match self.apply(&cfg, Move::Tick) {
                        Some(c) => cfg = (c.0, self.cap(c.1)),
                        None => break,
                    }
                    t += 1;
                }
            }
            for (w, ..) in &next {
                words.insert(
                    w.iter()
                        .map(|&(a, t)| (self.actions[a].clone(), self.to_model(t)))
                        .collect(),
                );
            }
            layer = next;
        }
        words
    }
}
