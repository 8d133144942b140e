//! Fourier–Motzkin elimination over integer rows with strictness tracking.
//!
//! Rows are `coeffs·v + constant ⋈ 0`. Each inequality row carries the set
//! of input rows it was combined from; after `k` combination steps any row
//! built from more than `k + 1` inputs is redundant and dropped.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linear::{Inequality, Rational, Relation};

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<BigInt>,
    constant: BigInt,
    strict: bool,
    history: Vec<u64>,
}

impl Row {
    fn history_len(&self) -> u32 {
        self.history.iter().map(|w| w.count_ones()).sum()
    }

    fn normalize(&mut self) {
        let mut g = self.constant.abs();
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_zero() && !g.is_one() {
            for c in &mut self.coeffs {
                *c = &*c / &g;
            }
            self.constant = &self.constant / &g;
        }
    }
}

#[derive(Clone, Debug)]
struct EqRow {
    coeffs: Vec<BigInt>,
    constant: BigInt,
}

/// How one variable left the system; drives back-substitution.
#[derive(Clone, Debug)]
enum Step {
    Substituted { pos: usize, eq: EqRow },
    Combined { pos: usize, bounds: Vec<Row> },
}

#[derive(Clone, Debug)]
pub(crate) struct System {
    dim: usize,
    eqs: Vec<EqRow>,
    rows: Vec<Row>,
    infeasible: bool,
    combined_steps: u32,
    prune: bool,
    steps: Vec<Step>,
}

pub(crate) struct Infeasible;

impl System {
    /// Builds the system `ineqs ∧ (v ≥ 0 for v in nonneg)`.
    pub(crate) fn new(dim: usize, ineqs: &[Inequality], nonneg: &[usize], prune: bool) -> Self {
        let n_rows = ineqs.len() + nonneg.len();
        let words = n_rows.div_ceil(64).max(1);
        let mut sys = System {
            dim,
            eqs: Vec::new(),
            rows: Vec::new(),
            infeasible: false,
            combined_steps: 0,
            prune,
            steps: Vec::new(),
        };
        let mut next = 0usize;
        let mut fresh_history = || {
            let mut h = vec![0u64; words];
            h[next / 64] |= 1 << (next % 64);
            next += 1;
            h
        };
        for ineq in ineqs {
            assert_eq!(ineq.dim(), dim, "inequality dimension mismatch");
            match ineq.rel {
                Relation::Eq => sys.eqs.push(EqRow {
                    coeffs: ineq.coeffs.clone(),
                    constant: ineq.constant.clone(),
                }),
                rel => sys.rows.push(Row {
                    coeffs: ineq.coeffs.clone(),
                    constant: ineq.constant.clone(),
                    strict: rel == Relation::Lt,
                    history: fresh_history(),
                }),
            }
        }
        for &p in nonneg {
            let mut coeffs = vec![BigInt::zero(); dim];
            coeffs[p] = BigInt::from(-1);
            sys.rows.push(Row {
                coeffs,
                constant: BigInt::zero(),
                strict: false,
                history: fresh_history(),
            });
        }
        sys.tidy();
        sys
    }

    pub(crate) fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    /// Drops trivially true rows, detects trivially false ones and keeps
    /// only the tightest row per direction.
    fn tidy(&mut self) {
        if self.infeasible {
            return;
        }
        let mut eqs = Vec::with_capacity(self.eqs.len());
        for eq in self.eqs.drain(..) {
            if eq.coeffs.iter().all(Zero::is_zero) {
                if !eq.constant.is_zero() {
                    self.infeasible = true;
                    return;
                }
            } else {
                eqs.push(eq);
            }
        }
        self.eqs = eqs;
        let mut best: HashMap<Vec<BigInt>, usize> = HashMap::new();
        let mut kept: Vec<Option<Row>> = Vec::new();
        for mut row in self.rows.drain(..) {
            if row.coeffs.iter().all(Zero::is_zero) {
                let ok = if row.strict {
                    row.constant.is_negative()
                } else {
                    !row.constant.is_positive()
                };
                if !ok {
                    self.infeasible = true;
                    return;
                }
                continue;
            }
            row.normalize();
            let mut g = BigInt::zero();
            for c in &row.coeffs {
                g = g.gcd(c);
            }
            let dir: Vec<BigInt> = row.coeffs.iter().map(|c| c / &g).collect();
            match best.get(&dir) {
                None => {
                    best.insert(dir, kept.len());
                    kept.push(Some(row));
                }
                Some(&idx) => {
                    let other = kept[idx].as_ref().unwrap();
                    let og = other.coeffs.iter().fold(BigInt::zero(), |a, c| a.gcd(c));
                    // bound value is constant / gcd; larger means tighter
                    let mine = Rational::new(row.constant.clone(), g.clone());
                    let theirs = Rational::new(other.constant.clone(), og);
                    let replace = match mine.cmp(&theirs) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => {
                            (row.strict && !other.strict)
                                || (row.strict == other.strict
                                    && row.history_len() < other.history_len())
                        }
                    };
                    if replace {
                        kept[idx] = Some(row);
                    }
                }
            }
        }
        self.rows = kept.into_iter().flatten().collect();
    }

    fn eq_for(&self, pos: usize) -> Option<usize> {
        // prefer the sparsest equality to limit fill-in
        self.eqs
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.coeffs[pos].is_zero())
            .min_by_key(|(_, e)| e.coeffs.iter().filter(|c| !c.is_zero()).count())
            .map(|(i, _)| i)
    }

    pub(crate) fn mentions(&self, pos: usize) -> bool {
        self.eqs.iter().any(|e| !e.coeffs[pos].is_zero())
            || self.rows.iter().any(|r| !r.coeffs[pos].is_zero())
    }

    fn combination_cost(&self, pos: usize) -> i64 {
        let (mut p, mut n) = (0i64, 0i64);
        for r in &self.rows {
            if r.coeffs[pos].is_positive() {
                p += 1;
            } else if r.coeffs[pos].is_negative() {
                n += 1;
            }
        }
        p * n - p - n
    }

    /// Eliminates every position in `positions`, choosing a cheap order.
    pub(crate) fn eliminate_all(&mut self, positions: &[usize]) {
        let mut pending: Vec<usize> = positions.to_vec();
        while !pending.is_empty() && !self.infeasible {
            let pick = pending
                .iter()
                .enumerate()
                .min_by_key(|(_, &p)| {
                    if self.eq_for(p).is_some() {
                        (0, 0)
                    } else {
                        (1, self.combination_cost(p))
                    }
                })
                .map(|(i, _)| i)
                .unwrap();
            let pos = pending.swap_remove(pick);
            self.eliminate(pos);
        }
    }

    pub(crate) fn eliminate(&mut self, pos: usize) {
        if self.infeasible {
            return;
        }
        if let Some(i) = self.eq_for(pos) {
            let eq = self.eqs.swap_remove(i);
            let a = eq.coeffs[pos].clone();
            let abs_a = a.abs();
            let sign: BigInt = if a.is_negative() {
                BigInt::from(-1)
            } else {
                BigInt::one()
            };
            for other in &mut self.eqs {
                let r = other.coeffs[pos].clone();
                if r.is_zero() {
                    continue;
                }
                let m = &sign * &r;
                for (c, e) in other.coeffs.iter_mut().zip(&eq.coeffs) {
                    *c = &abs_a * &*c - &m * e;
                }
                other.constant = &abs_a * &other.constant - &m * &eq.constant;
            }
            for row in &mut self.rows {
                let r = row.coeffs[pos].clone();
                if r.is_zero() {
                    continue;
                }
                let m = &sign * &r;
                for (c, e) in row.coeffs.iter_mut().zip(&eq.coeffs) {
                    *c = &abs_a * &*c - &m * e;
                }
                row.constant = &abs_a * &row.constant - &m * &eq.constant;
            }
            for other in &mut self.eqs {
                normalize_eq(other);
            }
            self.steps.push(Step::Substituted { pos, eq });
            self.tidy();
            return;
        }
        let mut pos_rows = Vec::new();
        let mut neg_rows = Vec::new();
        let mut rest = Vec::new();
        for row in self.rows.drain(..) {
            if row.coeffs[pos].is_positive() {
                pos_rows.push(row);
            } else if row.coeffs[pos].is_negative() {
                neg_rows.push(row);
            } else {
                rest.push(row);
            }
        }
        let mut bounds = pos_rows.clone();
        bounds.extend(neg_rows.iter().cloned());
        self.combined_steps += 1;
        let limit = self.combined_steps + 1;
        for p in &pos_rows {
            for n in &neg_rows {
                let history: Vec<u64> = p
                    .history
                    .iter()
                    .zip(&n.history)
                    .map(|(a, b)| a | b)
                    .collect();
                let row_hist: u32 = history.iter().map(|w| w.count_ones()).sum();
                if self.prune && row_hist > limit {
                    continue;
                }
                let mp = -&n.coeffs[pos];
                let mn = p.coeffs[pos].clone();
                let coeffs: Vec<BigInt> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(a, b)| &mp * a + &mn * b)
                    .collect();
                let mut row = Row {
                    coeffs,
                    constant: &mp * &p.constant + &mn * &n.constant,
                    strict: p.strict || n.strict,
                    history,
                };
                row.normalize();
                rest.push(row);
            }
        }
        self.rows = rest;
        self.steps.push(Step::Combined { pos, bounds });
        self.tidy();
    }

    /// Remaining constraints as normalized inequalities.
    pub(crate) fn constraints(&self) -> Result<Vec<Inequality>, Infeasible> {
        if self.infeasible {
            return Err(Infeasible);
        }
        let mut out: Vec<Inequality> = self
            .eqs
            .iter()
            .map(|e| Inequality::new(e.coeffs.clone(), e.constant.clone(), Relation::Eq))
            .collect();
        out.extend(self.rows.iter().map(|r| {
            Inequality::new(
                r.coeffs.clone(),
                r.constant.clone(),
                if r.strict { Relation::Lt } else { Relation::Le },
            )
        }));
        Ok(out)
    }

    /// After eliminating every variable, reconstructs a point of the input
    /// system by back-substitution.
    pub(crate) fn back_substitute(&self) -> Option<Vec<Rational>> {
        if self.infeasible {
            return None;
        }
        debug_assert!((0..self.dim).all(|p| !self.mentions(p)));
        let mut point = vec![Rational::zero(); self.dim];
        for step in self.steps.iter().rev() {
            match step {
                Step::Substituted { pos, eq } => {
                    let mut acc = Rational::from_integer(eq.constant.clone());
                    for (i, c) in eq.coeffs.iter().enumerate() {
                        if i != *pos && !c.is_zero() {
                            acc += &point[i] * Rational::from_integer(c.clone());
                        }
                    }
                    point[*pos] = -acc / Rational::from_integer(eq.coeffs[*pos].clone());
                }
                Step::Combined { pos, bounds } => {
                    point[*pos] = pick_value(*pos, bounds, &point)?;
                }
            }
        }
        Some(point)
    }
}

fn normalize_eq(eq: &mut EqRow) {
    let mut g = eq.constant.abs();
    for c in &eq.coeffs {
        if !c.is_zero() {
            g = g.gcd(c);
        }
    }
    if !g.is_zero() && !g.is_one() {
        for c in &mut eq.coeffs {
            *c = &*c / &g;
        }
        eq.constant = &eq.constant / &g;
    }
}

/// Chooses a value for `pos` inside the interval cut out by `bounds`, with
/// every other position already fixed; prefers small integers.
fn pick_value(pos: usize, bounds: &[Row], point: &[Rational]) -> Option<Rational> {
    let mut lo: Option<(Rational, bool)> = None;
    let mut hi: Option<(Rational, bool)> = None;
    for row in bounds {
        let a = Rational::from_integer(row.coeffs[pos].clone());
        let mut rest = Rational::from_integer(row.constant.clone());
        for (i, c) in row.coeffs.iter().enumerate() {
            if i != pos && !c.is_zero() {
                rest += &point[i] * Rational::from_integer(c.clone());
            }
        }
        let bound = -rest / &a;
        if a.is_positive() {
            let tighter = match &hi {
                None => true,
                Some((h, s)) => bound < *h || (bound == *h && row.strict && !s),
            };
            if tighter {
                hi = Some((bound, row.strict));
            }
        } else {
            let tighter = match &lo {
                None => true,
                Some((l, s)) => bound > *l || (bound == *l && row.strict && !s),
            };
            if tighter {
                lo = Some((bound, row.strict));
            }
        }
    }
    let fits = |v: &Rational| {
        let lo_ok = match &lo {
            None => true,
            Some((l, s)) => {
                if *s {
                    v > l
                } else {
                    v >= l
                }
            }
        };
        let hi_ok = match &hi {
            None => true,
            Some((h, s)) => {
                if *s {
                    v < h
                } else {
                    v <= h
                }
            }
        };
        lo_ok && hi_ok
    };
    let mut candidates = Vec::new();
    match &lo {
        Some((l, _)) => {
            candidates.push(l.clone());
            candidates.push(l.ceil());
            candidates.push(l.floor() + Rational::one());
        }
        None => candidates.push(Rational::zero()),
    }
    if let Some((h, _)) = &hi {
        candidates.push(h.clone());
        candidates.push(h.floor());
        candidates.push(h.ceil() - Rational::one());
        if let Some((l, _)) = &lo {
            candidates.push((l + h) / Rational::from_integer(BigInt::from(2)));
        }
    }
    candidates.into_iter().find(|c| fits(c))
}

/// Projects `ineqs ∧ (v ≥ 0 for v in eliminated)` onto the remaining
/// positions.
pub(crate) fn project(
    dim: usize,
    ineqs: &[Inequality],
    eliminated: &[usize],
) -> Result<Vec<Inequality>, Infeasible> {
    let mut sys = System::new(dim, ineqs, eliminated, true);
    sys.eliminate_all(eliminated);
    sys.constraints()
}

/// A point of `ineqs` with every coordinate nonnegative, if one exists.
pub(crate) fn solve(dim: usize, ineqs: &[Inequality]) -> Option<Vec<Rational>> {
    let all: Vec<usize> = (0..dim).collect();
    for prune in [true, false] {
        let mut sys = System::new(dim, ineqs, &all, prune);
        sys.eliminate_all(&all);
        if sys.is_infeasible() {
            return None;
        }
        if let Some(p) = sys.back_substitute() {
            if ineqs.iter().all(|i| i.holds_at(&p)) && p.iter().all(|x| !x.is_negative()) {
                return Some(p);
            }
        }
    }
    None
}
