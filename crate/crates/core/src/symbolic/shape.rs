//! Shape of symbolic constraints in one-clock models.
//!
//! With a single clock `x`, every reachable constraint is equivalent to a
//! conjunction of atoms `x ⋈ t` and `t ⋈ t'`, where `t, t'` range over the
//! parametric linear terms of the model and `0`. That bounds the zone graph
//! by `|L| · 2^{n(n+1)}` for `n` distinct terms.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::constraints::{Inequality, Polyhedron, Rational, Relation};
use crate::model::PtaModel;

/// A parametric linear term as parameter coefficients followed by a constant.
type Term = Vec<Rational>;

/// Distinct terms `t` of the atoms `x ⋈ t` of a one-clock model, plus
/// parameter-only atoms kept verbatim.
fn collect(m: &PtaModel) -> (BTreeSet<Term>, Vec<Inequality>) {
    assert_eq!(m.clocks.len(), 1, "one-clock model expected");
    let mut terms = BTreeSet::new();
    let mut param_atoms = Vec::new();
    for a in m.atoms() {
        let c = &a.coefficients()[0];
        if c.is_zero() {
            param_atoms.push(a.clone());
            continue;
        }
        // c·x + rest ⋈ 0  gives  x ⋈ -rest / c
        let c = Rational::from_integer(c.clone());
        let mut t: Term = a.coefficients()[1..]
            .iter()
            .map(|k| -Rational::from_integer(k.clone()) / &c)
            .collect();
        t.push(-Rational::from_integer(a.constant().clone()) / &c);
        terms.insert(t);
    }
    (terms, param_atoms)
}

/// Distinct parametric linear terms compared against the clock.
pub fn linear_terms(m: &PtaModel) -> usize {
    collect(m).0.len()
}

/// `|L| · 2^{n(n+1)}`, saturating.
pub fn one_clock_state_bound(m: &PtaModel) -> u128 {
    let n = linear_terms(m) as u32;
    let exp = n.saturating_mul(n + 1);
    let pow = 1u128
        .checked_shl(exp)
        .filter(|_| exp < 128)
        .unwrap_or(u128::MAX);
    pow.saturating_mul(m.locations.len() as u128)
}

/// Row `lhs - rhs ⋈ 0` over `(x, params)`; `lhs` carries the clock
/// coefficient separately.
fn row(x: i64, lhs: &Term, rhs: &Term, rel: Relation) -> Inequality {
    let mut coeffs = vec![Rational::from_integer(x.into())];
    let k = lhs.len() - 1;
    coeffs.extend((0..k).map(|i| &lhs[i] - &rhs[i]));
    crate::constraints::from_rational_row(&coeffs, &(&lhs[k] - &rhs[k]), rel)
}

/// Whether `c` is equivalent to a conjunction of atoms over the model's
/// terms. Exact: `c` is compared with the conjunction of every candidate
/// atom it entails.
pub fn in_one_clock_shape(m: &PtaModel, c: &Polyhedron) -> bool {
    let (terms, param_atoms) = collect(m);
    let ctx = m.context();
    let zero: Term = vec![Rational::zero(); m.params.len() + 1];
    let mut all: Vec<Term> = terms.into_iter().collect();
    all.push(zero.clone());
    let mut candidates = param_atoms;
    for t in &all {
        for rel in [Relation::Le, Relation::Lt] {
            candidates.push(row(1, &zero, t, rel));
            candidates.push(row(-1, t, &zero, rel));
            for u in &all {
                if t != u {
                    candidates.push(row(0, t, u, rel));
                }
            }
        }
    }
    let mut hull = Polyhedron::universe(ctx);
    for a in candidates {
        let p = Polyhedron::from_inequalities(ctx, vec![a]).expect("dimension matches");
        if p.includes(c) {
            hull = hull.conjoin(&p);
        }
    }
    c.includes(&hull)
}
