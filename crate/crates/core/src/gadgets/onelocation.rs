//! Collapsing a timed automaton into one location.
//!
//! The current location is recorded in which clock was reset together with
//! the last action. `_lz` is reset by every action after a positive delay and
//! `_lg` is never reset. `_at{i}_{l}` is reset when the `i`-th action of the
//! current instant enters `l`, so at most `k` actions may share an instant.
//! The first action must come after a positive delay.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Builder, GadgetError};
use crate::constraints::{render_inequality, Inequality};
use crate::model::PtaModel;

/// `inv` with the `resets` clocks replaced by 0.
fn substitute_zero(inv: &Inequality, resets: &[usize]) -> Inequality {
    let mut coeffs = inv.coefficients().to_vec();
    for &r in resets {
        coeffs[r] = BigInt::zero();
    }
    Inequality::new(coeffs, inv.constant().clone(), inv.relation())
}

/// The one-location automaton with the timed words of `m` whose first action
/// comes after a positive delay and that have at most `k` actions per instant.
pub fn one_location_transform(m: &PtaModel, k: usize) -> Result<PtaModel, GadgetError> {
    if k < 1 {
        return Err(GadgetError::ZeroDelayBound);
    }
    let names = m.names();
    let at = |i: usize, l: usize| format!("_at{i}_{}", m.locations[l].name);
    let mut clocks = m.clocks.clone();
    clocks.push("_lz".into());
    clocks.push("_lg".into());
    for i in 0..k {
        clocks.extend((0..m.locations.len()).map(|l| at(i, l)));
    }
    let mut b = Builder::owned(
        &format!("{}_one", m.name),
        clocks,
        m.params.clone(),
        m.actions.clone(),
    );
    b.diagonals();
    b.location("_all", None);
    for e in &m.edges {
        let entry = m.locations[e.target].invariant.inequalities().iter();
        let atoms: Vec<&Inequality> = e
            .guard
            .inequalities()
            .iter()
            .chain(m.locations[e.source].invariant.inequalities())
            .collect();
        let mut base: Vec<String> = Vec::new();
        let mut unsat = false;
        let substituted = entry.map(|a| substitute_zero(a, &e.resets));
        for a in atoms.into_iter().cloned().chain(substituted) {
            match a.trivially_true() {
                Some(true) => {}
                Some(false) => unsat = true,
                None => base.push(render_inequality(&a, &names)),
            }
        }
        if unsat {
            continue;
        }
        let (src, tgt) = (e.source, e.target);
        let action = &m.actions[e.action];
        let resets: Vec<&str> = e.resets.iter().map(|&r| m.clocks[r].as_str()).collect();
        let with = |extra: Vec<String>| base.iter().cloned().chain(extra).collect::<Vec<_>>();
        let all_unused = |i: usize, anchor: &str| -> Vec<String> {
            (0..m.locations.len())
                .map(|l| format!("{} {anchor}> 0", at(i, l)))
                .collect()
        };
        if src == m.initial {
            let guard = with(vec!["_lz > 0".into(), "_lz = _lg".into()]);
            let at0 = at(0, tgt);
            let mut r = resets.clone();
            r.extend(["_lz", at0.as_str()]);
            b.edge("_all", "_all", action, &guard, &r);
        }
        for i in 1..k {
            let mut extra = vec![
                "_lz = 0".into(),
                "_lg - _lz > 0".into(),
                format!("{} = 0", at(i - 1, src)),
            ];
            extra.extend(all_unused(i, ""));
            let ati = at(i, tgt);
            let mut r = resets.clone();
            r.push(ati.as_str());
            b.edge("_all", "_all", action, &with(extra), &r);
        }
        for i in 0..k {
            let mut extra = vec![
                "_lz > 0".into(),
                "_lg - _lz > 0".into(),
                format!("{} - _lz = 0", at(i, src)),
            ];
            if i + 1 < k {
                extra.extend(all_unused(i + 1, "- _lz "));
            }
            let at0 = at(0, tgt);
            let mut r = resets.clone();
            r.extend(["_lz", at0.as_str()]);
            b.edge("_all", "_all", action, &with(extra), &r);
        }
    }
    b.build()
}
