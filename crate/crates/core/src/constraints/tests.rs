use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use super::*;

fn row(coeffs: &[i64], k: i64, rel: Relation) -> Inequality {
    Inequality::new(
        coeffs.iter().map(|c| BigInt::from(*c)).collect(),
        BigInt::from(k),
        rel,
    )
}

fn poly(ctx: Context, rows: Vec<Inequality>) -> Polyhedron {
    Polyhedron::from_inequalities(ctx, rows).unwrap()
}

fn point(vals: &[Rational]) -> Vec<Rational> {
    vals.to_vec()
}

// context [x1, x2, p1, p2]
fn ex_ctx() -> Context {
    Context::new(2, 2)
}

fn phi() -> Polyhedron {
    poly(
        ex_ctx(),
        vec![
            row(&[1, 0, -1, 0], 0, Relation::Eq),
            row(&[0, 0, -1, 1], 0, Relation::Lt),
            row(&[-1, 1, 0, 0], 1, Relation::Eq),
            row(&[0, 1, 0, 0], -3, Relation::Eq),
        ],
    )
}

fn assert_same_set(a: &Polyhedron, b: &Polyhedron) {
    assert!(a.includes(b), "first does not include second");
    assert!(b.includes(a), "second does not include first");
    assert_eq!(a.canonicalize(), b.canonicalize(), "canonical forms differ");
}

#[test]
fn satisfies_reference_points() {
    let mut val = BTreeMap::new();
    val.insert(Variable::clock(0), int(4));
    val.insert(Variable::clock(1), int(3));
    val.insert(Variable::param(0), int(4));
    val.insert(Variable::param(1), int(1));
    assert!(phi().satisfies(&val).unwrap());
    val.insert(Variable::param(1), int(5));
    assert!(!phi().satisfies(&val).unwrap());
    assert!(Polyhedron::universe(ex_ctx()).satisfies(&val).unwrap());
    val.remove(&Variable::clock(1));
    assert_eq!(
        phi().satisfies(&val),
        Err(ConstraintError::MissingVariable(Variable::clock(1)))
    );
}

#[test]
fn emptiness_examples() {
    let c1 = Context::new(1, 1);
    assert!(poly(
        c1,
        vec![
            row(&[-1, 0], 1, Relation::Le),
            row(&[1, 0], 0, Relation::Le)
        ]
    )
    .is_empty());
    assert!(!phi().is_empty());
    assert!(poly(c1, vec![row(&[0, 0], 0, Relation::Lt)]).is_empty());
    let w = phi().sample_point().unwrap();
    assert!(phi().contains_point(&w));
    assert_eq!(w[0], int(4));
    assert_eq!(w[1], int(3));
}

#[test]
fn projection_of_the_reference_constraint() {
    let expected = poly(
        ex_ctx(),
        vec![
            row(&[0, 0, -1, 1], 0, Relation::Lt),
            row(&[0, 0, 1, 0], -4, Relation::Eq),
        ],
    );
    assert_same_set(&phi().project_params(), &expected);
    let names = VarNames::positional(&ex_ctx());
    assert_eq!(
        render_polyhedron(&phi().project_params(), &names),
        "p1 = 4 & p2 < 4"
    );
}

#[test]
fn reset_of_the_reference_constraint() {
    let expected = poly(
        ex_ctx(),
        vec![
            row(&[1, 0, -1, 0], 0, Relation::Eq),
            row(&[0, 0, -1, 1], 0, Relation::Lt),
            row(&[0, 1, 0, 0], 0, Relation::Eq),
            row(&[1, 0, 0, 0], -4, Relation::Eq),
        ],
    );
    assert_same_set(&phi().reset(&[Variable::clock(1)]), &expected);
}

#[test]
fn elapse_of_the_reference_constraint() {
    let expected = poly(
        ex_ctx(),
        vec![
            row(&[-1, 0, 1, 0], 0, Relation::Le),
            row(&[0, 0, -1, 1], 0, Relation::Lt),
            row(&[-1, 1, 0, 0], 1, Relation::Eq),
            row(&[0, -1, 0, 0], 3, Relation::Le),
            row(&[0, 0, 1, 0], -4, Relation::Eq),
        ],
    );
    assert_same_set(&phi().time_elapse(), &expected);
}

#[test]
fn eliminate_examples() {
    let c = Context::new(1, 1);
    let u = Polyhedron::universe(c);
    assert_eq!(u.eliminate(&[Variable::clock(0)]), u);
    // x1 <= p1 & x1 >= 2  ->  p1 >= 2
    let src = poly(
        c,
        vec![
            row(&[1, -1], 0, Relation::Le),
            row(&[-1, 0], 2, Relation::Le),
        ],
    );
    let got = src.eliminate(&[Variable::clock(0)]);
    let want = poly(c, vec![row(&[0, -1], 2, Relation::Le)]);
    assert_same_set(&got, &want);
    assert!(want.includes(&got));
    // x1 = p1 & x1 = 3 -> p1 = 3
    let src = poly(
        c,
        vec![
            row(&[1, -1], 0, Relation::Eq),
            row(&[1, 0], -3, Relation::Eq),
        ],
    );
    assert_same_set(
        &src.project_params(),
        &poly(c, vec![row(&[0, 1], -3, Relation::Eq)]),
    );
    // parameter-only input is unchanged
    let ponly = poly(c, vec![row(&[0, 1], -3, Relation::Le)]);
    assert_eq!(ponly.project_params(), ponly.canonicalize());
}

#[test]
fn strictness_of_combined_bounds() {
    let c = Context::new(1, 1);
    // p1 < x1 & x1 <= 3  ->  p1 < 3
    let mixed = poly(
        c,
        vec![
            row(&[-1, 1], 0, Relation::Lt),
            row(&[1, 0], -3, Relation::Le),
        ],
    );
    let got = mixed.eliminate(&[Variable::clock(0)]);
    assert_eq!(
        got,
        poly(c, vec![row(&[0, 1], -3, Relation::Lt)]).canonicalize()
    );
    // p1 <= x1 & x1 <= 3  ->  p1 <= 3
    let closed = poly(
        c,
        vec![
            row(&[-1, 1], 0, Relation::Le),
            row(&[1, 0], -3, Relation::Le),
        ],
    );
    let got = closed.eliminate(&[Variable::clock(0)]);
    assert_eq!(
        got,
        poly(c, vec![row(&[0, 1], -3, Relation::Le)]).canonicalize()
    );
}

#[test]
fn elapse_from_origin() {
    let c = Context::new(2, 0);
    let origin = poly(
        c,
        vec![row(&[1, 0], 0, Relation::Eq), row(&[0, 1], 0, Relation::Eq)],
    );
    let got = origin.time_elapse();
    assert_eq!(
        got,
        poly(c, vec![row(&[1, -1], 0, Relation::Eq)]).canonicalize()
    );
    for d in [int(0), rat(1, 2), int(1), int(2)] {
        assert!(got.contains_point(&point(&[d.clone(), d.clone()])));
        assert!(!got.contains_point(&point(&[d.clone(), d + int(1)])));
    }
}

#[test]
fn reset_examples() {
    let c = Context::new(2, 0);
    let src = poly(
        c,
        vec![
            row(&[-1, 0], 3, Relation::Le),
            row(&[1, -1], 0, Relation::Eq),
        ],
    );
    assert_eq!(src.reset(&[]), src.canonicalize());
    let got = src.reset(&[Variable::clock(0)]);
    let want = poly(
        c,
        vec![
            row(&[1, 0], 0, Relation::Eq),
            row(&[0, -1], 3, Relation::Le),
        ],
    );
    assert_eq!(got, want.canonicalize());
}

#[test]
fn intersect_examples() {
    let c = Context::new(1, 1);
    let le2 = poly(c, vec![row(&[1, 0], -2, Relation::Le)]);
    let ge3 = poly(c, vec![row(&[-1, 0], 3, Relation::Le)]);
    assert!(le2.intersect(&ge3).is_empty());
    assert_eq!(Polyhedron::universe(c).intersect(&le2), le2.canonicalize());
    let a = poly(c, vec![row(&[0, -1], 1, Relation::Le)]);
    let b = poly(c, vec![row(&[0, 1], -1, Relation::Le)]);
    assert_eq!(
        a.intersect(&b),
        poly(c, vec![row(&[0, 1], -1, Relation::Eq)]).canonicalize()
    );
}

#[test]
fn includes_examples() {
    let c = Context::new(0, 1);
    let le1 = poly(c, vec![row(&[1], -1, Relation::Le)]);
    let eq2 = poly(c, vec![row(&[1], -2, Relation::Eq)]);
    assert!(!le1.includes(&eq2));
    assert!(Polyhedron::universe(c).includes(&le1));
}

fn p_only(rows: Vec<Inequality>) -> Polyhedron {
    poly(Context::new(0, 1), rows)
}

#[test]
fn complement_examples() {
    let c = Context::new(0, 1);
    let gt1 = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[-1], 1, Relation::Lt)]));
    let want = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -1, Relation::Le)]));
    assert_eq!(gt1.complement(), want);
    assert_eq!(
        DisjunctiveConstraint::falsum(c).complement(),
        DisjunctiveConstraint::verum(c)
    );
    let eq2 = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -2, Relation::Eq)]));
    let split = DisjunctiveConstraint::from_polyhedra(
        c,
        [
            p_only(vec![row(&[1], -2, Relation::Lt)]),
            p_only(vec![row(&[-1], 2, Relation::Lt)]),
        ],
    );
    assert_eq!(eq2.complement(), split);
    let names = VarNames::new(&[], &["p".to_string()]);
    assert_eq!(render_disjunctive(&gt1.complement(), &names), "p <= 1");
}

#[test]
fn disjunctive_intersection_examples() {
    let c = Context::new(0, 1);
    let le1 = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -1, Relation::Le)]));
    let ge0 = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[-1], 0, Relation::Le)]));
    assert!(le1.intersect(&ge0).equivalent(&le1));
    assert!(le1.intersect(&DisjunctiveConstraint::falsum(c)).is_empty());
    let outer = DisjunctiveConstraint::from_polyhedra(
        c,
        [
            p_only(vec![row(&[1], -1, Relation::Lt)]),
            p_only(vec![row(&[-1], 2, Relation::Lt)]),
        ],
    );
    let le2 = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -2, Relation::Le)]));
    let got = outer.intersect(&le2);
    let want = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -1, Relation::Lt)]));
    assert_eq!(got, want);
    for (num, den) in [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1)] {
        let v = [rat(num, den)];
        assert_eq!(got.contains_point(&v), rat(num, den) < int(1));
    }
}

#[test]
fn other_point_examples() {
    let c = Context::new(0, 1);
    let interval =
        DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], -1, Relation::Le)]));
    let w = interval.contains_other_point(&[int(0)]).unwrap().unwrap();
    assert!(w[0] > int(0) && w[0] <= int(1));
    let single = DisjunctiveConstraint::from_polyhedron(p_only(vec![row(&[1], 0, Relation::Eq)]));
    assert_eq!(single.contains_other_point(&[int(0)]).unwrap(), None);
    let mixed = DisjunctiveConstraint::from_polyhedra(
        c,
        [
            p_only(vec![row(&[1], 0, Relation::Eq)]),
            p_only(vec![
                row(&[-1], 1, Relation::Le),
                row(&[1], -2, Relation::Le),
            ]),
        ],
    );
    assert_eq!(mixed.contains_other_point(&[int(0)]).unwrap(), None);
    assert_eq!(
        mixed.contains_other_point(&[int(5)]),
        Err(ConstraintError::PointOutside)
    );
}

#[test]
fn rendering_uses_names_and_orientation() {
    let names = VarNames::positional(&ex_ctx());
    let r = render_polyhedron(&phi().time_elapse(), &names);
    assert_eq!(r, "x1 = x2 + 1 & x2 >= 3 & p1 = 4 & p2 < 4");
    assert_eq!(
        render_polyhedron(&Polyhedron::universe(ex_ctx()), &names),
        "true"
    );
    assert_eq!(
        render_polyhedron(&Polyhedron::empty(ex_ctx()), &names),
        "false"
    );
    let j = polyhedron_json(&phi().project_params(), &names);
    assert_eq!(j[0]["rel"], "=");
    assert_eq!(j[0]["lhs"]["p1"], 1);
    assert_eq!(j[0]["lhs"]["const"], -4);
}

// ---------- randomized oracles ----------

const GRID_DEN: i64 = 2;
const GRID_MAX: i64 = 8; // grid 0, 1/2, ..., 4

fn grid() -> Vec<Rational> {
    (0..=GRID_MAX).map(|i| rat(i, GRID_DEN)).collect()
}

fn arb_row(dim: usize) -> impl Strategy<Value = Inequality> {
    (
        proptest::collection::vec(-3i64..=3, dim),
        -6i64..=6,
        prop_oneof![Just(Relation::Lt), Just(Relation::Le), Just(Relation::Eq)],
    )
        .prop_map(|(c, k, r)| row(&c, k, r))
}

fn arb_poly(ctx: Context, max_rows: usize) -> impl Strategy<Value = Polyhedron> {
    proptest::collection::vec(arb_row(ctx.dim()), 1..=max_rows)
        .prop_map(move |rows| poly(ctx, rows))
}

/// Feasible interval for position `pos` with the others fixed, decided
/// directly from the atoms.
fn extension_exists(atoms: &[Inequality], pos: usize, fixed: &[Rational]) -> bool {
    let mut lo = (int(0), false);
    let mut hi: Option<(Rational, bool)> = None;
    let mut eq: Option<Rational> = None;
    for a in atoms {
        let coef = Rational::from_integer(a.coefficients()[pos].clone());
        let mut rest = Rational::from_integer(a.constant().clone());
        for (i, c) in a.coefficients().iter().enumerate() {
            if i != pos && !c.is_zero() {
                rest += &fixed[i] * Rational::from_integer(c.clone());
            }
        }
        if coef.is_zero() {
            let ok = match a.relation() {
                Relation::Lt => rest < int(0),
                Relation::Le => rest <= int(0),
                Relation::Eq => rest.is_zero(),
            };
            if !ok {
                return false;
            }
            continue;
        }
        let b = -rest / &coef;
        match a.relation() {
            Relation::Eq => {
                if let Some(e) = &eq {
                    if *e != b {
                        return false;
                    }
                }
                eq = Some(b);
            }
            rel => {
                let strict = rel == Relation::Lt;
                if coef.is_positive() {
                    let tighter = match &hi {
                        None => true,
                        Some((h, s)) => b < *h || (b == *h && strict && !s),
                    };
                    if tighter {
                        hi = Some((b, strict));
                    }
                } else if b > lo.0 || (b == lo.0 && strict && !lo.1) {
                    lo = (b, strict);
                }
            }
        }
    }
    let fits = |v: &Rational| {
        let lo_ok = if lo.1 { *v > lo.0 } else { *v >= lo.0 };
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
    match eq {
        Some(e) => fits(&e),
        None => match &hi {
            None => true,
            Some((h, s)) => lo.0 < *h || (lo.0 == *h && !s && !lo.1),
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn projection_matches_extension_oracle(c in arb_poly(Context::new(1, 2), 4)) {
        let proj = c.eliminate(&[Variable::clock(0)]);
        for y in grid() {
            for z in grid() {
                let pt = vec![int(0), y.clone(), z.clone()];
                let expected = extension_exists(c.inequalities(), 0, &pt);
                prop_assert_eq!(proj.contains_point(&pt), expected, "at ({}, {})", y, z);
            }
        }
    }

    #[test]
    fn elapse_matches_delay_oracle(c in arb_poly(Context::new(1, 1), 3)) {
        let fut = c.time_elapse();
        // (x, p) is in the future iff some d in [0, x] has (x - d, p) in c
        for x in grid() {
            for p in grid() {
                // substitute w = x - d: atoms over (w, p) with w in [0, x]
                let mut atoms: Vec<Inequality> = c.inequalities().to_vec();
                atoms.push(Inequality::new(
                    vec![x.denom().clone(), BigInt::zero()],
                    -x.numer().clone(),
                    Relation::Le,
                ));
                let expected = extension_exists(&atoms, 0, &[int(0), p.clone()]);
                prop_assert_eq!(fut.contains_point(&[x.clone(), p.clone()]), expected);
            }
        }
    }

    #[test]
    fn emptiness_agrees_with_witnesses(c in arb_poly(Context::new(1, 2), 4)) {
        match c.sample_point() {
            Some(w) => prop_assert!(c.contains_point(&w)),
            None => {
                for x in grid() { for y in grid() { for z in grid() {
                    prop_assert!(!c.contains_point(&[x.clone(), y.clone(), z.clone()]));
                }}}
            }
        }
    }

    #[test]
    fn canonical_form_ignores_presentation(c in arb_poly(Context::new(1, 2), 4), extra in arb_row(3)) {
        let canon = c.canonicalize();
        prop_assert!(canon.equivalent(&c));
        let mut rows: Vec<Inequality> = c.inequalities().iter().rev().cloned().collect();
        rows.extend(c.inequalities().iter().cloned());
        let shuffled = poly(c.context(), rows);
        prop_assert_eq!(shuffled.canonicalize(), canon.clone());
        // adding an implied atom leaves the canonical form unchanged
        let weakened = c.with_atom(extra.clone());
        if weakened.equivalent(&c) {
            prop_assert_eq!(weakened.canonicalize(), canon);
        }
    }

    #[test]
    fn elapse_and_reset_are_idempotent(c in arb_poly(Context::new(2, 1), 3)) {
        let once = c.time_elapse();
        prop_assert_eq!(once.time_elapse(), once);
        let r = c.reset(&[Variable::clock(1)]);
        prop_assert_eq!(r.reset(&[Variable::clock(1)]), r);
    }

    #[test]
    fn complement_is_involutive_and_exact(
        parts in proptest::collection::vec(arb_poly(Context::new(0, 2), 2), 0..=2)
    ) {
        let ctx = Context::new(0, 2);
        let d = DisjunctiveConstraint::from_polyhedra(ctx, parts);
        let nd = d.complement();
        for a in grid() {
            for b in grid() {
                let v = [a.clone(), b.clone()];
                prop_assert_ne!(d.contains_point(&v), nd.contains_point(&v));
            }
        }
        prop_assert!(nd.complement().equivalent(&d));
    }
}
