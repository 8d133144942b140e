use super::*;
use crate::constraints::{int, rat, render_polyhedron};
use crate::testutil::{corpus, CORPUS};

#[test]
fn coffee_machine_shape() {
    let m = corpus("coffee.pta");
    assert_eq!(m.locations.len(), 3);
    assert_eq!(m.clocks.len(), 2);
    assert_eq!(m.params.len(), 3);
    assert_eq!(m.edges.len(), 4);
    assert_eq!(m.locations[m.initial].name, "l1");
    let c = m.classify();
    assert!(c.deterministic);
    assert_eq!(c.clock_count, 2);
    assert_eq!(c.parameter_count, 3);
    assert_eq!(c.fragment, Fragment::Atomic);
}

#[test]
fn empty_body_is_true_invariant() {
    let m = parse("pta t; clocks x; actions a;\nlocation l { initial; }\nlocation k {}\n").unwrap();
    assert!(m.locations[0].invariant.is_universe());
    assert!(m.locations[1].invariant.is_universe());
}

#[test]
fn disequality_guards_split_edges() {
    let src = "pta t; clocks t, x; actions a;
location s { initial; }
location u { }
edge s -> u { sync a; guard t != 1 & x = 1; reset x; }
";
    let m = parse(src).unwrap();
    assert_eq!(m.edges.len(), 2);
    let names = m.names();
    let texts: Vec<String> = m
        .edges
        .iter()
        .map(|e| render_polyhedron(&e.guard, &names))
        .collect();
    assert_eq!(texts, vec!["t < 1 & x = 1", "t > 1 & x = 1"]);
    assert!(m.edges.iter().all(|e| e.resets == vec![1]));
    // the two copies cover the original guard's point set
    for t in 0..=4 {
        for x in 0..=2 {
            let v = [rat(t, 2), int(x)];
            let original = rat(t, 2) != int(1) && int(x) == int(1);
            let covered = m
                .edges
                .iter()
                .filter(|e| e.guard.contains_point(&v))
                .count();
            assert_eq!(covered == 1, original);
            assert!(covered <= 1);
        }
    }
}

#[test]
fn disequality_rejected_in_invariants() {
    let err = parse("pta t; clocks x; actions a;\nlocation l { initial; invariant x != 1; }")
        .unwrap_err();
    assert!(matches!(err, ModelError::Syntax { line: 2, .. }), "{err}");
}

#[test]
fn errors_carry_positions() {
    let err = parse("pta t;\nclocks x;\nlocation l { initial; invariant y <= 1; }").unwrap_err();
    assert_eq!(
        err,
        ModelError::Undeclared {
            line: 3,
            col: 33,
            name: "y".into()
        }
    );
    let err =
        parse("pta t; clocks x; parameters p;\nlocation l { initial; invariant x * p <= 1; }")
            .unwrap_err();
    assert_eq!(err, ModelError::NonLinear { line: 2, col: 33 });
    let err = parse("pta t; clocks x\nlocation l { }").unwrap_err();
    assert!(
        matches!(
            err,
            ModelError::Syntax {
                line: 2,
                col: 1,
                ..
            }
        ),
        "{err}"
    );
    let err =
        parse("pta t; clocks x; actions a;\nlocation l { initial; }\nedge l -> m { sync a; }")
            .unwrap_err();
    assert!(
        matches!(
            err,
            ModelError::Undeclared {
                line: 3,
                col: 11,
                ..
            }
        ),
        "{err}"
    );
    let err =
        parse("pta t; clocks x; actions a;\nlocation l { initial; }\nedge l -> l { guard x = 1; }")
            .unwrap_err();
    assert!(
        matches!(
            err,
            ModelError::Syntax {
                line: 3,
                col: 1,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn diagonals_need_the_header_flag() {
    let body = "clocks x, y; actions a;\nlocation l { initial; invariant x - y <= 1; }";
    assert!(parse(&format!("pta t; {body}")).is_err());
    let m = parse(&format!("pta t; allow-diagonals; {body}")).unwrap();
    assert!(m.classify().has_diagonal_guards);
    assert_eq!(m.classify().fragment, Fragment::Diagonal);
    assert!(parse("pta t; allow-diagonals; clocks x, y; actions a;\nlocation l { initial; invariant x + y <= 1; }").is_err());
}

#[test]
fn linear_terms_accept_products_with_constants() {
    let m = parse(
        "pta t; clocks x; parameters p, q; actions a;
location l { initial; invariant x <= 2*p + q*3 - (p - 1); }",
    )
    .unwrap();
    let names = m.names();
    assert_eq!(
        render_polyhedron(&m.locations[0].invariant, &names),
        "x <= p + 3*q + 1"
    );
    assert_eq!(m.classify().fragment, Fragment::Linear);
}

#[test]
fn determinism_and_bound_sides() {
    let split = corpus("split.pta");
    assert!(!split.classify().deterministic);
    let gadget = corpus("equal_bounds.pta").classify();
    assert_eq!(gadget.lu.lower, vec!["pl".to_string()]);
    assert_eq!(gadget.lu.upper, vec!["pu".to_string()]);
    assert_eq!(gadget.lu.label(), "L/U");
    assert!(corpus("lower_counter.pta").classify().lu.is_l());
    assert!(corpus("upper_counter.pta").classify().lu.is_u());
    assert!(corpus("unused_upper.pta").classify().lu.is_u());
    assert!(!corpus("language_gap.pta").classify().deterministic);
    let coffee = corpus("coffee.pta").classify();
    // p2 and p3 appear in equalities, so they sit on both sides
    assert_eq!(coffee.lu.label(), "neither");
    assert_eq!(
        coffee.parametric_clocks,
        vec!["x".to_string(), "y".to_string()]
    );
}

#[test]
fn valuation_substitutes_constants() {
    let m = corpus("coffee.pta");
    let ta = m.valuate(&[int(1), int(2), int(3)]).unwrap();
    assert_eq!(ta.params.len(), 0);
    assert_eq!(ta.classify().parameter_count, 0);
    let names = ta.names();
    assert_eq!(
        render_polyhedron(&ta.locations[1].invariant, &names),
        "y <= 2"
    );
    assert_eq!(render_polyhedron(&ta.edges[1].guard, &names), "x >= 1");
    let half = m.valuate(&[rat(1, 2), int(2), int(3)]).unwrap();
    assert_eq!(render_polyhedron(&half.edges[1].guard, &names), "2*x >= 1");
    assert!(m.valuate(&[int(-1), int(2), int(3)]).is_err());
    assert!(m.valuate(&[int(1)]).is_err());
    let plain = ta.valuate(&[]).unwrap();
    assert_eq!(plain, ta);
}

#[test]
fn corpus_round_trips_through_text() {
    for name in CORPUS {
        let m = corpus(name);
        let text = render(&m);
        let again = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(render(&again), text, "{name}");
        assert_eq!(again.edges.len(), m.edges.len());
        for (a, b) in m.edges.iter().zip(&again.edges) {
            assert!(a.guard.equivalent(&b.guard), "{name}");
        }
        assert_eq!(
            m.valuate(&vec![int(1); m.params.len()])
                .unwrap()
                .classify()
                .parameter_count,
            0
        );
    }
}
