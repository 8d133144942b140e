use super::*;
use crate::concrete::DigitalSim;
use crate::constraints::{int, rat, Rational};
use crate::model::parse;

const TWO_INC: &str = "state s0; inc c1 goto s1;\nstate s1; inc c2 goto h;\nhalt h;\n";

// s0 -> s1 (c1 = 1) -> s1 (c1 = 0) -> h
const COUNTDOWN: &str = "
    state s0; inc c1 goto s1;   # load
    state s1; tdec c1 zero h else s1;
    halt h;
";

fn cm(text: &str) -> CounterMachine {
    CounterMachine::parse(text).unwrap()
}

#[test]
fn machine_parses_and_runs() {
    let m = cm(COUNTDOWN);
    assert_eq!(m.states, ["s0", "s1", "h"]);
    assert_eq!(m.halt, 2);
    let run = m.simulate(100);
    assert!(run.halted);
    assert_eq!(run.trace, [(0, 0, 0), (1, 1, 0), (1, 0, 0), (2, 0, 0)]);
    assert_eq!(run.length(), 4);
    assert_eq!(run.max_counter(), 1);
    assert_eq!(CounterMachine::parse(&m.render()).unwrap(), m);

    let two = cm(TWO_INC).simulate(10);
    assert_eq!((two.length(), two.max_counter()), (3, 1));
}

#[test]
fn machine_errors_carry_lines() {
    let bad = |t: &str| match CounterMachine::parse(t) {
        Err(GadgetError::Machine { line, .. }) => line,
        other => panic!("expected an error, got {other:?}"),
    };
    assert_eq!(bad("state s0; inc c3 goto h;\nhalt h;"), 1);
    assert_eq!(bad("halt h;\nstate s0;"), 2);
    assert_eq!(bad("state s0; inc c1 goto q;\nhalt h;"), 0);
    assert_eq!(bad("state a__b; inc c1 goto h; halt h;"), 1);
    assert_eq!(bad("state s0; inc c1 goto h;"), 0);
}

#[test]
fn basic_encoding_shape() {
    let m = compile(&cm(TWO_INC), EncodingKind::Basic).unwrap();
    let class = m.classify();
    assert_eq!(class.parametric_clocks.len(), 4);
    assert_eq!(m.params, ["p"]);
    assert_eq!(m.locations[m.initial].name, "s0");
    assert_eq!(m.locations.len(), 9);
    // a machine state has a main, a bar and a one location
    assert!(m.location_by_name("s1__bar").is_some() && m.location_by_name("h__one").is_some());
}

#[test]
fn robust_encoding_guards() {
    let m = compile(&cm(TWO_INC), EncodingKind::Robust).unwrap();
    let text = crate::model::render(&m);
    assert!(text.contains("x1 = p + 1"), "{text}");
    assert!(text.contains("x2 = 1"), "{text}");
    assert_eq!(m.params, ["p"]);
    assert_eq!(m.clocks, ["t", "x1", "x2"]);
}

#[test]
fn encodings_replay_the_machine() {
    for (src, n, c) in [(TWO_INC, 3, 2), (COUNTDOWN, 4, 1)] {
        let machine = cm(src);
        for kind in [
            EncodingKind::Basic,
            EncodingKind::Wrapper,
            EncodingKind::Robust,
            EncodingKind::BoundedTime,
        ] {
            let r = validate_encoding(&machine, kind, n, c, ValidationOptions::default()).unwrap();
            assert!(r.concrete_reached, "{kind:?} on {src}");
            assert!(r.correspondence_ok, "{kind:?} on {src}");
            assert_eq!(r.symbolic_reached, Some(true), "{kind:?} on {src}");
            assert_eq!(r.projection_contains, Some(true), "{kind:?} on {src}");
            assert!(r.ok());
        }
    }
}

#[test]
fn bounded_encoding_fits_in_one_time_unit() {
    let r = validate_encoding(
        &cm(TWO_INC),
        EncodingKind::BoundedTime,
        3,
        2,
        ValidationOptions::default(),
    )
    .unwrap();
    assert_eq!(r.valuation, [rat(2, 9), rat(1, 9)]);
    assert!(r.duration.unwrap() <= int(1));
}

#[test]
fn ground_truth_is_checked() {
    let looping = cm("state s0; inc c1 goto s0;\nhalt h;");
    let err = validate_encoding(
        &looping,
        EncodingKind::Basic,
        5,
        10,
        ValidationOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, GadgetError::GroundTruth(_)));
    let err = validate_encoding(
        &cm(TWO_INC),
        EncodingKind::Basic,
        2,
        2,
        ValidationOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, GadgetError::GroundTruth(_)));
    let err = validate_encoding(
        &cm(TWO_INC),
        EncodingKind::OneLocation,
        3,
        2,
        ValidationOptions::default(),
    );
    assert!(matches!(err, Err(GadgetError::Unsupported(_))));
}

#[test]
fn wrapper_separates_zero_from_positive() {
    let m = compile(&cm(TWO_INC), EncodingKind::Wrapper).unwrap();
    assert_eq!(m.locations[m.initial].name, "__init");
    let at = |p: i64| DigitalSim::new(&m.valuate(&[int(p)]).unwrap(), 1).unwrap();
    let zero = at(0);
    assert!(zero.find_run("__inf").is_some());
    assert!(zero.find_run("s0").is_none());
    let four = at(4);
    assert!(four.find_run("h").is_some());
    // past the halting location the loop is always enabled
    let r = four.find_run("__inf").unwrap();
    assert!(r
        .steps
        .iter()
        .any(|s| m.locations[m.edges[s.edge].target].name == "h"));
}

#[test]
fn one_location_encoding_compiles() {
    let m = compile(&cm(TWO_INC), EncodingKind::OneLocation).unwrap();
    assert_eq!(m.locations.len(), 1);
    assert!(m.allow_diagonals);
    let wrapper_edges = 3 + 7 * 3 + 2 + 1;
    assert!(m.edges.len() >= wrapper_edges);
}

const STEP: &str = "
pta step;
clocks x;
actions a;
location l0 { initial; }
location l1 { }
edge l0 -> l1 { sync a; guard x >= 1; }
";

// two actions may share an instant
const BURST: &str = "
pta burst;
clocks x;
actions a, b;
location l0 { initial; }
location l1 { }
location l2 { invariant x <= 1; }
edge l0 -> l1 { sync a; guard x >= 1; reset x; }
edge l1 -> l2 { sync b; guard x = 0; }
edge l2 -> l0 { sync a; guard x >= 1; reset x; }
";

fn words(
    m: &crate::model::PtaModel,
    len: usize,
    horizon: i64,
) -> std::collections::BTreeSet<Vec<(String, Rational)>> {
    DigitalSim::new(m, 2)
        .unwrap()
        .timed_words(len, &int(horizon))
}

#[test]
fn one_location_adds_clocks() {
    let m = parse(STEP).unwrap();
    let one = one_location_transform(&m, 1).unwrap();
    assert_eq!(one.locations.len(), 1);
    assert_eq!(one.clocks.len(), m.clocks.len() + 4);
    assert_eq!(
        one_location_transform(&m, 0).unwrap_err(),
        GadgetError::ZeroDelayBound
    );
    let two = one_location_transform(&m, 3).unwrap();
    assert_eq!(two.clocks.len(), m.clocks.len() + 3 * 2 + 2);
}

#[test]
fn one_location_keeps_timed_words() {
    let m = parse(STEP).unwrap();
    let one = one_location_transform(&m, 1).unwrap();
    assert_eq!(words(&m, 4, 3), words(&one, 4, 3));

    let m = parse(BURST).unwrap();
    let two = one_location_transform(&m, 2).unwrap();
    let original = words(&m, 4, 3);
    assert!(original.iter().any(|w| w.len() >= 2 && w[0].1 == w[1].1));
    assert_eq!(original, words(&two, 4, 3));
    // with one action per instant the zero-delay `b` is lost
    let one = words(&one_location_transform(&m, 1).unwrap(), 4, 3);
    assert!(one.is_subset(&original) && one.len() < original.len());
}
