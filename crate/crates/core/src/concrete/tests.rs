use proptest::prelude::*;

use super::*;
use crate::constraints::{int, rat};
use crate::model::parse;
use crate::testutil::{corpus, CORPUS};

fn at(name: &str, v: &[Rational]) -> TraceAutomaton {
    let m = corpus(name).valuate(v).unwrap();
    build_trace_automaton(&m, BuildOptions::default()).unwrap()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

#[test]
fn equal_bounds_at_zero_reads_aa() {
    let ta = at("equal_bounds.pta", &ints(&[0, 0]));
    assert!(ta.reaches("l2"));
    assert!(!ta.has_action("b"));
    assert!(!ta.truncated);
    let open = at("equal_bounds.pta", &ints(&[0, 1]));
    assert!(open.has_action("b"));
    let cmp = trace_sets_equal(&ta, &at("equal_bounds.pta", &ints(&[1, 1]))).unwrap();
    assert!(cmp.equal, "{cmp:?}");
}

#[test]
fn lone_location_is_one_deadlock() {
    let m = parse("pta t; clocks x; actions a;\nlocation l { initial; }").unwrap();
    let ta = build_trace_automaton(&m, BuildOptions::default()).unwrap();
    assert_eq!(ta.states.len(), 1);
    assert!(ta.is_deadlock(0));
    assert!(!ta.empty);
    let dot = trace_automaton_dot(&ta);
    assert!(dot.contains("l | true"), "{dot}");
}

#[test]
fn unsatisfiable_initial_invariant_is_empty() {
    let m = parse("pta t; clocks x; actions a;\nlocation l { initial; invariant x < 0; }").unwrap();
    let ta = build_trace_automaton(&m, BuildOptions::default()).unwrap();
    assert!(ta.empty);
    assert_eq!(ta.states.len(), 1);
}

#[test]
fn parametric_models_are_refused() {
    let err = build_trace_automaton(&corpus("split.pta"), BuildOptions::default()).unwrap_err();
    assert_eq!(err, ConcreteError::Parametric(1));
}

#[test]
fn upper_counter_shortest_witness() {
    let one = at("upper_counter.pta", &ints(&[1]));
    let two = at("upper_counter.pta", &ints(&[2]));
    let cmp = trace_sets_equal(&one, &two).unwrap();
    assert!(!cmp.equal);
    assert_eq!(cmp.witness_word().as_deref(), Some("aa"));
    // U-monotonicity: fewer labels at the smaller value
    assert!(label_sets_contained(&one, &two).unwrap());
    assert!(!label_sets_contained(&two, &one).unwrap());
    let json = trace_automaton_json(&two);
    assert_eq!(json["truncated"], false);
    assert!(!json["states"].as_array().unwrap().is_empty());
}

#[test]
fn truncated_automata_are_not_compared() {
    let m = corpus("upper_counter.pta").valuate(&ints(&[3])).unwrap();
    let short = build_trace_automaton(
        &m,
        BuildOptions {
            depth: Some(1),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(short.truncated);
    let full = build_trace_automaton(&m, BuildOptions::default()).unwrap();
    assert_eq!(
        trace_sets_equal(&short, &full),
        Err(ConcreteError::Truncated)
    );
    assert_eq!(
        untimed_language_included(&full, &short, LanguageSemantics::Maximal),
        Err(ConcreteError::Truncated)
    );
}

#[test]
fn language_gap_inclusions() {
    let (p1, p2, p3) = (
        at("language_gap.pta", &ints(&[1])),
        at("language_gap.pta", &ints(&[2])),
        at("language_gap.pta", &ints(&[3])),
    );
    let max = LanguageSemantics::Maximal;
    assert!(untimed_language_included(&p1, &p3, max).unwrap().included);
    assert!(untimed_language_included(&p3, &p1, max).unwrap().included);
    let gap = untimed_language_included(&p2, &p1, max).unwrap();
    assert!(!gap.included);
    assert_eq!(gap.witness_word().as_deref(), Some("a"));
    assert!(untimed_language_included(&p1, &p2, max).unwrap().included);
    // the extra word is a prefix of a word both share
    assert!(
        untimed_language_included(&p2, &p1, LanguageSemantics::PrefixClosed)
            .unwrap()
            .included
    );
    // traces tell l2 from l3 even where the languages agree
    assert!(!trace_sets_equal(&p1, &p3).unwrap().equal);
}

#[test]
fn digital_runs_follow_the_guards() {
    let m = corpus("coffee.pta").valuate(&ints(&[1, 2, 3])).unwrap();
    let sim = DigitalSim::new(&m, 1).unwrap();
    let run = sim.find_run("l3").unwrap();
    let actions: Vec<&str> = run
        .steps
        .iter()
        .map(|s| m.actions[m.edges[s.edge].action].as_str())
        .collect();
    assert_eq!(actions, vec!["press", "cup"]);
    assert_eq!(run.steps[1].delay, int(2));
    assert_eq!(run.steps[1].valuation, ints(&[2, 2]));
    let eb = corpus("equal_bounds.pta")
        .valuate(&[rat(1, 2), rat(1, 2)])
        .unwrap();
    let run = DigitalSim::new(&eb, 1).unwrap().find_run("l2").unwrap();
    assert_eq!(run.duration(), rat(1, 2));
    let words = DigitalSim::new(&m, 1).unwrap().timed_words(2, &int(3));
    assert!(words.contains(&vec![("press".into(), int(0)), ("cup".into(), int(2))]));
    assert!(!words.contains(&vec![("press".into(), int(0)), ("cup".into(), int(1))]));
}

#[test]
fn digital_and_zone_reachability_agree_on_the_corpus() {
    for name in CORPUS {
        let pta = corpus(name);
        for k in 0..=3 {
            let m = pta.valuate(&vec![int(k); pta.params.len()]).unwrap();
            let ta = build_trace_automaton(&m, BuildOptions::default()).unwrap();
            let sim = DigitalSim::new(&m, m.clocks.len() as i64 + 1).unwrap();
            for l in &m.locations {
                assert_eq!(
                    ta.reaches(&l.name),
                    sim.find_run(&l.name).is_some(),
                    "{name} at {k}: {}",
                    l.name
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparisons_are_consistent(
        name in proptest::sample::select(CORPUS.to_vec()),
        a in proptest::collection::vec(0i64..4, 3),
        b in proptest::collection::vec(0i64..4, 3),
    ) {
        let pta = corpus(name);
        let n = pta.params.len();
        let ta = at(name, &ints(&a[..n]));
        let tb = at(name, &ints(&b[..n]));
        let ab = trace_sets_equal(&ta, &tb).unwrap();
        let ba = trace_sets_equal(&tb, &ta).unwrap();
        prop_assert_eq!(ab.equal, ba.equal);
        prop_assert!(trace_sets_equal(&ta, &ta).unwrap().equal);
        let max = untimed_language_included(&ta, &tb, LanguageSemantics::Maximal).unwrap();
        let pre = untimed_language_included(&ta, &tb, LanguageSemantics::PrefixClosed).unwrap();
        // every finite run extends to a maximal one
        if max.included {
            prop_assert!(pre.included);
        }
        if ab.equal {
            prop_assert!(max.included);
        }
        if let Some(w) = &max.witness {
            // a witness is shortest, so its strict prefixes are shared
            if !w.is_empty() {
                let shorter = untimed_language_included(&ta, &tb, LanguageSemantics::PrefixClosed).unwrap();
                if let Some(p) = shorter.witness {
                    prop_assert!(p.len() >= w.len());
                }
            }
        }
    }
}
