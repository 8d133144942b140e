use std::fmt::Write as _;

use serde_json::{json, Value};

use super::TraceAutomaton;
use crate::constraints::{render_polyhedron, VarNames};

fn zone_text(ta: &TraceAutomaton, s: usize) -> String {
    let names = VarNames::new(&ta.clock_names, &[]);
    render_polyhedron(&ta.states[s].zone.to_polyhedron(ta.scale), &names)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; states are labelled `location | zone`.
pub fn trace_automaton_dot(ta: &TraceAutomaton) -> String {
    let mut out = String::from("digraph trace_automaton {\n  node [shape=box];\n");
    for s in 0..ta.states.len() {
        let label = format!("{} | {}", ta.location_name(s), zone_text(ta, s));
        let extra = if s == ta.initial() {
            ", penwidth=2"
        } else {
            ""
        };
        let _ = writeln!(out, "  s{s} [label=\"{}\"{extra}];", escape(&label));
    }
    for (s, ts) in ta.transitions.iter().enumerate() {
        for t in ts {
            let _ = writeln!(
                out,
                "  s{s} -> s{} [label=\"{}\"];",
                t.target,
                escape(&ta.action_names[t.action])
            );
        }
    }
    out.push_str("}\n");
    out
}

pub fn trace_automaton_json(ta: &TraceAutomaton) -> Value {
    let states: Vec<Value> = (0..ta.states.len())
        .map(|s| {
            json!({
                "id": s,
                "location": ta.location_name(s),
                "zone": zone_text(ta, s),
                "deadlock": ta.is_deadlock(s),
            })
        })
        .collect();
    let transitions: Vec<Value> = ta
        .transitions
        .iter()
        .enumerate()
        .flat_map(|(s, ts)| {
            ts.iter().map(move |t| {
                json!({
                    "source": s,
                    "target": t.target,
                    "action": ta.action_names[t.action],
                })
            })
        })
        .collect();
    json!({
        "initial": ta.initial(),
        "states": states,
        "transitions": transitions,
        "truncated": ta.truncated,
    })
}
