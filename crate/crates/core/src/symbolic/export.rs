use std::fmt::Write as _;

use serde_json::{json, Value};

use super::ZoneGraph;
use crate::constraints::{polyhedron_json, render_polyhedron};
use crate::model::PtaModel;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; states are labelled with location and constraint.
pub fn zone_graph_dot(g: &ZoneGraph, m: &PtaModel) -> String {
    let mut out = String::from("digraph zone_graph {\n  node [shape=box];\n");
    for (i, s) in g.states.iter().enumerate() {
        let label = format!(
            "{} | {}",
            g.location_names[s.location],
            render_polyhedron(&s.constraint, &g.names)
        );
        let mut extra = String::new();
        if i == g.initial() {
            extra.push_str(", penwidth=2");
        }
        if g.pruned[i] {
            extra.push_str(", style=dashed");
        }
        let _ = writeln!(out, "  s{i} [label=\"{}\"{extra}];", escape(&label));
    }
    for t in &g.transitions {
        let action = &m.actions[m.edges[t.edge].action];
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"];",
            t.source,
            t.target,
            escape(action)
        );
    }
    out.push_str("}\n");
    out
}

pub fn zone_graph_json(g: &ZoneGraph, m: &PtaModel) -> Value {
    let states: Vec<Value> = g
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "id": i,
                "location": g.location_names[s.location],
                "constraint": render_polyhedron(&s.constraint, &g.names),
                "atoms": polyhedron_json(&s.constraint, &g.names),
                "depth": g.depth[i],
            })
        })
        .collect();
    let transitions: Vec<Value> = g
        .transitions
        .iter()
        .map(|t| {
            json!({
                "source": t.source,
                "target": t.target,
                "edge": t.edge,
                "action": m.actions[m.edges[t.edge].action],
            })
        })
        .collect();
    json!({
        "initial": g.initial(),
        "states": states,
        "transitions": transitions,
        "complete": g.complete(),
        "truncation": g.truncation.map(|t| format!("{t:?}").to_lowercase()),
    })
}
