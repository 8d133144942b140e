use std::fmt::Write as _;

use super::PtaModel;
use crate::constraints::{render_polyhedron, Polyhedron, VarNames};

fn constraint_text(p: &Polyhedron, names: &VarNames) -> Option<String> {
    let s = render_polyhedron(p, names);
    (s != "true").then_some(s)
}

/// Model in the text format accepted by [`super::parse`].
pub fn render(m: &PtaModel) -> String {
    let names = m.names();
    let mut out = String::new();
    let _ = writeln!(out, "pta {};", m.name);
    if m.allow_diagonals {
        out.push_str("allow-diagonals;\n");
    }
    for (kw, list) in [
        ("clocks", &m.clocks),
        ("parameters", &m.params),
        ("actions", &m.actions),
    ] {
        if !list.is_empty() {
            let _ = writeln!(out, "{kw} {};", list.join(", "));
        }
    }
    out.push('\n');
    for l in &m.locations {
        let mut body = String::new();
        if l.id == m.initial {
            body.push_str(" initial;");
        }
        if let Some(inv) = constraint_text(&l.invariant, &names) {
            let _ = write!(body, " invariant {inv};");
        }
        let _ = writeln!(out, "location {} {{{} }}", l.name, body);
    }
    if !m.edges.is_empty() {
        out.push('\n');
    }
    for e in &m.edges {
        let mut body = format!(" sync {};", m.actions[e.action]);
        if let Some(g) = constraint_text(&e.guard, &names) {
            let _ = write!(body, " guard {g};");
        }
        if !e.resets.is_empty() {
            let resets: Vec<&str> = e.resets.iter().map(|&r| m.clocks[r].as_str()).collect();
            let _ = write!(body, " reset {};", resets.join(", "));
        }
        let _ = writeln!(
            out,
            "edge {} -> {} {{{} }}",
            m.locations[e.source].name, m.locations[e.target].name, body
        );
    }
    out
}
