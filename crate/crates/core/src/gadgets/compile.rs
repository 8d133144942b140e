//! The encodings. Main locations carry the machine state names; helper
//! locations append a `__` suffix.

use super::machine::{Counter, CounterMachine, Instruction};
use super::{one_location_transform, Builder, GadgetError};
use crate::model::PtaModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingKind {
    /// Tick clock `t`, counter clocks `x1, x2`, step clock `z`, one
    /// parameter `p`; counters are `x_i` whenever `t = 0`.
    Basic,
    /// Basic plus an entry choosing between `p = 0` and `p > 0`, and an
    /// `a`-loop after halting.
    Wrapper,
    /// Rational parameter `p ∈ (0, 1)`; counters are `1 - p·c_i` whenever `t = 0`.
    Robust,
    /// Parameters `p1, p2`; counters are `p1 - p2·c_i` whenever `t = 0`,
    /// every module takes at least `p1` time units.
    BoundedTime,
    /// The wrapper, delayed at both ends, collapsed to one location.
    OneLocation,
}

impl EncodingKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "basic" => EncodingKind::Basic,
            "wrapper" | "language_wrapper" => EncodingKind::Wrapper,
            "robust" => EncodingKind::Robust,
            "bounded" | "bounded_time" => EncodingKind::BoundedTime,
            "one_location" | "one-location" => EncodingKind::OneLocation,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EncodingKind::Basic => "basic",
            EncodingKind::Wrapper => "wrapper",
            EncodingKind::Robust => "robust",
            EncodingKind::BoundedTime => "bounded_time",
            EncodingKind::OneLocation => "one_location",
        }
    }
}

fn g(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

fn clock(c: Counter) -> &'static str {
    match c {
        Counter::C1 => "x1",
        Counter::C2 => "x2",
    }
}

fn other(c: Counter) -> Counter {
    match c {
        Counter::C1 => Counter::C2,
        Counter::C2 => Counter::C1,
    }
}

pub(crate) fn bar(s: &str) -> String {
    format!("{s}__bar")
}

pub(crate) fn one(s: &str) -> String {
    format!("{s}__one")
}

pub(crate) const INIT: &str = "__init";
pub(crate) const INF: &str = "__inf";
const PRE: &str = "__pre";

/// The step-counting encoding; `wrapper` adds the entry choice and the
/// halting loop, `delayed` a first delay and a delay on that loop.
fn basic(cm: &CounterMachine, wrapper: bool, delayed: bool) -> Builder {
    let mut b = Builder::new(
        if wrapper { "cm_wrapper" } else { "cm_basic" },
        &["t", "x1", "x2", "z"],
        &["p"],
        &["a"],
    );
    let inv = "t <= p & x1 <= p & x2 <= p & z <= p";
    let s0 = &cm.states[cm.initial()];
    if wrapper {
        if delayed {
            b.location(PRE, None);
            b.edge(PRE, INIT, "a", &g(&["t = 1"]), &["t", "x1", "x2", "z"]);
        }
        b.location(INIT, None);
        b.location(INF, None);
        b.edge(INIT, INF, "a", &g(&["t = 0", "t = p"]), &[]);
        b.edge(INIT, s0, "a", &g(&["t = 0", "t < p"]), &[]);
        let loop_guard = if delayed { g(&["t > 0"]) } else { Vec::new() };
        let loop_reset: &[&str] = if delayed { &["t"] } else { &[] };
        b.edge(INF, INF, "a", &loop_guard, loop_reset);
    }
    // main locations first so the machine's initial state is initial
    for s in &cm.states {
        b.location(s, Some(inv));
    }
    for s in &cm.states {
        b.location(&bar(s), Some(inv));
        b.location(&one(s), Some(inv));
    }
    for (i, s) in cm.states.iter().enumerate() {
        let (sb, so) = (bar(s), one(s));
        for c in ["x1", "x2", "t"] {
            b.edge(&sb, &sb, "a", &[format!("{c} = p")], &[c]);
        }
        for c in ["x1", "x2", "z"] {
            b.edge(&so, &so, "a", &[format!("{c} = p")], &[c]);
        }
        b.edge(
            &so,
            s,
            "a",
            &g(&["x1 < p", "x2 < p", "t = p", "z < p"]),
            &["t"],
        );
        match &cm.program[i] {
            Instruction::Halt => {
                if wrapper {
                    b.edge(s, INF, "a", &[], &[]);
                }
            }
            Instruction::Inc(k, j) => {
                b.edge(s, &sb, "a", &g(&["z = p - 1"]), &["z"]);
                let x = clock(*k);
                b.edge(
                    &sb,
                    &one(&cm.states[*j]),
                    "a",
                    &[format!("{x} = p - 1")],
                    &[x],
                );
            }
            Instruction::TestDec {
                counter,
                zero,
                nonzero,
            } => {
                b.edge(s, &sb, "a", &g(&["z = p - 1"]), &["z"]);
                let x = clock(*counter);
                b.edge(
                    &sb,
                    &one(&cm.states[*zero]),
                    "a",
                    &[format!("t = 0 & {x} = 0")],
                    &[],
                );
                b.edge(
                    &sb,
                    &one(&cm.states[*nonzero]),
                    "a",
                    &[format!("t != 1 & {x} = 1")],
                    &[x],
                );
            }
        }
    }
    b
}

/// A two-branch module: `first` and `second` are the two clock resets
/// `(clock, guard)`, taken in either order, then `exit` leaves for `target`.
fn module(
    b: &mut Builder,
    from: &str,
    tag: &str,
    first: (&str, String),
    second: (&str, String),
    exit: &str,
    target: &str,
) {
    let (up, low, mid) = (
        format!("{from}__{tag}up"),
        format!("{from}__{tag}low"),
        format!("{from}__{tag}mid"),
    );
    for l in [&up, &low, &mid] {
        b.location(l, None);
    }
    b.edge(from, &up, "a", std::slice::from_ref(&first.1), &[first.0]);
    b.edge(
        from,
        &low,
        "a",
        std::slice::from_ref(&second.1),
        &[second.0],
    );
    b.edge(&low, &mid, "a", &[first.1], &[first.0]);
    b.edge(&up, &mid, "a", &[second.1], &[second.0]);
    b.edge(&mid, target, "a", &[exit.to_string()], &["t"]);
}

fn robust(cm: &CounterMachine) -> Builder {
    let mut b = Builder::new("cm_robust", &["t", "x1", "x2"], &["p"], &["a"]);
    b.location(INIT, None);
    for s in &cm.states {
        b.location(s, None);
    }
    let s0 = &cm.states[cm.initial()];
    b.edge(
        INIT,
        s0,
        "a",
        &g(&["t = 1", "x1 = 1", "x2 = 1", "p > 0", "p < 1"]),
        &["t"],
    );
    for (i, s) in cm.states.iter().enumerate() {
        match &cm.program[i] {
            Instruction::Halt => {}
            Instruction::Inc(k, j) => {
                let (x, y) = (clock(*k), clock(other(*k)));
                let first = (x, format!("{x} = 1 + p & t <= 1"));
                let second = (y, format!("{y} = 1"));
                module(&mut b, s, "", first, second, "t = 1", &cm.states[*j]);
            }
            Instruction::TestDec {
                counter,
                zero,
                nonzero,
            } => {
                let (x, y) = (clock(*counter), clock(other(*counter)));
                b.edge(
                    s,
                    &cm.states[*zero],
                    "a",
                    &[format!("t = 0 & {x} = 1")],
                    &[],
                );
                let first = (x, format!("{x} = 1 - p & t <= 1"));
                let second = (y, format!("{y} = 1"));
                module(&mut b, s, "", first, second, "t = 1", &cm.states[*nonzero]);
            }
        }
    }
    b
}

fn bounded(cm: &CounterMachine) -> Builder {
    let mut b = Builder::new("cm_bounded", &["t", "x1", "x2"], &["p1", "p2"], &["a"]);
    b.location(INIT, None);
    for s in &cm.states {
        b.location(s, None);
    }
    let s0 = &cm.states[cm.initial()];
    b.edge(
        INIT,
        s0,
        "a",
        &g(&["t = p1", "x1 = p1", "x2 = p1", "p1 > 0"]),
        &["t"],
    );
    for (i, s) in cm.states.iter().enumerate() {
        match &cm.program[i] {
            Instruction::Halt => {}
            Instruction::Inc(k, j) => {
                let (x, y) = (clock(*k), clock(other(*k)));
                let first = (x, format!("{x} = p1 + p2"));
                let second = (y, format!("{y} = p1"));
                module(&mut b, s, "", first, second, "t = p1", &cm.states[*j]);
            }
            Instruction::TestDec {
                counter,
                zero,
                nonzero,
            } => {
                let (x, y) = (clock(*counter), clock(other(*counter)));
                // zero test: x is reset at once exactly when the counter is 0
                let first = (x, format!("{x} = p1"));
                let second = (y, format!("{y} = p1"));
                module(
                    &mut b,
                    s,
                    "z",
                    first,
                    second,
                    &format!("t = p1 & {x} = p1"),
                    &cm.states[*zero],
                );
                // decrement; `t > 0` keeps it from firing on a zero counter
                let first = (x, format!("{x} = p1 & t > 0"));
                let second = (y, format!("{y} = p1 + p2"));
                module(
                    &mut b,
                    s,
                    "d",
                    first,
                    second,
                    "t = p1 + p2",
                    &cm.states[*nonzero],
                );
            }
        }
    }
    b
}

/// Compiles a machine into the requested encoding.
pub fn compile(cm: &CounterMachine, kind: EncodingKind) -> Result<PtaModel, GadgetError> {
    match kind {
        EncodingKind::Basic => basic(cm, false, false).build(),
        EncodingKind::Wrapper => basic(cm, true, false).build(),
        EncodingKind::Robust => robust(cm).build(),
        EncodingKind::BoundedTime => bounded(cm).build(),
        EncodingKind::OneLocation => {
            let m = basic(cm, true, true).build()?;
            // with p > 0 no edge fires twice at one instant: every loop
            // resets the clock it tests and the exits need t = p
            let k = m.edges.len();
            one_location_transform(&m, k)
        }
    }
}
