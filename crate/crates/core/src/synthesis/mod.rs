//! Trace-preservation synthesis and the preservation questions built on it.


use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::concrete::{build_trace_automaton, trace_sets_equal, BuildOptions, ConcreteError};
use crate::constraints::{
    disjunctive_json, rational_json, render_disjunctive, DisjunctiveConstraint, Polyhedron,
    Rational, VarNames,
};
use crate::model::{ModelError, PtaModel};
use crate::symbolic::{explore_filtered, ExploreOptions, SymbolicError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("valuation has {got} values for {expected} parameters")]
    ValuationLength { expected: usize, got: usize },
    #[error("negative value for parameter `{0}`")]
    NegativeValue(String),
    #[error("model has {0} clocks; a one-clock model is required")]
    NotOneClock(usize),
    #[error("model is not deterministic")]
    Nondeterministic,
    #[error("parameters must be all lower or all upper bounds (found {0})")]
    NotLowerOrUpper(String),
    #[error("model has {0} parameters; exactly one is required")]
    ParameterCount(usize),
    #[error("parameter value {0} is not an integer")]
    NonInteger(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Concrete(#[from] ConcreteError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Outcome of one synthesis run; all constraints are over parameters only.
#[derive(Clone, Debug)]
pub struct TpsResult {
    /// Intersection of the projections of the compatible states.
    pub k_good: Polyhedron,
    /// Union of the projections of the incompatible states.
    pub k_bad: DisjunctiveConstraint,
    /// `k_good ∧ ¬k_bad`; only an answer when `terminated`.
    pub result: DisjunctiveConstraint,
    pub terminated: bool,
    pub states_explored: usize,
    /// The model is deterministic, so the result is the exact preserving set.
    pub complete_for_model: bool,
}

fn check_valuation(m: &PtaModel, v: &[Rational]) -> Result<(), SynthesisError> {
    if v.len() != m.params.len() {
        return Err(SynthesisError::ValuationLength {
            expected: m.params.len(),
            got: v.len(),
        });
    }
    if let Some(i) = v.iter().position(|x| x.is_negative()) {
        return Err(SynthesisError::NegativeValue(m.params[i].clone()));
    }
    Ok(())
}

/// Breadth-first synthesis of valuations with the same trace set as `v`.
///
/// Compatible states (`v` in their parameter projection) tighten `k_good`
/// and are expanded; incompatible ones widen `k_bad` and are not expanded.
pub fn tps(
    m: &PtaModel,
    v: &[Rational],
    opts: ExploreOptions,
) -> Result<TpsResult, SynthesisError> {
    check_valuation(m, v)?;
    let pctx = m.context().params_only();
    let mut k_good = Polyhedron::universe(pctx);
    let mut bad = Vec::new();
    let g = explore_filtered(m, opts, |_, s| {
        let proj = s.parameter_constraint();
        if proj.contains_point(v) {
            k_good = k_good.intersect(&proj);
            true
        } else {
            bad.push(proj);
            false
        }
    })?;
    let k_bad = DisjunctiveConstraint::from_polyhedra(pctx, bad).drop_subsumed();
    let result =
        DisjunctiveConstraint::from_polyhedron(k_good.clone()).intersect(&k_bad.complement());
    Ok(TpsResult {
        k_good,
        k_bad,
        result,
        terminated: g.complete(),
        states_explored: g.states.len(),
        complete_for_model: m.classify().deterministic,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    Trace,
    Language,
}

impl Question {
    pub fn as_str(&self) -> &'static str {
        match self {
            Question::Trace => "trace",
            Question::Language => "language",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        }
    }
}

pub const SOUND_NOT_COMPLETE: &str = "sound, not complete";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub time_ms: u128,
    pub terminated: bool,
}

/// Answer to "does another valuation behave like `v`?".
#[derive(Clone, Debug)]
pub struct PreservationVerdict {
    pub question: Question,
    pub answer: Answer,
    /// A valuation other than `v` with the same behaviour; present iff yes.
    pub witness: Option<Vec<Rational>>,
    pub constraint: Option<DisjunctiveConstraint>,
    pub caveat: Option<String>,
    pub stats: Stats,
}

/// Some point of `c` other than `v`, preferring the disjuncts around `v`.
fn other_point(c: &DisjunctiveConstraint, v: &[Rational]) -> Option<Vec<Rational>> {
    if let Ok(Some(w)) = c.contains_other_point(v) {
        return Some(w);
    }
    c.disjuncts()
        .iter()
        .filter(|d| !d.contains_point(v))
        .find_map(|d| d.sample_point())
}

fn verdict_from_tps(
    m: &PtaModel,
    v: &[Rational],
    question: Question,
    opts: ExploreOptions,
    robust: bool,
) -> Result<PreservationVerdict, SynthesisError> {
    let start = Instant::now();
    let r = tps(m, v, opts)?;
    let stats = Stats {
        states: r.states_explored,
        time_ms: start.elapsed().as_millis(),
        terminated: r.terminated,
    };
    let caveat = (!r.complete_for_model).then(|| SOUND_NOT_COMPLETE.to_string());
    if !r.terminated {
        return Ok(PreservationVerdict {
            question,
            answer: Answer::Unknown,
            witness: None,
            constraint: None,
            caveat,
            stats,
        });
    }
    let witness = if robust {
        r.result
            .contains_other_point(v)
            .expect("reference valuation is in the result")
    } else {
        other_point(&r.result, v)
    };
    // without determinism a missing witness proves nothing
    let answer = match (&witness, r.complete_for_model) {
        (Some(_), _) => Answer::Yes,
        (None, true) => Answer::No,
        (None, false) => Answer::Unknown,
    };
    Ok(PreservationVerdict {
        question,
        answer,
        witness,
        constraint: Some(r.result),
        caveat,
        stats,
    })
}

fn require_one_clock(m: &PtaModel) -> Result<(), SynthesisError> {
    match m.clocks.len() {
        1 => Ok(()),
        n => Err(SynthesisError::NotOneClock(n)),
    }
}

/// Preservation for one-clock models, where synthesis always terminates.
///
/// On deterministic models trace and language preservation coincide and
/// the answer is exact; otherwise only a positive answer is conclusive.
pub fn preserve_1c(
    m: &PtaModel,
    v: &[Rational],
    question: Question,
) -> Result<PreservationVerdict, SynthesisError> {
    require_one_clock(m)?;
    verdict_from_tps(m, v, question, ExploreOptions::unbounded(), false)
}

/// Like [`preserve_1c`], but the witness lies in a convex part of the
/// preserving set that contains `v`, so the whole segment preserves.
pub fn preserve_robust_1c(
    m: &PtaModel,
    v: &[Rational],
) -> Result<PreservationVerdict, SynthesisError> {
    require_one_clock(m)?;
    verdict_from_tps(m, v, Question::Trace, ExploreOptions::unbounded(), true)
}

/// Preservation through capped synthesis for arbitrary models.
pub fn preserve_general(
    m: &PtaModel,
    v: &[Rational],
    question: Question,
    opts: ExploreOptions,
    robust: bool,
) -> Result<PreservationVerdict, SynthesisError> {
    verdict_from_tps(m, v, question, opts, robust)
}

/// Decision for deterministic models with a single integer parameter that
/// is only a lower or only an upper bound: behaviour grows monotonically in
/// the parameter, so it suffices to compare with `v - 1` and `v + 1`.
pub fn preserve_lu_1ip(
    m: &PtaModel,
    v: &Rational,
    question: Question,
    opts: BuildOptions,
) -> Result<PreservationVerdict, SynthesisError> {
    let start = Instant::now();
    let class = m.classify();
    if m.params.len() != 1 {
        return Err(SynthesisError::ParameterCount(m.params.len()));
    }
    if !class.deterministic {
        return Err(SynthesisError::Nondeterministic);
    }
    if !(class.lu.is_l() || class.lu.is_u()) {
        return Err(SynthesisError::NotLowerOrUpper(class.lu.label().into()));
    }
    if !v.is_integer() {
        return Err(SynthesisError::NonInteger(
            crate::constraints::format_rational(v),
        ));
    }
    check_valuation(m, std::slice::from_ref(v))?;
    let build = |x: &Rational| -> Result<_, SynthesisError> {
        Ok(build_trace_automaton(
            &m.valuate(std::slice::from_ref(x))?,
            opts,
        )?)
    };
    let here = build(v)?;
    let mut states = here.states.len();
    let one = Rational::from_integer(BigInt::from(1));
    let mut neighbours = vec![v + &one];
    if *v >= one {
        neighbours.push(v - &one);
    }
    let mut truncated = here.truncated;
    let mut witness = None;
    for n in neighbours {
        let there = build(&n)?;
        states += there.states.len();
        if here.truncated || there.truncated {
            truncated = true;
            continue;
        }
        if trace_sets_equal(&here, &there)?.equal {
            witness = Some(vec![n]);
            break;
        }
    }
    let answer = match (&witness, truncated) {
        (Some(_), _) => Answer::Yes,
        (None, false) => Answer::No,
        (None, true) => Answer::Unknown,
    };
    Ok(PreservationVerdict {
        question,
        answer,
        witness,
        constraint: None,
        caveat: None,
        stats: Stats {
            states,
            time_ms: start.elapsed().as_millis(),
            terminated: !truncated,
        },
    })
}

/// `{question, answer, witness, constraint, stats}`; `names` are the
/// parameter names.
pub fn verdict_json(v: &PreservationVerdict, names: &VarNames) -> Value {
    let witness = v.witness.as_ref().map(|w| {
        let mut obj = Map::new();
        for (i, x) in w.iter().enumerate() {
            obj.insert(names.name(i).to_string(), rational_json(x));
        }
        Value::Object(obj)
    });
    let mut out = json!({
        "question": v.question.as_str(),
        "answer": v.answer.as_str(),
        "witness": witness,
        "constraint": v.constraint.as_ref().map(|c| disjunctive_json(c, names)),
        "constraint_text": v.constraint.as_ref().map(|c| render_disjunctive(c, names)),
        "stats": {
            "states": v.stats.states,
            "time_ms": v.stats.time_ms as u64,
            "terminated": v.stats.terminated,
        },
    });
    if let Some(c) = &v.caveat {
        out["caveat"] = json!(c);
    }
    out
}
