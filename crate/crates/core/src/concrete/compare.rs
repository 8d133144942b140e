use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{build_trace_automaton, BuildOptions, ConcreteError, Label, TraceAutomaton};
use crate::model::PtaModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceComparison {
    pub equal: bool,
    /// Shortest label sequence after which the two sides disagree, either
    /// on an enabled label (its last element) or on being deadlocked.
    pub witness: Option<Vec<Label>>,
}

impl TraceComparison {
    /// Actions of the witness as a word, e.g. `aa`.
    pub fn witness_word(&self) -> Option<String> {
        self.witness.as_ref().map(|w| {
            w.iter()
                .map(|l| l.action.as_str())
                .collect::<Vec<_>>()
                .concat()
        })
    }
}

type Joint = (Vec<usize>, Vec<usize>);

fn path_to<T: Clone>(parents: &HashMap<usize, (usize, T)>, mut node: usize) -> Vec<T> {
    let mut out = Vec::new();
    while let Some((p, l)) = parents.get(&node) {
        out.push(l.clone());
        node = *p;
    }
    out.reverse();
    out
}

/// Per-label successor sets of a set of states.
fn step(ta: &TraceAutomaton, set: &[usize]) -> BTreeMap<Label, BTreeSet<usize>> {
    let mut out: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
    for &s in set {
        for t in &ta.transitions[s] {
            out.entry(ta.label(t)).or_default().insert(t.target);
        }
    }
    out
}

fn refuse_truncated(a: &TraceAutomaton, b: &TraceAutomaton) -> Result<(), ConcreteError> {
    if a.truncated || b.truncated {
        Err(ConcreteError::Truncated)
    } else {
        Ok(())
    }
}

/// Equality of the sets of maximal traces (sequences of action and entered
/// location, infinite or ending in a deadlock).
///
/// Walks the subset product of both automata: the sets agree iff at every
/// reachable pair of state sets the enabled labels coincide and either both
/// or neither contain a deadlocked state.
pub fn trace_sets_equal(
    a: &TraceAutomaton,
    b: &TraceAutomaton,
) -> Result<TraceComparison, ConcreteError> {
    refuse_truncated(a, b)?;
    if a.location_name(a.initial()) != b.location_name(b.initial()) {
        return Ok(TraceComparison {
            equal: false,
            witness: Some(Vec::new()),
        });
    }
    let mut ids: HashMap<Joint, usize> = HashMap::new();
    let mut nodes: Vec<Joint> = Vec::new();
    let mut parents: HashMap<usize, (usize, Label)> = HashMap::new();
    let start: Joint = (vec![a.initial()], vec![b.initial()]);
    ids.insert(start.clone(), 0);
    nodes.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (sa, sb) = nodes[id].clone();
        let dead_a = sa.iter().any(|&s| a.is_deadlock(s));
        let dead_b = sb.iter().any(|&s| b.is_deadlock(s));
        if dead_a != dead_b {
            return Ok(TraceComparison {
                equal: false,
                witness: Some(path_to(&parents, id)),
            });
        }
        let na = step(a, &sa);
        let nb = step(b, &sb);
        let labels: BTreeSet<&Label> = na.keys().chain(nb.keys()).collect();
        for l in labels {
            let (Some(ta), Some(tb)) = (na.get(l), nb.get(l)) else {
                let mut w = path_to(&parents, id);
                w.push(l.clone());
                return Ok(TraceComparison {
                    equal: false,
                    witness: Some(w),
                });
            };
            let key: Joint = (ta.iter().copied().collect(), tb.iter().copied().collect());
            if !ids.contains_key(&key) {
                let nid = nodes.len();
                ids.insert(key.clone(), nid);
                nodes.push(key);
                parents.insert(nid, (id, l.clone()));
                queue.push_back(nid);
            }
        }
    }
    Ok(TraceComparison {
        equal: true,
        witness: None,
    })
}

/// Whether, along every label sequence readable in `a`, the labels enabled
/// in `a` are also enabled in `b`.
pub fn label_sets_contained(a: &TraceAutomaton, b: &TraceAutomaton) -> Result<bool, ConcreteError> {
    refuse_truncated(a, b)?;
    let mut seen: BTreeSet<Joint> = BTreeSet::new();
    let start: Joint = (vec![a.initial()], vec![b.initial()]);
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some((sa, sb)) = queue.pop_front() {
        let na = step(a, &sa);
        let nb = step(b, &sb);
        for (l, ta) in na {
            let Some(tb) = nb.get(&l) else {
                return Ok(false);
            };
            let key: Joint = (ta.into_iter().collect(), tb.iter().copied().collect());
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    Ok(true)
}

/// Which untimed words form a language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LanguageSemantics {
    /// Words of maximal runs: infinite ones and those ending in a deadlock.
    #[default]
    Maximal,
    /// Words of all finite runs.
    PrefixClosed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub included: bool,
    /// Shortest action word in the left language but not in the right.
    pub witness: Option<Vec<String>>,
}

impl Inclusion {
    pub fn witness_word(&self) -> Option<String> {
        self.witness.as_ref().map(|w| w.concat())
    }
}

fn action_step(ta: &TraceAutomaton, set: &[usize]) -> BTreeMap<String, BTreeSet<usize>> {
    let mut out: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for &s in set {
        for t in &ta.transitions[s] {
            out.entry(ta.action_names[t.action].clone())
                .or_default()
                .insert(t.target);
        }
    }
    out
}

/// Untimed language inclusion `L(a) ⊆ L(b)` on built trace automata.
///
/// Searches the product of single `a` states with sets of `b` states for
/// an action `a` can take and `b` cannot, or (maximal semantics) a deadlock
/// of `a` matched by no deadlock of `b`.
pub fn untimed_language_included(
    a: &TraceAutomaton,
    b: &TraceAutomaton,
    semantics: LanguageSemantics,
) -> Result<Inclusion, ConcreteError> {
    refuse_truncated(a, b)?;
    type Node = (usize, Vec<usize>);
    let mut ids: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut parents: HashMap<usize, (usize, String)> = HashMap::new();
    let start: Node = (a.initial(), vec![b.initial()]);
    ids.insert(start.clone(), 0);
    nodes.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (sa, sb) = nodes[id].clone();
        if semantics == LanguageSemantics::Maximal
            && a.is_deadlock(sa)
            && !sb.iter().any(|&s| b.is_deadlock(s))
        {
            return Ok(Inclusion {
                included: false,
                witness: Some(path_to(&parents, id)),
            });
        }
        let nb = action_step(b, &sb);
        for t in &a.transitions[sa] {
            let act = a.action_names[t.action].clone();
            let Some(tb) = nb.get(&act) else {
                let mut w = path_to(&parents, id);
                w.push(act);
                return Ok(Inclusion {
                    included: false,
                    witness: Some(w),
                });
            };
            let key: Node = (t.target, tb.iter().copied().collect());
            if !ids.contains_key(&key) {
                let nid = nodes.len();
                ids.insert(key.clone(), nid);
                nodes.push(key);
                parents.insert(nid, (id, act));
                queue.push_back(nid);
            }
        }
    }
    Ok(Inclusion {
        included: true,
        witness: None,
    })
}

/// Builds both trace automata and checks `L(a) ⊆ L(b)`.
pub fn model_language_included(
    a: &PtaModel,
    b: &PtaModel,
    semantics: LanguageSemantics,
    opts: BuildOptions,
) -> Result<Inclusion, ConcreteError> {
    let ta = build_trace_automaton(a, opts)?;
    let tb = build_trace_automaton(b, opts)?;
    untimed_language_included(&ta, &tb, semantics)
}
