use std::collections::HashSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Label, Lts, WeakOutcome};
use crate::error::Result;
use crate::terms::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: Term,
    pub label: Label<Term>,
    pub target: Term,
    pub tau_folded: usize,
}

impl Transition {
    pub fn to_json(&self) -> Value {
        json!({
            "state": self.state.to_string(),
            "label": self.label.to_json(),
            "target": self.target.to_string(),
            "tau_folded": self.tau_folded,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionGraph {
    /// Every state reached, in discovery order.
    pub states: Vec<Term>,
    pub transitions: Vec<Transition>,
    /// States discovered at the depth limit and left unexpanded.
    pub frontier: Vec<Term>,
    /// States whose transitions could not be computed within the fuel.
    pub exhausted: Vec<Term>,
}

impl TransitionGraph {
    /// One JSON object per transition, in the order they were found.
    pub fn json_lines(&self) -> Vec<String> {
        self.transitions.iter().map(|t| t.to_json().to_string()).collect()
    }

    pub fn text_lines(&self) -> Vec<String> {
        self.transitions
            .iter()
            .map(|t| {
                format!(
                    "{}  --{}-->  {}  (tau {})",
                    t.state, t.label, t.target, t.tau_folded
                )
            })
            .collect()
    }
}

struct Expansion {
    transitions: Vec<Transition>,
    exhausted: bool,
}

/// Outgoing weak transitions of one state. A reducible state has a single
/// τ transition to its normal form; a normal state has one per label.
fn expand(lts: &Lts, state: &Term, fuel: usize) -> Result<Expansion> {
    let mut out = Expansion {
        transitions: Vec::new(),
        exhausted: false,
    };
    for label in lts.labels(state)? {
        let outcome = if label.is_tau() {
            lts.weak_successor(state, &label, fuel)?
        } else {
            lts.fire_and_settle(state, &label, fuel)?
        };
        match outcome {
            WeakOutcome::Target { term, tau_steps } => out.transitions.push(Transition {
                state: state.clone(),
                label,
                target: term,
                tau_folded: tau_steps,
            }),
            WeakOutcome::FuelExhausted { .. } => out.exhausted = true,
            WeakOutcome::NotEnabled => {}
        }
    }
    Ok(out)
}

/// Breadth-first weak-transition closure of `root` up to `depth` levels.
/// States are identified by their printed form. Each level is expanded in
/// parallel and merged in order, so the result does not depend on
/// scheduling.
pub(crate) fn explore(lts: &Lts, root: &Term, depth: usize, fuel: usize) -> Result<TransitionGraph> {
    lts.check_state(root)?;
    let mut graph = TransitionGraph::default();
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(root.to_string());
    graph.states.push(root.clone());
    let mut level = vec![root.clone()];
    for _ in 0..depth {
        if level.is_empty() {
            break;
        }
        let expanded: Vec<Result<Expansion>> =
            level.par_iter().map(|s| expand(lts, s, fuel)).collect();
        let mut next = Vec::new();
        for (state, e) in level.iter().zip(expanded) {
            let e = e?;
            if e.exhausted {
                graph.exhausted.push(state.clone());
            }
            for t in e.transitions {
                if seen.insert(t.target.to_string()) {
                    graph.states.push(t.target.clone());
                    next.push(t.target.clone());
                }
                graph.transitions.push(t);
            }
        }
        level = next;
    }
    graph.frontier = level;
    Ok(graph)
}
