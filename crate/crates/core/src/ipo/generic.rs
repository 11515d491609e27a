//! Labels derived by unifying rule left-hand sides with the state.
//!
//! For the lazy strategy the reactive contexts are `[ ]_θ Y1..Yk`; the
//! redex must sit at the head of the spine. For a state whose spine bottom
//! is a metavariable `x`, the head redex may lie inside `θ(x)`, so `x` is
//! first expanded to `x' W1..Wj`. For cbv the contexts are `[ ]`, `[ ] Y`,
//! `L [ ]` and `L [ ] Y`, and the redex is found along the evaluation path.
//! Candidates whose plugged term merely extends another candidate's plugged
//! term by trailing fresh arguments are not minimal and are discarded.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use super::label::{canonicalize, sort_labels, Label};
use crate::reduction::Strategy;
use crate::terms::{ClTerm, Meta, Substitution};
use crate::unify::mgu;

/// Appended arguments tried beyond the state's own spine. Every rule's
/// function part is a combinator form, never an application, so a rule can
/// only match a spine prefix of length at most one; a second appended
/// argument could never take part in the redex.
const MAX_APPENDED: usize = 1;

fn m(name: String) -> ClTerm {
    ClTerm::Meta(Meta::new(&name))
}

/// Left-hand sides of the five CL* rules, with internal variable names.
fn rule_lhs() -> &'static [ClTerm] {
    static LHS: OnceLock<Vec<ClTerm>> = OnceLock::new();
    LHS.get_or_init(|| {
        let r = |i: usize| m(format!("#r{i}"));
        [
            ClTerm::K,
            ClTerm::kp(r(1)),
            ClTerm::S,
            ClTerm::sp(r(1)),
            ClTerm::spp(r(1), r(2)),
        ]
        .into_iter()
        .map(|h| ClTerm::app(h, r(0)))
        .collect()
    })
}

fn appended(k: usize) -> Vec<ClTerm> {
    (1..=k).map(|i| m(format!("#a{i}"))).collect()
}

struct Candidate {
    label: Label<ClTerm>,
    plugged: ClTerm,
}

/// Equality up to a bijective renaming of the metavariables outside
/// `state`.
fn same_shape(a: &ClTerm, b: &ClTerm, state: &BTreeSet<Meta>) -> bool {
    fn go<'t>(a: &'t ClTerm, b: &'t ClTerm, state: &BTreeSet<Meta>, map: &mut Vec<(&'t Meta, &'t Meta)>) -> bool {
        match (a, b) {
            (ClTerm::K, ClTerm::K) | (ClTerm::S, ClTerm::S) => true,
            (ClTerm::Meta(x), ClTerm::Meta(y)) => {
                if state.contains(x) || state.contains(y) {
                    return x == y;
                }
                match map.iter().find(|(p, q)| *p == x || *q == y) {
                    Some((p, q)) => *p == x && *q == y,
                    None => {
                        map.push((x, y));
                        true
                    }
                }
            }
            (ClTerm::Kp(p), ClTerm::Kp(q)) | (ClTerm::Sp(p), ClTerm::Sp(q)) => go(p, q, state, map),
            (ClTerm::Spp(p1, p2), ClTerm::Spp(q1, q2)) | (ClTerm::App(p1, p2), ClTerm::App(q1, q2)) => {
                go(p1, q1, state, map) && go(p2, q2, state, map)
            }
            _ => false,
        }
    }
    go(a, b, state, &mut Vec::new())
}

fn count_meta(t: &ClTerm, x: &Meta) -> usize {
    t.metavars().iter().filter(|v| *v == x).count()
}

/// `t` with its last `n` arguments removed, provided each is a fresh
/// metavariable occurring exactly once in `t`.
fn strip_fresh_tail(t: &ClTerm, n: usize, state: &BTreeSet<Meta>) -> Option<ClTerm> {
    let mut cur = t.clone();
    for _ in 0..n {
        let ClTerm::App(f, a) = &cur else { return None };
        match &**a {
            ClTerm::Meta(v) if !state.contains(v) && count_meta(t, v) == 1 => {}
            _ => return None,
        }
        cur = (**f).clone();
    }
    Some(cur)
}

fn spine_len(t: &ClTerm) -> usize {
    t.spine().1.len()
}

fn minimal(cands: Vec<Candidate>, state: &BTreeSet<Meta>) -> Vec<Label<ClTerm>> {
    let extends_another = |c: &Candidate| {
        (1..=spine_len(&c.plugged)).any(|n| {
            strip_fresh_tail(&c.plugged, n, state).is_some_and(|core| {
                cands.iter().any(|o| same_shape(&core, &o.plugged, state))
            })
        })
    };
    let keep: Vec<bool> = cands.iter().map(|c| !extends_another(c)).collect();
    cands
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c.label))
        .collect()
}

fn lazy_candidates(state: &ClTerm, pruned: bool, arg_bound: usize) -> Vec<Candidate> {
    let metas = state.free_metavars();
    let bottom_meta = match state.spine().0 {
        ClTerm::Meta(x) => Some(x.clone()),
        _ => None,
    };
    let max_j = if bottom_meta.is_some() { arg_bound } else { 0 };
    let mut out = Vec::new();
    for k in 0..=MAX_APPENDED {
        let extra = appended(k);
        for j in 0..=max_j {
            let sigma = match &bottom_meta {
                Some(x) if j > 0 => Substitution::singleton(
                    x.clone(),
                    ClTerm::apply_all(m("#x".into()), (1..=j).map(|i| m(format!("#w{i}")))),
                ),
                _ => Substitution::new(),
            };
            let t = ClTerm::apply_all(sigma.apply(state), extra.iter().cloned());
            let (b, args) = t.spine();
            for i in 0..=args.len().min(1) {
                // With j > 0, matching the bare `x'` would only repeat an
                // expansion by j + 1 arguments.
                if (j > 0 && i == 0) || (pruned && bottom_meta.is_some() && i <= j) {
                    continue;
                }
                let prefix = ClTerm::apply_all(b.clone(), args[..i].iter().map(|a| (*a).clone()));
                for lhs in rule_lhs() {
                    let Ok(theta) = mgu(lhs, &prefix) else { continue };
                    let full = sigma.then(&theta);
                    out.push(Candidate {
                        label: Label {
                            subst: full.restrict(|v| metas.contains(v)),
                            left: None,
                            args: extra.iter().map(|a| theta.apply(a)).collect(),
                        },
                        plugged: theta.apply(&t),
                    });
                }
            }
        }
    }
    out
}

/// The subterm where the next cbv reaction must happen, if any: the first
/// application along the evaluation path whose two sides are values.
fn cbv_site(t: &ClTerm) -> Option<&ClTerm> {
    match t {
        ClTerm::K | ClTerm::S | ClTerm::Meta(_) => None,
        ClTerm::Kp(a) | ClTerm::Sp(a) => cbv_site(a),
        ClTerm::Spp(a, b) => {
            if !a.is_cbv_value() {
                cbv_site(a)
            } else {
                cbv_site(b)
            }
        }
        ClTerm::App(f, a) => {
            if !f.is_cbv_value() {
                cbv_site(f)
            } else if !a.is_cbv_value() {
                cbv_site(a)
            } else {
                Some(t)
            }
        }
    }
}

fn cbv_candidates(state: &ClTerm) -> Vec<Candidate> {
    let metas = state.free_metavars();
    let l = Meta::new("#l");
    let mut out = Vec::new();
    for with_left in [false, true] {
        for k in 0..=1 {
            let extra = appended(k);
            let core = if with_left {
                ClTerm::app(ClTerm::Meta(l.clone()), state.clone())
            } else {
                state.clone()
            };
            let t = ClTerm::apply_all(core, extra.iter().cloned());
            let Some(site) = cbv_site(&t) else { continue };
            for lhs in rule_lhs() {
                let Ok(theta) = mgu(lhs, site) else { continue };
                if !theta.iter().all(|(_, v)| v.is_cbv_value()) {
                    continue;
                }
                let left = if with_left {
                    let bound = theta.apply(&ClTerm::Meta(l.clone()));
                    if matches!(bound, ClTerm::Meta(_)) {
                        continue;
                    }
                    Some(bound)
                } else {
                    None
                };
                out.push(Candidate {
                    label: Label {
                        subst: theta.restrict(|v| metas.contains(v)),
                        left,
                        args: extra.iter().map(|a| theta.apply(a)).collect(),
                    },
                    plugged: theta.apply(&t),
                });
            }
        }
    }
    out
}

/// Reactive labels of a second-order CL* state derived by unification.
///
/// `pruned` (lazy only) drops the labels whose redex lies inside the
/// instantiated head variable; `arg_bound` caps how many arguments that
/// variable may be expanded with.
pub(crate) fn derive_labels(
    state: &ClTerm,
    strategy: Strategy,
    pruned: bool,
    arg_bound: usize,
    avoid: &BTreeSet<Meta>,
) -> Vec<Label<ClTerm>> {
    let metas = state.free_metavars();
    let cands = match strategy {
        Strategy::Cbv => cbv_candidates(state),
        _ => lazy_candidates(state, pruned, arg_bound),
    };
    let mut avoid = avoid.clone();
    avoid.extend(metas.iter().cloned());
    let mut labels: Vec<Label<ClTerm>> = minimal(cands, &metas)
        .iter()
        .map(|l| canonicalize(l, &avoid))
        .collect();
    sort_labels(&mut labels);
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_cl;

    fn texts(state: &str, strategy: Strategy, pruned: bool) -> Vec<String> {
        let t = parse_cl(state).unwrap();
        derive_labels(&t, strategy, pruned, 2, &BTreeSet::new())
            .iter()
            .map(|l| l.to_string())
            .collect()
    }

    #[test]
    fn head_variable_instantiations() {
        let got = texts("?x K", Strategy::Lazy, false);
        for want in ["[_{?x:=K}]", "[_{?x:=K'(?z1)}]", "[_{?x:=S''(?z1, ?z2)}]", "[_{?x:=S ?y1 ?y2}]"] {
            assert!(got.contains(&want.to_string()), "{want} missing from {got:?}");
        }
        assert_eq!(got.len(), 15);
        assert_eq!(texts("?x K", Strategy::Lazy, true).len(), 5);
    }

    #[test]
    fn bare_variable_rows() {
        assert_eq!(texts("?x", Strategy::Lazy, false).len(), 10);
        let pruned = texts("?x", Strategy::Lazy, true);
        assert_eq!(pruned.len(), 5);
        assert!(pruned.iter().all(|l| l.ends_with("] ?y1")));
        let cbv = texts("?x", Strategy::Cbv, false);
        assert_eq!(cbv.len(), 10);
        assert!(cbv.contains(&"S'(?z1) [_]".to_string()));
    }

    #[test]
    fn values_and_redexes() {
        assert_eq!(texts("K'(K)", Strategy::Lazy, true), vec!["[_] ?y1"]);
        assert_eq!(texts("K K", Strategy::Lazy, false), vec!["tau"]);
        assert_eq!(texts("K K", Strategy::Cbv, false), vec!["tau"]);
        assert_eq!(texts("K", Strategy::Cbv, false).len(), 6);
        assert_eq!(texts("?x ?y", Strategy::Cbv, false).len(), 5);
    }

    #[test]
    fn fresh_names_avoid_state_variables() {
        let got = texts("?y1", Strategy::Lazy, true);
        assert!(got.contains(&"[_{?y1:=K}] ?y2".to_string()), "{got:?}");
    }
}
