//! A second, deliberately naive stepper. It collects every rule instance
//! that sits in a reactive context, instead of walking one evaluation path,
//! so the production steppers can be checked against it.

use crate::reduction::{plain_cbv_value, Calculus, Strategy};
use crate::terms::{ClTerm, LambdaTerm};

fn s_rule(m: &ClTerm, n: &ClTerm, p: &ClTerm) -> ClTerm {
    ClTerm::app(ClTerm::app(m.clone(), p.clone()), ClTerm::app(n.clone(), p.clone()))
}

/// The rule instance rooted exactly at `t`, if there is one.
fn contract(t: &ClTerm, calculus: Calculus, strategy: Strategy) -> Option<ClTerm> {
    let cbv = strategy == Strategy::Cbv;
    match calculus {
        Calculus::ClStar => {
            let ClTerm::App(f, a) = t else { return None };
            if cbv && !(f.is_cbv_value() && a.is_cbv_value()) {
                return None;
            }
            let a = (**a).clone();
            match &**f {
                ClTerm::K => Some(ClTerm::kp(a)),
                ClTerm::Kp(m) => Some((**m).clone()),
                ClTerm::S => Some(ClTerm::sp(a)),
                ClTerm::Sp(m) => Some(ClTerm::spp((**m).clone(), a)),
                ClTerm::Spp(m, n) => Some(s_rule(m, n, &a)),
                _ => None,
            }
        }
        _ => {
            let (bottom, args) = t.spine();
            let ok = |xs: &[&ClTerm]| !cbv || xs.iter().all(|x| plain_cbv_value(x));
            match (bottom, args.as_slice()) {
                (ClTerm::K, [m, n]) if ok(&[m, n]) => Some((*m).clone()),
                (ClTerm::S, [m, n, p]) if ok(&[m, n, p]) => Some(s_rule(m, n, p)),
                _ => None,
            }
        }
    }
}

/// Whether `f` may sit to the left of an evaluation context under cbv.
fn cbv_left_value(f: &ClTerm, calculus: Calculus) -> bool {
    match calculus {
        Calculus::ClStar => f.is_cbv_value(),
        // The plain stepper never evaluates under a metavariable head.
        _ => plain_cbv_value(f) && !matches!(f.spine().0, ClTerm::Meta(_)),
    }
}

fn collect(t: &ClTerm, calculus: Calculus, strategy: Strategy, out: &mut Vec<ClTerm>) {
    if let Some(r) = contract(t, calculus, strategy) {
        out.push(r);
    }
    let cbv = strategy == Strategy::Cbv;
    let inner = |u: &ClTerm| {
        let mut v = Vec::new();
        collect(u, calculus, strategy, &mut v);
        v
    };
    match t {
        ClTerm::App(f, a) => {
            out.extend(inner(f).into_iter().map(|f2| ClTerm::app(f2, (**a).clone())));
            if cbv && cbv_left_value(f, calculus) {
                out.extend(inner(a).into_iter().map(|a2| ClTerm::app((**f).clone(), a2)));
            }
        }
        ClTerm::Kp(m) if cbv => out.extend(inner(m).into_iter().map(ClTerm::kp)),
        ClTerm::Sp(m) if cbv => out.extend(inner(m).into_iter().map(ClTerm::sp)),
        ClTerm::Spp(m, n) if cbv => {
            out.extend(inner(m).into_iter().map(|m2| ClTerm::spp(m2, (**n).clone())));
            if m.is_cbv_value() {
                out.extend(inner(n).into_iter().map(|n2| ClTerm::spp((**m).clone(), n2)));
            }
        }
        _ => {}
    }
}

/// All one-step reducts of `t`: rule instances closed under the strategy's
/// evaluation contexts. Lazy contexts are `[ ] | E P`; cbv adds `V E` and,
/// for CL*, the argument positions of the primed constructors.
pub fn reducts_cl(t: &ClTerm, calculus: Calculus, strategy: Strategy) -> Vec<ClTerm> {
    let mut out = Vec::new();
    collect(t, calculus, strategy, &mut out);
    out
}

/// All one-step reducts of a λ-term under `[ ] | E M` (lazy) or
/// `[ ] | E M | V E` (cbv).
pub fn reducts_lambda(t: &LambdaTerm, strategy: Strategy) -> Vec<LambdaTerm> {
    let mut out = Vec::new();
    if let LambdaTerm::App(f, a) = t {
        if let LambdaTerm::Abs { body, .. } = &**f {
            if strategy == Strategy::Lazy || a.is_abs() {
                out.push(LambdaTerm::instantiate(body, a));
            }
        }
        for f2 in reducts_lambda(f, strategy) {
            out.push(LambdaTerm::app(f2, (**a).clone()));
        }
        if strategy == Strategy::Cbv && f.is_abs() {
            for a2 in reducts_lambda(a, strategy) {
                out.push(LambdaTerm::app((**f).clone(), a2));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_cl, parse_closed_lambda};

    fn cl(s: &str) -> ClTerm {
        parse_cl(s).unwrap()
    }

    #[test]
    fn lazy_clstar_only_fires_at_the_head() {
        assert_eq!(
            reducts_cl(&cl("K (K K) (K K)"), Calculus::ClStar, Strategy::Lazy),
            vec![cl("K'(K K) (K K)")]
        );
    }

    #[test]
    fn cbv_clstar_evaluates_primed_arguments() {
        assert_eq!(
            reducts_cl(&cl("K'(K K)"), Calculus::ClStar, Strategy::Cbv),
            vec![cl("K'(K'(K))")]
        );
        assert!(reducts_cl(&cl("?x K"), Calculus::ClStar, Strategy::Cbv).is_empty());
    }

    #[test]
    fn plain_cl_needs_full_arity() {
        assert!(reducts_cl(&cl("S K K"), Calculus::Cl, Strategy::Lazy).is_empty());
        assert_eq!(reducts_cl(&cl("K S K"), Calculus::Cl, Strategy::Cbv), vec![ClTerm::S]);
    }

    #[test]
    fn lambda_contexts() {
        let t = parse_closed_lambda("(\\x. x) ((\\y. y) (\\z. z))").unwrap();
        assert_eq!(reducts_lambda(&t, Strategy::Lazy).len(), 1);
        let cbv = reducts_lambda(&t, Strategy::Cbv);
        assert_eq!(cbv, vec![parse_closed_lambda("(\\x. x) (\\z. z)").unwrap()]);
    }
}
