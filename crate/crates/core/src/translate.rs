//! The λ → CL translation `T` and the CL → λ embedding `E`.

use serde::Serialize;

use crate::reduction::{normalize_lambda, Strategy};
use crate::terms::{ClTerm, LambdaTerm, Meta};

/// λ-terms over the constants K and S, with named variables: the domain
/// on which the translation clauses are stated.
#[derive(Clone, Debug, PartialEq, Eq)]
enum KsLambda {
    Var(String),
    Const(ClTerm),
    App(Box<KsLambda>, Box<KsLambda>),
    Abs(String, Box<KsLambda>),
}

/// Bound variables get names that cannot collide with parsed identifiers.
fn bound_name(depth: usize) -> String {
    format!("#{depth}")
}

fn from_lambda(t: &LambdaTerm, scope: &mut Vec<String>) -> KsLambda {
    match t {
        LambdaTerm::Var { index, name } => {
            if *index < scope.len() {
                KsLambda::Var(scope[scope.len() - 1 - index].clone())
            } else {
                KsLambda::Var(name.to_string())
            }
        }
        LambdaTerm::App(f, a) => KsLambda::App(
            Box::new(from_lambda(f, scope)),
            Box::new(from_lambda(a, scope)),
        ),
        LambdaTerm::Abs { body, .. } => {
            let x = bound_name(scope.len());
            scope.push(x.clone());
            let b = from_lambda(body, scope);
            scope.pop();
            KsLambda::Abs(x, Box::new(b))
        }
    }
}

/// Reads a λ-free CL term back as an element of Λ(K, S).
fn from_cl(t: &ClTerm) -> KsLambda {
    match t {
        ClTerm::K | ClTerm::S => KsLambda::Const(t.clone()),
        ClTerm::Meta(m) => KsLambda::Var(m.name().to_string()),
        ClTerm::App(f, a) => KsLambda::App(Box::new(from_cl(f)), Box::new(from_cl(a))),
        ClTerm::Kp(m) => KsLambda::App(Box::new(KsLambda::Const(ClTerm::K)), Box::new(from_cl(m))),
        ClTerm::Sp(m) => KsLambda::App(Box::new(KsLambda::Const(ClTerm::S)), Box::new(from_cl(m))),
        ClTerm::Spp(m, n) => KsLambda::App(
            Box::new(KsLambda::App(
                Box::new(KsLambda::Const(ClTerm::S)),
                Box::new(from_cl(m)),
            )),
            Box::new(from_cl(n)),
        ),
    }
}

fn skk() -> ClTerm {
    ClTerm::apply_all(ClTerm::S, [ClTerm::K, ClTerm::K])
}

/// The defining clauses, tried top-down.
fn t(m: &KsLambda) -> ClTerm {
    match m {
        KsLambda::Var(x) => ClTerm::Meta(Meta::new(x)),
        KsLambda::App(p, q) => ClTerm::app(t(p), t(q)),
        KsLambda::Const(c) => c.clone(),
        KsLambda::Abs(x, body) => match &**body {
            KsLambda::Var(y) if y == x => skk(),
            KsLambda::Var(y) => ClTerm::app(ClTerm::K, ClTerm::Meta(Meta::new(y))),
            KsLambda::App(p, q) => ClTerm::apply_all(
                ClTerm::S,
                [
                    t(&KsLambda::Abs(x.clone(), p.clone())),
                    t(&KsLambda::Abs(x.clone(), q.clone())),
                ],
            ),
            KsLambda::Abs(..) => {
                let inner = t(body);
                t(&KsLambda::Abs(x.clone(), Box::new(from_cl(&inner))))
            }
            KsLambda::Const(c) => ClTerm::app(ClTerm::K, c.clone()),
        },
    }
}

/// `T(m)`. Free λ-variables become metavariables of the same name.
pub fn to_cl(m: &LambdaTerm) -> ClTerm {
    t(&from_lambda(m, &mut Vec::new()))
}

/// `T` applied to a CL term read as a λ-free member of Λ(K, S).
pub fn retranslate(cl: &ClTerm) -> ClTerm {
    t(&from_cl(cl))
}

fn e_k() -> LambdaTerm {
    LambdaTerm::abs("x", LambdaTerm::abs("y", LambdaTerm::var(1, "x")))
}

fn e_s() -> LambdaTerm {
    let v = |i, n| LambdaTerm::var(i, n);
    LambdaTerm::abs(
        "x",
        LambdaTerm::abs(
            "y",
            LambdaTerm::abs(
                "z",
                LambdaTerm::app(
                    LambdaTerm::app(v(2, "x"), v(0, "z")),
                    LambdaTerm::app(v(1, "y"), v(0, "z")),
                ),
            ),
        ),
    )
}

/// `E(t)`. The primed constructors read as partial applications.
pub fn to_lambda(t: &ClTerm) -> LambdaTerm {
    match t {
        ClTerm::K => e_k(),
        ClTerm::S => e_s(),
        ClTerm::Meta(m) => LambdaTerm::free(m.name()),
        ClTerm::App(f, a) => LambdaTerm::app(to_lambda(f), to_lambda(a)),
        ClTerm::Kp(m) => LambdaTerm::app(e_k(), to_lambda(m)),
        ClTerm::Sp(m) => LambdaTerm::app(e_s(), to_lambda(m)),
        ClTerm::Spp(m, n) => LambdaTerm::apply_all(e_s(), [to_lambda(m), to_lambda(n)]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EtOutcome {
    Confirmed,
    FuelExhausted,
    /// Both sides have normal forms and they differ.
    Refuted,
}

/// Whether `E(T(m))` and `m` have α-equal β-normal forms within `fuel`
/// leftmost-outermost steps each.
pub fn check_et_identity(m: &LambdaTerm, fuel: usize) -> EtOutcome {
    let et = to_lambda(&to_cl(m));
    let lhs = normalize_lambda(&et, Strategy::NormalFull, fuel).expect("normal_full accepts open terms");
    let rhs = normalize_lambda(m, Strategy::NormalFull, fuel).expect("normal_full accepts open terms");
    if !lhs.is_normal() || !rhs.is_normal() {
        EtOutcome::FuelExhausted
    } else if lhs.result == rhs.result {
        EtOutcome::Confirmed
    } else {
        EtOutcome::Refuted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_cl, parse_closed_lambda, parse_lambda};

    fn lam(s: &str) -> LambdaTerm {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn identity_and_variable() {
        assert_eq!(to_cl(&lam("\\x. x")), parse_cl("S K K").unwrap());
        assert_eq!(to_cl(&lam("x")), ClTerm::meta("x"));
    }

    #[test]
    fn two_argument_application() {
        assert_eq!(
            to_cl(&lam("\\x y. x y")),
            parse_cl("S (S (K S) (S (K K) (S K K))) (S (S (K S) (K K)) (K K))").unwrap()
        );
    }

    #[test]
    fn embedding_is_homomorphic() {
        assert_eq!(to_lambda(&ClTerm::K), lam("\\x y. x"));
        assert_eq!(
            to_lambda(&parse_cl("K S").unwrap()),
            lam("(\\x y. x) (\\x y z. x z (y z))")
        );
        assert_eq!(
            to_lambda(&parse_cl("S K K").unwrap()),
            lam("(\\x y z. x z (y z)) (\\x y. x) (\\x y. x)")
        );
    }

    #[test]
    fn et_identity_examples() {
        let c = |s: &str| check_et_identity(&parse_closed_lambda(s).unwrap(), 100);
        assert_eq!(c("\\x. x"), EtOutcome::Confirmed);
        assert_eq!(c("(\\x. x) (\\y. y)"), EtOutcome::Confirmed);
        assert_eq!(c("(\\x. x x) (\\x. x x)"), EtOutcome::FuelExhausted);
    }

    #[test]
    fn translation_is_stable_on_its_image() {
        for s in ["\\x. x", "\\x y. x y", "\\x. \\y. y x", "(\\x. x x) (\\y. y)"] {
            let once = to_cl(&lam(s));
            assert!(once.is_plain_cl() && once.is_closed());
            assert_eq!(retranslate(&once), once);
        }
    }
}
