//! Deterministic one-step reduction and fuelled normalisation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terms::{ClTerm, LambdaTerm, Meta, SpineClass, Term};

/// Default τ-step budget.
pub const DEFAULT_FUEL: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calculus {
    Lambda,
    Cl,
    #[serde(rename = "clstar")]
    ClStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Lazy,
    Cbv,
    /// Leftmost-outermost β under binders. Only used to decide β-equality.
    NormalFull,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calculus::Lambda => "lambda",
            Calculus::Cl => "cl",
            Calculus::ClStar => "clstar",
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Lazy => "lazy",
            Strategy::Cbv => "cbv",
            Strategy::NormalFull => "normal_full",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult<T> {
    Stepped(T),
    Halted(SpineClass),
    /// A metavariable in head position blocks the redex.
    StuckOpen(Meta),
}

impl<T> StepResult<T> {
    pub fn stepped(self) -> Option<T> {
        match self {
            StepResult::Stepped(t) => Some(t),
            _ => None,
        }
    }

    fn map<U>(self, f: impl FnOnce(T) -> U) -> StepResult<U> {
        match self {
            StepResult::Stepped(t) => StepResult::Stepped(f(t)),
            StepResult::Halted(c) => StepResult::Halted(c),
            StepResult::StuckOpen(x) => StepResult::StuckOpen(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Normal,
    FuelExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizeOutcome<T> {
    pub result: T,
    pub status: Status,
    pub steps: usize,
}

impl<T> NormalizeOutcome<T> {
    pub fn is_normal(&self) -> bool {
        self.status == Status::Normal
    }
}

// ---------------------------------------------------------------- λ-calculus

fn lambda_value(t: &LambdaTerm) -> bool {
    t.is_abs()
}

fn beta(f: &LambdaTerm, a: &LambdaTerm) -> Option<LambdaTerm> {
    match f {
        LambdaTerm::Abs { body, .. } => Some(LambdaTerm::instantiate(body, a)),
        _ => None,
    }
}

/// Leftmost β-redex outside abstractions. The spine is unwound iteratively.
fn lazy_lambda(t: &LambdaTerm) -> Option<LambdaTerm> {
    let mut args = Vec::new();
    let mut head = t;
    while let LambdaTerm::App(f, a) = head {
        args.push(&**a);
        head = f;
    }
    let first = args.pop()?;
    let mut out = beta(head, first)?;
    while let Some(a) = args.pop() {
        out = LambdaTerm::app(out, a.clone());
    }
    Some(out)
}

fn cbv_lambda(t: &LambdaTerm) -> Option<LambdaTerm> {
    match t {
        LambdaTerm::App(f, a) => {
            if !lambda_value(f) {
                cbv_lambda(f).map(|f2| LambdaTerm::app(f2, (**a).clone()))
            } else if !lambda_value(a) {
                cbv_lambda(a).map(|a2| LambdaTerm::app((**f).clone(), a2))
            } else {
                beta(f, a)
            }
        }
        _ => None,
    }
}

fn normal_full_lambda(t: &LambdaTerm) -> Option<LambdaTerm> {
    match t {
        LambdaTerm::App(f, a) => beta(f, a)
            .or_else(|| normal_full_lambda(f).map(|f2| LambdaTerm::app(f2, (**a).clone())))
            .or_else(|| normal_full_lambda(a).map(|a2| LambdaTerm::app((**f).clone(), a2))),
        LambdaTerm::Abs { name, body } => normal_full_lambda(body).map(|b| LambdaTerm::Abs {
            name: name.clone(),
            body: std::sync::Arc::new(b),
        }),
        LambdaTerm::Var { .. } => None,
    }
}

pub(crate) fn step_lambda_unchecked(t: &LambdaTerm, strategy: Strategy) -> StepResult<LambdaTerm> {
    let next = match strategy {
        Strategy::Lazy => lazy_lambda(t),
        Strategy::Cbv => cbv_lambda(t),
        Strategy::NormalFull => normal_full_lambda(t),
    };
    match next {
        Some(u) => StepResult::Stepped(u),
        None => StepResult::Halted(SpineClass::Value),
    }
}

/// One step of a λ-term. Lazy and cbv require a closed term.
pub fn step_lambda(t: &LambdaTerm, strategy: Strategy) -> Result<StepResult<LambdaTerm>> {
    if strategy != Strategy::NormalFull {
        if let Some(x) = t.first_free() {
            return Err(Error::open(x));
        }
    }
    Ok(step_lambda_unchecked(t, strategy))
}

// ---------------------------------------------------------------- CL / CL*

fn rebuild(head: ClTerm, rest: &[&ClTerm]) -> ClTerm {
    ClTerm::apply_all(head, rest.iter().map(|a| (*a).clone()))
}

fn meta_block<T>(x: &Meta, nargs: usize) -> StepResult<T> {
    if nargs == 0 {
        StepResult::Halted(SpineClass::BareVar(x.clone()))
    } else {
        StepResult::StuckOpen(x.clone())
    }
}

fn s_rule(m: &ClTerm, n: &ClTerm, p: &ClTerm) -> ClTerm {
    ClTerm::app(
        ClTerm::app(m.clone(), p.clone()),
        ClTerm::app(n.clone(), p.clone()),
    )
}

/// Plain CL, lazy: K fires with two arguments, S with three, at the head.
fn lazy_cl(t: &ClTerm) -> StepResult<ClTerm> {
    let (bottom, args) = t.spine();
    match bottom {
        ClTerm::Meta(x) => meta_block(x, args.len()),
        ClTerm::K if args.len() >= 2 => StepResult::Stepped(rebuild(args[0].clone(), &args[2..])),
        ClTerm::S if args.len() >= 3 => {
            StepResult::Stepped(rebuild(s_rule(args[0], args[1], args[2]), &args[3..]))
        }
        _ => StepResult::Halted(SpineClass::Value),
    }
}

/// Plain CL cbv values: `K | S | K V | S V | S V V`, metavariables included.
pub fn plain_cbv_value(t: &ClTerm) -> bool {
    let (bottom, args) = t.spine();
    let max = match bottom {
        ClTerm::K => 1,
        ClTerm::S => 2,
        ClTerm::Meta(_) => 0,
        _ => return false,
    };
    args.len() <= max && args.iter().all(|a| plain_cbv_value(a))
}

/// Plain CL, cbv: arguments up to the combinator's arity are evaluated left
/// to right, then the head fires.
fn cbv_cl(t: &ClTerm) -> StepResult<ClTerm> {
    let (bottom, args) = t.spine();
    let arity = match bottom {
        ClTerm::Meta(x) => return meta_block(x, args.len()),
        ClTerm::K => 2,
        ClTerm::S => 3,
        _ => unreachable!("plain CL term with a CL* constructor"),
    };
    for i in 0..arity.min(args.len()) {
        if !plain_cbv_value(args[i]) {
            return cbv_cl(args[i]).map(|a2| {
                let mut new_args: Vec<ClTerm> = args.iter().map(|a| (*a).clone()).collect();
                new_args[i] = a2;
                ClTerm::apply_all(bottom.clone(), new_args)
            });
        }
    }
    if args.len() < arity {
        return StepResult::Halted(SpineClass::Value);
    }
    let fired = match bottom {
        ClTerm::K => args[0].clone(),
        _ => s_rule(args[0], args[1], args[2]),
    };
    StepResult::Stepped(rebuild(fired, &args[arity..]))
}

/// The CL* rule for a value-form head applied to one argument.
fn fire_star(head: &ClTerm, a: &ClTerm) -> Option<ClTerm> {
    Some(match head {
        ClTerm::K => ClTerm::kp(a.clone()),
        ClTerm::Kp(m) => (**m).clone(),
        ClTerm::S => ClTerm::sp(a.clone()),
        ClTerm::Sp(m) => ClTerm::Spp(m.clone(), std::sync::Arc::new(a.clone())),
        ClTerm::Spp(m, n) => s_rule(m, n, a),
        _ => return None,
    })
}

/// CL*, lazy: the head value consumes one argument.
fn lazy_clstar(t: &ClTerm) -> StepResult<ClTerm> {
    let (bottom, args) = t.spine();
    if let ClTerm::Meta(x) = bottom {
        return meta_block(x, args.len());
    }
    match args.split_first() {
        None => StepResult::Halted(SpineClass::Value),
        Some((a, rest)) => {
            StepResult::Stepped(rebuild(fire_star(bottom, a).expect("value head"), rest))
        }
    }
}

/// CL*, cbv: reactive contexts `[ ] | D P | V D`, with arguments of the
/// primed constructors evaluated left to right first.
fn cbv_clstar(t: &ClTerm) -> StepResult<ClTerm> {
    use std::sync::Arc;
    match t {
        ClTerm::Meta(x) => StepResult::Halted(SpineClass::BareVar(x.clone())),
        ClTerm::K | ClTerm::S => StepResult::Halted(SpineClass::Value),
        ClTerm::Kp(m) => {
            if m.is_cbv_value() {
                StepResult::Halted(SpineClass::Value)
            } else {
                cbv_clstar(m).map(ClTerm::kp)
            }
        }
        ClTerm::Sp(m) => {
            if m.is_cbv_value() {
                StepResult::Halted(SpineClass::Value)
            } else {
                cbv_clstar(m).map(ClTerm::sp)
            }
        }
        ClTerm::Spp(m, n) => {
            if !m.is_cbv_value() {
                cbv_clstar(m).map(|m2| ClTerm::Spp(Arc::new(m2), n.clone()))
            } else if !n.is_cbv_value() {
                cbv_clstar(n).map(|n2| ClTerm::Spp(m.clone(), Arc::new(n2)))
            } else {
                StepResult::Halted(SpineClass::Value)
            }
        }
        ClTerm::App(f, a) => {
            if !f.is_cbv_value() {
                cbv_clstar(f).map(|f2| ClTerm::App(Arc::new(f2), a.clone()))
            } else if !a.is_cbv_value() {
                cbv_clstar(a).map(|a2| ClTerm::App(f.clone(), Arc::new(a2)))
            } else if let ClTerm::Meta(x) = &**f {
                StepResult::StuckOpen(x.clone())
            } else {
                StepResult::Stepped(fire_star(f, a).expect("value head"))
            }
        }
    }
}

/// Whether the cbv CL* stepper finds a redex.
pub fn cbv_clstar_redex_exists(t: &ClTerm) -> bool {
    matches!(cbv_clstar(t), StepResult::Stepped(_))
}

fn check_cl_input(t: &ClTerm, calculus: Calculus, strategy: Strategy) -> Result<()> {
    match (calculus, strategy) {
        (Calculus::Lambda, _) => Err(Error::UnsupportedConfig(
            "a CL term cannot be reduced as a λ-term".into(),
        )),
        (_, Strategy::NormalFull) => Err(Error::UnsupportedConfig(
            "normal_full is a λ-calculus strategy".into(),
        )),
        (Calculus::Cl, _) if !t.is_plain_cl() => Err(Error::NotInCalculus {
            calculus: "CL",
            term: t.to_string(),
        }),
        _ => Ok(()),
    }
}

/// One step without validating the input; `calculus` must be CL or CL* and
/// the strategy lazy or cbv.
pub(crate) fn step_cl_unchecked(
    t: &ClTerm,
    calculus: Calculus,
    strategy: Strategy,
) -> StepResult<ClTerm> {
    match (calculus, strategy) {
        (Calculus::Cl, Strategy::Lazy) => lazy_cl(t),
        (Calculus::Cl, Strategy::Cbv) => cbv_cl(t),
        (Calculus::ClStar, Strategy::Lazy) => lazy_clstar(t),
        (Calculus::ClStar, Strategy::Cbv) => cbv_clstar(t),
        _ => unreachable!("validated by check_cl_input"),
    }
}

pub fn step_cl(t: &ClTerm, calculus: Calculus, strategy: Strategy) -> Result<StepResult<ClTerm>> {
    check_cl_input(t, calculus, strategy)?;
    Ok(step_cl_unchecked(t, calculus, strategy))
}

/// One step of `t` for the given calculus and strategy.
pub fn step(t: &Term, calculus: Calculus, strategy: Strategy) -> Result<StepResult<Term>> {
    match (t, calculus) {
        (Term::Lambda(m), Calculus::Lambda) => Ok(step_lambda(m, strategy)?.map(Term::Lambda)),
        (Term::Cl(m), Calculus::Cl | Calculus::ClStar) => {
            Ok(step_cl(m, calculus, strategy)?.map(Term::Cl))
        }
        _ => Err(Error::UnsupportedConfig(format!(
            "term syntax does not match calculus {calculus}"
        ))),
    }
}

fn normalize_with<T: Clone>(
    t: &T,
    fuel: usize,
    mut stepper: impl FnMut(&T) -> Option<T>,
) -> NormalizeOutcome<T> {
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        match stepper(&cur) {
            None => {
                return NormalizeOutcome {
                    result: cur,
                    status: Status::Normal,
                    steps,
                }
            }
            Some(_) if steps == fuel => {
                return NormalizeOutcome {
                    result: cur,
                    status: Status::FuelExhausted,
                    steps,
                }
            }
            Some(next) => {
                cur = next;
                steps += 1;
            }
        }
    }
}

pub(crate) fn normalize_cl_unchecked(
    t: &ClTerm,
    calculus: Calculus,
    strategy: Strategy,
    fuel: usize,
) -> NormalizeOutcome<ClTerm> {
    normalize_with(t, fuel, |u| step_cl_unchecked(u, calculus, strategy).stepped())
}

pub fn normalize_cl(
    t: &ClTerm,
    calculus: Calculus,
    strategy: Strategy,
    fuel: usize,
) -> Result<NormalizeOutcome<ClTerm>> {
    check_cl_input(t, calculus, strategy)?;
    Ok(normalize_cl_unchecked(t, calculus, strategy, fuel))
}

pub fn normalize_lambda(
    t: &LambdaTerm,
    strategy: Strategy,
    fuel: usize,
) -> Result<NormalizeOutcome<LambdaTerm>> {
    step_lambda(t, strategy)?;
    Ok(normalize_with(t, fuel, |u| {
        step_lambda_unchecked(u, strategy).stepped()
    }))
}

/// Iterates [`step`] until it halts or `fuel` steps have been taken.
pub fn normalize_tau(
    t: &Term,
    calculus: Calculus,
    strategy: Strategy,
    fuel: usize,
) -> Result<NormalizeOutcome<Term>> {
    match (t, calculus) {
        (Term::Lambda(m), Calculus::Lambda) => {
            let o = normalize_lambda(m, strategy, fuel)?;
            Ok(NormalizeOutcome {
                result: Term::Lambda(o.result),
                status: o.status,
                steps: o.steps,
            })
        }
        (Term::Cl(m), Calculus::Cl | Calculus::ClStar) => {
            let o = normalize_cl(m, calculus, strategy, fuel)?;
            Ok(NormalizeOutcome {
                result: Term::Cl(o.result),
                status: o.status,
                steps: o.steps,
            })
        }
        _ => Err(Error::UnsupportedConfig(format!(
            "term syntax does not match calculus {calculus}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_cl, parse_closed_lambda};

    fn cl(s: &str) -> ClTerm {
        parse_cl(s).unwrap()
    }

    #[test]
    fn clstar_lazy_k_rule() {
        let m = cl("S K");
        let t = ClTerm::app(ClTerm::K, m.clone());
        assert_eq!(
            step_cl(&t, Calculus::ClStar, Strategy::Lazy),
            Ok(StepResult::Stepped(ClTerm::kp(m)))
        );
    }

    #[test]
    fn cl_lazy_s_rule() {
        let t = cl("S ?m ?n ?p");
        assert_eq!(
            step_cl(&t, Calculus::Cl, Strategy::Lazy),
            Ok(StepResult::Stepped(cl("?m ?p (?n ?p)")))
        );
    }

    #[test]
    fn lambda_values_halt() {
        let id = parse_closed_lambda("\\x. x").unwrap();
        assert_eq!(
            step_lambda(&id, Strategy::Lazy),
            Ok(StepResult::Halted(SpineClass::Value))
        );
        let open = crate::terms::parse_lambda("y").unwrap();
        assert_eq!(step_lambda(&open, Strategy::Cbv), Err(Error::OpenTerm("y".into())));
    }

    #[test]
    fn clstar_lazy_spp_rule() {
        let t = ClTerm::app(ClTerm::spp(ClTerm::K, ClTerm::K), ClTerm::meta("x"));
        assert_eq!(
            step_cl(&t, Calculus::ClStar, Strategy::Lazy),
            Ok(StepResult::Stepped(cl("K ?x (K ?x)")))
        );
    }

    #[test]
    fn normalize_examples() {
        let o = normalize_cl(&cl("S (K K) (S K K)"), Calculus::ClStar, Strategy::Lazy, 10).unwrap();
        assert_eq!(o.result, cl("S''(K K, S K K)"));
        assert_eq!((o.status, o.steps), (Status::Normal, 2));

        let omega = parse_closed_lambda("(\\x. x x) (\\x. x x)").unwrap();
        let o = normalize_lambda(&omega, Strategy::Lazy, 50).unwrap();
        assert_eq!(o.result, omega);
        assert_eq!((o.status, o.steps), (Status::FuelExhausted, 50));

        let o = normalize_cl(&ClTerm::K, Calculus::ClStar, Strategy::Lazy, 5).unwrap();
        assert_eq!((o.result, o.status, o.steps), (ClTerm::K, Status::Normal, 0));
    }

    #[test]
    fn cbv_evaluates_arguments_first() {
        // K (K K K): the argument is reduced before K fires.
        let t = cl("K (K K K)");
        assert_eq!(
            step_cl(&t, Calculus::Cl, Strategy::Cbv),
            Ok(StepResult::Stepped(cl("K K")))
        );
        assert_eq!(
            step_cl(&t, Calculus::Cl, Strategy::Lazy),
            Ok(StepResult::Halted(SpineClass::Value))
        );
        assert_eq!(
            step_cl(&cl("K (K K K) S"), Calculus::Cl, Strategy::Cbv),
            Ok(StepResult::Stepped(cl("K K S")))
        );
        assert_eq!(
            step_cl(&cl("K'(K K)"), Calculus::ClStar, Strategy::Cbv),
            Ok(StepResult::Stepped(cl("K'(K'(K))")))
        );
        assert_eq!(
            step_cl(&cl("?x K"), Calculus::ClStar, Strategy::Cbv),
            Ok(StepResult::StuckOpen(Meta::new("x")))
        );
    }

    #[test]
    fn lambda_cbv_evaluates_argument() {
        let t = parse_closed_lambda("(\\x. \\y. y) ((\\z. z) (\\z. z))").unwrap();
        let lazy = step_lambda(&t, Strategy::Lazy).unwrap().stepped().unwrap();
        let cbv = step_lambda(&t, Strategy::Cbv).unwrap().stepped().unwrap();
        assert_eq!(lazy, parse_closed_lambda("\\y. y").unwrap());
        assert_eq!(
            cbv,
            parse_closed_lambda("(\\x. \\y. y) (\\z. z)").unwrap()
        );
    }

    #[test]
    fn plain_cl_rejects_primed_constructors() {
        assert!(matches!(
            step_cl(&cl("K'(K)"), Calculus::Cl, Strategy::Lazy),
            Err(Error::NotInCalculus { .. })
        ));
    }
}
