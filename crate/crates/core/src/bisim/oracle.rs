//! Oracles that do not use the IPO labels: applicative probing with closed
//! arguments and brute-force search over closed contexts.

use std::collections::HashMap;

use super::{Side, StepReason, TraceStep, UnknownReason, Verdict};
use crate::error::{Error, Result};
use crate::ipo::Label;
use crate::reduction::{normalize_tau, plain_cbv_value, Calculus, NormalizeOutcome, Strategy};
use crate::terms::{
    enumerate_closed_lambda, enumerate_terms, ClTerm, Flavor, LambdaTerm, Meta, Substitution, Term,
};

const HOLE: &str = "#hole";
const BOT: &str = "#bot";

/// `(λx. x x) (λx. x x)`.
fn lambda_bottom() -> LambdaTerm {
    let d = LambdaTerm::abs("x", LambdaTerm::app(LambdaTerm::var(0, "x"), LambdaTerm::var(0, "x")));
    LambdaTerm::app(d.clone(), d)
}

/// `S I I (S I I)` with `I = S K K`.
fn cl_bottom() -> ClTerm {
    let i = || ClTerm::apply_all(ClTerm::S, [ClTerm::K, ClTerm::K]);
    let sii = ClTerm::apply_all(ClTerm::S, [i(), i()]);
    ClTerm::app(sii.clone(), sii)
}

fn calculus_of(a: &Term, b: &Term) -> Result<Calculus> {
    match (a, b) {
        (Term::Lambda(_), Term::Lambda(_)) => Ok(Calculus::Lambda),
        (Term::Cl(x), Term::Cl(y)) if x.is_plain_cl() && y.is_plain_cl() => Ok(Calculus::Cl),
        (Term::Cl(_), Term::Cl(_)) => Ok(Calculus::ClStar),
        _ => Err(Error::UnsupportedConfig(
            "the two terms must use the same syntax".into(),
        )),
    }
}

fn require_closed(t: &Term) -> Result<()> {
    match t {
        Term::Lambda(m) => match m.first_free() {
            Some(x) => Err(Error::OpenTerm(x.to_string())),
            None => Ok(()),
        },
        Term::Cl(c) => match c.metavars().first() {
            Some(x) => Err(Error::OpenTerm(x.to_string())),
            None => Ok(()),
        },
    }
}

fn is_value(t: &Term, calculus: Calculus) -> bool {
    match t {
        Term::Lambda(m) => m.is_abs(),
        Term::Cl(c) if calculus == Calculus::Cl => plain_cbv_value(c),
        Term::Cl(c) => c.is_cbv_value(),
    }
}

fn apply(f: &Term, a: &Term) -> Term {
    match (f, a) {
        (Term::Lambda(f), Term::Lambda(a)) => Term::Lambda(LambdaTerm::app(f.clone(), a.clone())),
        (Term::Cl(f), Term::Cl(a)) => Term::Cl(ClTerm::app(f.clone(), a.clone())),
        _ => unreachable!("syntax checked by calculus_of"),
    }
}

/// Closed arguments of size at most `bound`: values only under cbv, and
/// every term plus a divergent one under the lazy strategy.
fn argument_pool(calculus: Calculus, strategy: Strategy, bound: usize) -> Vec<Term> {
    let mut pool: Vec<Term> = match calculus {
        Calculus::Lambda => enumerate_closed_lambda(bound).into_iter().map(Term::Lambda).collect(),
        Calculus::Cl => enumerate_terms(bound, &[], Flavor::Cl).into_iter().map(Term::Cl).collect(),
        Calculus::ClStar => enumerate_terms(bound, &[], Flavor::ClStar)
            .into_iter()
            .map(Term::Cl)
            .collect(),
    };
    if strategy == Strategy::Cbv {
        pool.retain(|t| is_value(t, calculus));
    } else {
        pool.push(match calculus {
            Calculus::Lambda => Term::Lambda(lambda_bottom()),
            _ => Term::Cl(cl_bottom()),
        });
    }
    pool
}

struct Applicative {
    calculus: Calculus,
    strategy: Strategy,
    pool: Vec<Term>,
    fuel: usize,
    fuel_unknown: bool,
    cut: bool,
}

impl Applicative {
    fn normalize(&self, t: &Term) -> Result<NormalizeOutcome<Term>> {
        normalize_tau(t, self.calculus, self.strategy, self.fuel)
    }

    fn play(&mut self, a: &Term, b: &Term, depth: usize) -> Result<Option<Vec<TraceStep>>> {
        let na = self.normalize(a)?;
        let nb = self.normalize(b)?;
        match (na.is_normal(), nb.is_normal()) {
            (true, true) => {}
            (false, false) => {
                self.fuel_unknown = true;
                return Ok(None);
            }
            (halts_a, _) => {
                let side = if halts_a { Side::Left } else { Side::Right };
                return Ok(Some(vec![TraceStep::labelled(
                    Label::tau(),
                    side,
                    StepReason::Observability,
                )]));
            }
        }
        if na.result == nb.result {
            return Ok(None);
        }
        if depth == 0 {
            self.cut = true;
            return Ok(None);
        }
        for p in self.pool.clone() {
            if let Some(mut trace) = self.play(&apply(&na.result, &p), &apply(&nb.result, &p), depth - 1)? {
                let label = Label {
                    subst: Substitution::new(),
                    left: None,
                    args: vec![p],
                };
                trace.insert(0, TraceStep::labelled(label, Side::Both, StepReason::Matched));
                return Ok(Some(trace));
            }
        }
        Ok(None)
    }
}

/// The applicative game: both sides must agree on halting, and on
/// halting again after each further closed argument from the pool, up to
/// `depth` arguments. Terms with α-equal normal forms are related outright.
/// Halting is judged within `fuel` steps, so a side that only halts after
/// more steps is taken to diverge.
pub fn applicative_oracle(
    a: &Term,
    b: &Term,
    strategy: Strategy,
    arg_pool: usize,
    depth: usize,
    fuel: usize,
) -> Result<Verdict> {
    require_closed(a)?;
    require_closed(b)?;
    let calculus = calculus_of(a, b)?;
    let mut game = Applicative {
        calculus,
        strategy,
        pool: argument_pool(calculus, strategy, arg_pool),
        fuel,
        fuel_unknown: false,
        cut: false,
    };
    Ok(match game.play(a, b, depth)? {
        Some(trace) => Verdict::Distinguished(trace),
        None if game.fuel_unknown => Verdict::Unknown(UnknownReason::FuelExhausted),
        None if game.cut => Verdict::Unknown(UnknownReason::PoolLimited),
        None => Verdict::Equivalent(depth),
    })
}

/// λ-contexts of exactly `size` with `holes` occurrences of the hole,
/// under `depth` binders. The hole and the divergent atom count one.
fn lambda_contexts(
    size: usize,
    depth: usize,
    holes: usize,
    memo: &mut HashMap<(usize, usize, usize), Vec<LambdaTerm>>,
) -> Vec<LambdaTerm> {
    if let Some(v) = memo.get(&(size, depth, holes)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        if holes == 1 {
            out.push(LambdaTerm::free(HOLE));
        } else {
            for i in 0..depth {
                out.push(LambdaTerm::var(i, &format!("v{}", depth - 1 - i)));
            }
            out.push(LambdaTerm::free(BOT));
        }
    } else if size > 1 {
        for body in lambda_contexts(size - 1, depth + 1, holes, memo) {
            out.push(LambdaTerm::abs(&format!("v{depth}"), body));
        }
        for i in 1..size {
            for h in 0..=holes {
                let fs = lambda_contexts(i, depth, h, memo);
                let args = lambda_contexts(size - i, depth, holes - h, memo);
                for f in &fs {
                    for a in &args {
                        out.push(LambdaTerm::app(f.clone(), a.clone()));
                    }
                }
            }
        }
    }
    memo.insert((size, depth, holes), out.clone());
    out
}

/// Applicative CL contexts `C ::= [ ] | C M | M C` of exactly `size`.
fn cl_contexts(size: usize, closed: &[Vec<ClTerm>]) -> Vec<ClTerm> {
    if size == 1 {
        return vec![ClTerm::meta(HOLE)];
    }
    let mut out = Vec::new();
    for i in 1..size {
        let inner = cl_contexts(i, closed);
        for c in &inner {
            for m in &closed[size - i] {
                out.push(ClTerm::app(c.clone(), m.clone()));
            }
        }
        for c in &inner {
            for m in &closed[size - i] {
                out.push(ClTerm::app(m.clone(), c.clone()));
            }
        }
    }
    out
}

fn context_text(ctx: &Term) -> String {
    ctx.to_string().replace(HOLE, "[_]").replace(BOT, "bot")
}

/// Searches the closed unary contexts of size at most `context_size` for
/// one in which exactly one of `a`, `b` halts within `fuel` steps. Without
/// such a context the answer is pool-relative.
pub fn contextual_oracle(
    a: &Term,
    b: &Term,
    strategy: Strategy,
    context_size: usize,
    fuel: usize,
) -> Result<Verdict> {
    require_closed(a)?;
    require_closed(b)?;
    let calculus = calculus_of(a, b)?;
    let contexts: Vec<Term> = match calculus {
        Calculus::Lambda => {
            let mut memo = HashMap::new();
            (1..=context_size)
                .flat_map(|s| lambda_contexts(s, 0, 1, &mut memo))
                .map(Term::Lambda)
                .collect()
        }
        _ => {
            let flavor = if calculus == Calculus::Cl { Flavor::Cl } else { Flavor::ClStar };
            let mut closed: Vec<Vec<ClTerm>> = vec![Vec::new(); context_size.max(1)];
            for t in enumerate_terms(context_size.saturating_sub(1), &[], flavor) {
                let s = t.size();
                closed[s].push(t);
            }
            if context_size > 1 {
                closed[1].push(ClTerm::meta(BOT));
            }
            (1..=context_size)
                .flat_map(|s| cl_contexts(s, &closed))
                .map(Term::Cl)
                .collect()
        }
    };
    let plug = |ctx: &Term, t: &Term| -> Term {
        match (ctx, t) {
            (Term::Lambda(c), Term::Lambda(m)) => {
                Term::Lambda(c.substitute_free(HOLE, m).substitute_free(BOT, &lambda_bottom()))
            }
            (Term::Cl(c), Term::Cl(m)) => {
                let theta: Substitution = [(Meta::new(HOLE), m.clone()), (Meta::new(BOT), cl_bottom())]
                    .into_iter()
                    .collect();
                Term::Cl(theta.apply(c))
            }
            _ => unreachable!("syntax checked by calculus_of"),
        }
    };
    for ctx in &contexts {
        let ha = normalize_tau(&plug(ctx, a), calculus, strategy, fuel)?.is_normal();
        let hb = normalize_tau(&plug(ctx, b), calculus, strategy, fuel)?.is_normal();
        if ha != hb {
            return Ok(Verdict::Distinguished(vec![TraceStep {
                text: context_text(ctx),
                label: None,
                side: if ha { Side::Left } else { Side::Right },
                reason: StepReason::Observability,
            }]));
        }
    }
    Ok(Verdict::Unknown(UnknownReason::PoolLimited))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_closed_lambda;

    fn lam(s: &str) -> Term {
        Term::Lambda(parse_closed_lambda(s).unwrap())
    }

    #[test]
    fn alpha_equal_terms_are_equivalent() {
        let v = applicative_oracle(&lam("\\x. x"), &lam("\\y. y"), Strategy::Lazy, 2, 3, 100).unwrap();
        assert_eq!(v, Verdict::Equivalent(3));
    }

    #[test]
    fn identity_and_k_are_separated() {
        let v = applicative_oracle(&lam("\\x. x"), &lam("\\x y. x"), Strategy::Lazy, 2, 3, 100).unwrap();
        assert!(v.is_distinguished());
        // Replay: the trace arguments make exactly one side diverge.
        let args: Vec<Term> = v.trace()[..v.trace().len() - 1]
            .iter()
            .map(|s| s.label.as_ref().unwrap().args[0].clone())
            .collect();
        let run = |t: &Term| {
            let applied = args.iter().fold(t.clone(), |acc, p| apply(&acc, p));
            normalize_tau(&applied, Calculus::Lambda, Strategy::Lazy, 100).unwrap().is_normal()
        };
        assert_ne!(run(&lam("\\x. x")), run(&lam("\\x y. x")));
    }

    #[test]
    fn divergence_is_unknown() {
        let omega = lam("(\\x. x x) (\\x. x x)");
        assert_eq!(
            applicative_oracle(&omega, &omega, Strategy::Lazy, 2, 2, 50).unwrap(),
            Verdict::Unknown(UnknownReason::FuelExhausted)
        );
    }

    #[test]
    fn contexts_separate_identity_from_k() {
        let id = lam("\\x. x");
        let v = contextual_oracle(&id, &lam("\\x y. x"), Strategy::Lazy, 5, 200).unwrap();
        assert!(v.is_distinguished());
        let same = contextual_oracle(&id, &lam("(\\x. x) (\\x. x)"), Strategy::Lazy, 5, 200).unwrap();
        assert_eq!(same, Verdict::Unknown(UnknownReason::PoolLimited));
        assert!(!contextual_oracle(&id, &id, Strategy::Cbv, 4, 200).unwrap().is_distinguished());
    }

    #[test]
    fn context_counts() {
        let mut memo = HashMap::new();
        assert_eq!(lambda_contexts(1, 0, 1, &mut memo).len(), 1);
        // [ ] bot, bot [ ], \v0. [ ]
        assert_eq!(lambda_contexts(2, 0, 1, &mut memo).len(), 3);
    }

    #[test]
    fn cl_contexts_find_a_witness() {
        let k = Term::Cl(ClTerm::K);
        let s = Term::Cl(ClTerm::S);
        assert!(contextual_oracle(&k, &s, Strategy::Lazy, 5, 200).unwrap().is_distinguished());
        assert!(applicative_oracle(&k, &s, Strategy::Lazy, 1, 2, 200).unwrap().is_distinguished());
    }
}
