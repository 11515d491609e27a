//! Table-driven label sets.

use std::collections::BTreeSet;

use super::label::{canonicalize, sort_labels, Label};
use super::{Config, LabelSet, Order};
use crate::error::{Error, Result};
use crate::reduction::{plain_cbv_value, step_cl_unchecked, step_lambda_unchecked, Calculus, StepResult, Strategy};
use crate::terms::{
    classify_cbv, classify_lazy, enumerate_closed_lambda, enumerate_terms, ClTerm, Flavor, Meta,
    SpineClass, Substitution, Term,
};

/// The five probe values `K, S, K'Z1, S'Z1, S''Z1Z2`, with placeholder
/// names that canonicalisation replaces.
pub fn probes() -> [ClTerm; 5] {
    let z1 = || ClTerm::meta("#z1");
    [
        ClTerm::K,
        ClTerm::S,
        ClTerm::kp(z1()),
        ClTerm::sp(z1()),
        ClTerm::spp(z1(), ClTerm::meta("#z2")),
    ]
}

fn placeholder_args(n: usize) -> Vec<ClTerm> {
    (1..=n).map(|i| ClTerm::meta(&format!("#y{i}"))).collect()
}

fn bind(x: &Meta, t: ClTerm) -> Substitution {
    Substitution::singleton(x.clone(), t)
}

fn label(subst: Substitution, left: Option<ClTerm>, args: Vec<ClTerm>) -> Label<ClTerm> {
    Label { subst, left, args }
}

/// Rows of the second-order tables, before canonical renaming.
fn second_order_rows(state: &ClTerm, cfg: &Config) -> Result<Vec<Label<ClTerm>>> {
    let mut out = Vec::new();
    match cfg.strategy {
        Strategy::Lazy => {
            let reactive = cfg.labels != LabelSet::Finite;
            match classify_lazy(state) {
                SpineClass::BareVar(x) => {
                    for a in probes() {
                        out.push(label(bind(&x, a.clone()), None, placeholder_args(1)));
                        if reactive {
                            let head = ClTerm::apply_all(a, placeholder_args(1));
                            out.push(label(bind(&x, head), None, vec![]));
                        }
                    }
                }
                SpineClass::HeadStuck(x, _) => {
                    let widest = if reactive { cfg.arg_bound } else { 0 };
                    for a in probes() {
                        for j in 0..=widest {
                            let head = ClTerm::apply_all(a.clone(), placeholder_args(j));
                            out.push(label(bind(&x, head), None, vec![]));
                        }
                    }
                }
                SpineClass::Value => out.push(label(Substitution::new(), None, placeholder_args(1))),
                SpineClass::Reducible => out.push(Label::tau()),
                SpineClass::Critical(_) => unreachable!("lazy classification"),
            }
            if cfg.labels == LabelSet::AllIpo {
                for a in probes() {
                    out.push(label(Substitution::new(), Some(a), vec![]));
                }
            }
        }
        _ => match classify_cbv(state)? {
            SpineClass::BareVar(x) => {
                for a in probes() {
                    out.push(label(bind(&x, a.clone()), None, placeholder_args(1)));
                    out.push(label(Substitution::new(), Some(a), vec![]));
                }
            }
            SpineClass::Value => {
                out.push(label(Substitution::new(), None, placeholder_args(1)));
                for a in probes() {
                    out.push(label(Substitution::new(), Some(a), vec![]));
                }
            }
            SpineClass::Reducible => out.push(Label::tau()),
            SpineClass::Critical(x) => {
                for a in probes() {
                    out.push(label(bind(&x, a), None, vec![]));
                }
            }
            SpineClass::HeadStuck(..) => unreachable!("cbv classification"),
        },
    }
    Ok(out)
}

/// Second-order table labels, canonically named against `avoid`.
pub(crate) fn second_order_table(
    state: &ClTerm,
    cfg: &Config,
    avoid: &BTreeSet<Meta>,
) -> Result<Vec<Label<ClTerm>>> {
    let mut labels: Vec<Label<ClTerm>> = second_order_rows(state, cfg)?
        .iter()
        .map(|l| canonicalize(l, avoid))
        .collect();
    sort_labels(&mut labels);
    Ok(labels)
}

/// Closed argument pools for first-order labels.
#[derive(Clone, Debug, Default)]
pub struct Pools {
    pub all: Vec<Term>,
    pub values: Vec<Term>,
    pub non_values: Vec<Term>,
}

impl Pools {
    pub fn new(cfg: &Config) -> Pools {
        if cfg.order == Order::Second {
            return Pools::default();
        }
        let all: Vec<Term> = match cfg.calculus {
            Calculus::Lambda => enumerate_closed_lambda(cfg.arg_pool)
                .into_iter()
                .map(Term::Lambda)
                .collect(),
            Calculus::Cl => enumerate_terms(cfg.arg_pool, &[], Flavor::Cl)
                .into_iter()
                .map(Term::Cl)
                .collect(),
            Calculus::ClStar => enumerate_terms(cfg.arg_pool, &[], Flavor::ClStar)
                .into_iter()
                .map(Term::Cl)
                .collect(),
        };
        let is_value = |t: &Term| match (t, cfg.calculus) {
            (Term::Lambda(m), _) => m.is_abs(),
            (Term::Cl(c), Calculus::Cl) => plain_cbv_value(c),
            (Term::Cl(c), _) => c.is_cbv_value(),
        };
        let (values, non_values) = all.iter().cloned().partition(is_value);
        Pools {
            all,
            values,
            non_values,
        }
    }

    /// Arguments for right-hand positions under the configured strategy.
    fn args(&self, strategy: Strategy) -> &[Term] {
        match strategy {
            Strategy::Cbv => &self.values,
            _ => &self.all,
        }
    }
}

fn tuples(pool: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn plain(left: Option<Term>, args: Vec<Term>) -> Label<Term> {
    Label {
        subst: Substitution::new(),
        left,
        args,
    }
}

/// Arguments a plain CL value still needs before its head fires.
fn missing_args(t: &ClTerm) -> usize {
    let (bottom, args) = t.spine();
    let arity: usize = match bottom {
        ClTerm::K => 2,
        ClTerm::S => 3,
        _ => 0,
    };
    arity.saturating_sub(args.len())
}

/// First-order labels: reactive columns with pool-instantiated arguments.
pub(crate) fn first_order_table(state: &Term, cfg: &Config, pools: &Pools) -> Result<Vec<Label<Term>>> {
    let open = match state {
        Term::Lambda(m) => m.first_free().map(|x| x.to_string()),
        Term::Cl(c) => c.metavars().first().map(|m| m.to_string()),
    };
    if let Some(x) = open {
        return Err(Error::OpenTerm(x));
    }
    let reducible = match state {
        Term::Lambda(m) => matches!(step_lambda_unchecked(m, cfg.strategy), StepResult::Stepped(_)),
        Term::Cl(c) => matches!(
            step_cl_unchecked(c, cfg.calculus, cfg.strategy),
            StepResult::Stepped(_)
        ),
    };
    let mut out = Vec::new();
    let all_ipo = cfg.labels == LabelSet::AllIpo;
    if reducible {
        out.push(Label::tau());
        if all_ipo {
            let heads = match cfg.strategy {
                Strategy::Cbv => &pools.non_values,
                _ => &pools.all,
            };
            out.extend(heads.iter().map(|p| plain(Some(p.clone()), vec![])));
        }
        return Ok(out);
    }
    let args = pools.args(cfg.strategy);
    match (state, cfg.calculus) {
        (Term::Cl(c), Calculus::Cl) => {
            let need = missing_args(c);
            out.extend(tuples(args, need).into_iter().map(|v| plain(None, v)));
            if cfg.strategy == Strategy::Cbv {
                cbv_plain_cl_extra(need, pools, &mut out);
            }
        }
        _ => {
            out.extend(args.iter().map(|p| plain(None, vec![p.clone()])));
            if cfg.strategy == Strategy::Cbv {
                for v in &pools.values {
                    match v {
                        Term::Lambda(_) | Term::Cl(_) => out.push(plain(Some(v.clone()), vec![])),
                    }
                }
            }
            if all_ipo {
                let heads = match cfg.strategy {
                    Strategy::Cbv => &pools.non_values,
                    _ => &pools.all,
                };
                out.extend(heads.iter().map(|p| plain(Some(p.clone()), vec![])));
            }
        }
    }
    Ok(out)
}

/// The remaining cbv plain-CL contexts for a value needing `need` arguments:
/// `[ ] V.. P` with a non-value `P`, and the value contexts around K and S.
fn cbv_plain_cl_extra(need: usize, pools: &Pools, out: &mut Vec<Label<Term>>) {
    let vals = &pools.values;
    let k = || Term::Cl(ClTerm::K);
    let s = || Term::Cl(ClTerm::S);
    let app = |f: Term, a: &Term| match (f, a) {
        (Term::Cl(f), Term::Cl(a)) => Term::Cl(ClTerm::app(f, a.clone())),
        _ => unreachable!("plain CL pools"),
    };
    for j in 0..need {
        for prefix in tuples(vals, j) {
            for p in &pools.non_values {
                let mut v = prefix.clone();
                v.push(p.clone());
                out.push(plain(None, v));
            }
        }
    }
    for v in vals {
        out.push(plain(Some(k()), vec![v.clone()]));
        out.push(plain(Some(app(k(), v)), vec![]));
    }
    for v in tuples(vals, 2) {
        out.push(plain(Some(s()), v.clone()));
        out.push(plain(Some(app(s(), &v[0])), vec![v[1].clone()]));
        out.push(plain(Some(app(app(s(), &v[0]), &v[1])), vec![]));
    }
    for p in &pools.non_values {
        out.push(plain(Some(k()), vec![p.clone()]));
        out.push(plain(Some(s()), vec![p.clone()]));
        for v in vals {
            out.push(plain(Some(s()), vec![v.clone(), p.clone()]));
            out.push(plain(Some(app(s(), v)), vec![p.clone()]));
        }
    }
}
