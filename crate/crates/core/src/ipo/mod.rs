//! Label enumeration and weak transitions for every configured LTS.

mod check;
mod explore;
mod generic;
pub mod label;
mod table;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use check::{check_tables, TableDiff, TableReport};
pub use explore::{Transition, TransitionGraph};
pub use label::{canonicalize, sort_labels, ArgDisplay, Label};
pub use table::{probes, Pools};

use crate::error::{Error, Result};
use crate::reduction::{
    normalize_tau, step_cl_unchecked, step_lambda_unchecked, Calculus, NormalizeOutcome,
    Strategy,
};
use crate::terms::{ClTerm, LambdaTerm, Meta, Term};

pub const DEFAULT_ARG_POOL: usize = 3;
pub const DEFAULT_ARG_BOUND: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSet {
    /// Only contexts that place the term in a reactive position.
    ReactiveOnly,
    /// Reactive contexts plus the non-reactive left-applicant family.
    AllIpo,
    /// The finitely branching lazy second-order set.
    Finite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::First => "first",
            Order::Second => "second",
        })
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelSet::ReactiveOnly => "reactive",
            LabelSet::AllIpo => "all",
            LabelSet::Finite => "finite",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    pub calculus: Calculus,
    pub order: Order,
    pub strategy: Strategy,
    pub labels: LabelSet,
    /// Size bound of the closed terms used as first-order label arguments.
    pub arg_pool: usize,
    /// Longest argument vector a head variable is instantiated with in the
    /// unpruned lazy second-order set.
    pub arg_bound: usize,
}

impl Config {
    pub fn new(calculus: Calculus, order: Order, strategy: Strategy, labels: LabelSet) -> Self {
        Config {
            calculus,
            order,
            strategy,
            labels,
            arg_pool: DEFAULT_ARG_POOL,
            arg_bound: DEFAULT_ARG_BOUND,
        }
    }

    /// `(clstar, second, lazy, finite)`.
    pub fn lazy_finite() -> Self {
        Config::new(Calculus::ClStar, Order::Second, Strategy::Lazy, LabelSet::Finite)
    }

    /// `(clstar, second, cbv, reactive)`.
    pub fn cbv_second() -> Self {
        Config::new(Calculus::ClStar, Order::Second, Strategy::Cbv, LabelSet::ReactiveOnly)
    }

    pub fn with_arg_pool(mut self, n: usize) -> Self {
        self.arg_pool = n;
        self
    }

    pub fn with_arg_bound(mut self, n: usize) -> Self {
        self.arg_bound = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::UnsupportedConfig(format!("{self}: {why}")));
        if self.strategy == Strategy::NormalFull {
            return bad("labels are defined for lazy and cbv only");
        }
        if self.order == Order::Second && self.calculus != Calculus::ClStar {
            return bad("second-order labels exist for CL* only");
        }
        match self.labels {
            LabelSet::Finite
                if (self.calculus, self.order, self.strategy)
                    != (Calculus::ClStar, Order::Second, Strategy::Lazy) =>
            {
                bad("the finite label set is defined for lazy second-order CL* only")
            }
            LabelSet::AllIpo
                if self.calculus != Calculus::ClStar
                    || (self.order == Order::Second && self.strategy != Strategy::Lazy) =>
            {
                bad("all-IPO labels are available for first-order CL* and lazy second-order CL*")
            }
            _ if self.order == Order::First && self.arg_pool == 0 => {
                bad("first-order labels need an argument pool of size at least 1")
            }
            _ => Ok(()),
        }
    }

    /// Whether a surviving game certifies equivalence outright. Pools,
    /// truncated argument families and non-reactive labels make the label
    /// sets approximate, so those configurations only report `Unknown`.
    pub fn is_exact(&self) -> bool {
        self.order == Order::Second
            && match self.strategy {
                Strategy::Lazy => self.labels == LabelSet::Finite,
                _ => self.labels == LabelSet::ReactiveOnly,
            }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.calculus, self.order, self.strategy, self.labels
        )
    }
}

/// Result of a weak transition `t ⇒τ t' →l u' ⇒τ u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakOutcome {
    Target { term: Term, tau_steps: usize },
    NotEnabled,
    FuelExhausted { tau_steps: usize },
}

impl WeakOutcome {
    pub fn target(&self) -> Option<&Term> {
        match self {
            WeakOutcome::Target { term, .. } => Some(term),
            _ => None,
        }
    }
}

/// A configured LTS; caches the first-order argument pools.
#[derive(Clone, Debug)]
pub struct Lts {
    cfg: Config,
    pools: Pools,
}

impl Lts {
    pub fn new(cfg: Config) -> Result<Lts> {
        cfg.validate()?;
        Ok(Lts {
            pools: Pools::new(&cfg),
            cfg,
        })
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn pools(&self) -> &Pools {
        &self.pools
    }

    /// Rejects terms of the wrong syntax or outside the calculus.
    pub fn check_state(&self, t: &Term) -> Result<()> {
        match (t, self.cfg.calculus) {
            (Term::Lambda(_), Calculus::Lambda) => Ok(()),
            (Term::Cl(c), Calculus::Cl) if !c.is_plain_cl() => Err(Error::NotInCalculus {
                calculus: "CL",
                term: c.to_string(),
            }),
            (Term::Cl(_), Calculus::Cl | Calculus::ClStar) => Ok(()),
            _ => Err(Error::UnsupportedConfig(format!(
                "term syntax does not match calculus {}",
                self.cfg.calculus
            ))),
        }
    }

    /// Labels of `state`, with fresh names chosen apart from its own
    /// metavariables.
    pub fn labels(&self, state: &Term) -> Result<Vec<Label<Term>>> {
        self.labels_avoiding(state, &BTreeSet::new())
    }

    /// Labels of `state` whose fresh names also avoid `avoid`.
    pub fn labels_avoiding(&self, state: &Term, avoid: &BTreeSet<Meta>) -> Result<Vec<Label<Term>>> {
        self.check_state(state)?;
        match (self.cfg.order, state) {
            (Order::Second, Term::Cl(c)) => {
                let mut avoid = avoid.clone();
                avoid.extend(c.free_metavars());
                Ok(table::second_order_table(c, &self.cfg, &avoid)?
                    .into_iter()
                    .map(Label::into_term)
                    .collect())
            }
            _ => {
                let mut labels = table::first_order_table(state, &self.cfg, &self.pools)?;
                sort_labels(&mut labels);
                Ok(labels)
            }
        }
    }

    pub fn normalize(&self, state: &Term, fuel: usize) -> Result<NormalizeOutcome<Term>> {
        self.check_state(state)?;
        if self.cfg.order == Order::Second {
            // Second-order states are open by design.
            if let Term::Cl(c) = state {
                let o = crate::reduction::normalize_cl_unchecked(
                    c,
                    self.cfg.calculus,
                    self.cfg.strategy,
                    fuel,
                );
                return Ok(NormalizeOutcome {
                    result: Term::Cl(o.result),
                    status: o.status,
                    steps: o.steps,
                });
            }
        }
        normalize_tau(state, self.cfg.calculus, self.cfg.strategy, fuel)
    }

    /// `C[state θ]`, the term a label places the state in.
    pub fn plug(&self, state: &Term, l: &Label<Term>) -> Result<Term> {
        match state {
            Term::Cl(c) => {
                let cl = l.as_cl().ok_or_else(|| {
                    Error::UnsupportedConfig("λ-term in a label for a CL state".into())
                })?;
                let mut t = cl.subst.apply(c);
                if let Some(left) = cl.left {
                    t = ClTerm::app(left, t);
                }
                Ok(Term::Cl(ClTerm::apply_all(t, cl.args)))
            }
            Term::Lambda(m) => {
                if !l.subst.is_empty() {
                    return Err(Error::UnsupportedConfig(
                        "λ-calculus labels carry no substitution".into(),
                    ));
                }
                let lam = |t: &Term| match t {
                    Term::Lambda(x) => Ok(x.clone()),
                    Term::Cl(_) => Err(Error::UnsupportedConfig(
                        "CL term in a label for a λ state".into(),
                    )),
                };
                let mut t = m.clone();
                if let Some(left) = &l.left {
                    t = LambdaTerm::app(lam(left)?, t);
                }
                let args = l.args.iter().map(lam).collect::<Result<Vec<_>>>()?;
                Ok(Term::Lambda(LambdaTerm::apply_all(t, args)))
            }
        }
    }

    /// Builds `C[state θ]` and fires exactly one reaction step.
    pub fn apply(&self, state: &Term, l: &Label<Term>) -> Result<Term> {
        self.check_state(state)?;
        let plugged = self.plug(state, l)?;
        let next = match &plugged {
            Term::Cl(c) => step_cl_unchecked(c, self.cfg.calculus, self.cfg.strategy).stepped().map(Term::Cl),
            Term::Lambda(m) => step_lambda_unchecked(m, self.cfg.strategy).stepped().map(Term::Lambda),
        };
        next.ok_or_else(|| Error::NotEnabled {
            label: l.to_string(),
            state: state.to_string(),
        })
    }

    /// Whether `l`, up to renaming of its fresh names, labels the τ-normal
    /// state `nf`.
    pub fn enabled(&self, nf: &Term, l: &Label<Term>) -> Result<bool> {
        let labels = self.labels(nf)?;
        let wanted = match (l.as_cl(), nf) {
            (Some(cl), Term::Cl(c)) => canonicalize(&cl, &c.free_metavars()).into_term(),
            _ => l.clone(),
        };
        Ok(labels.contains(&wanted))
    }

    pub fn weak_successor(&self, state: &Term, l: &Label<Term>, fuel: usize) -> Result<WeakOutcome> {
        let pre = self.normalize(state, fuel)?;
        if !pre.is_normal() {
            return Ok(WeakOutcome::FuelExhausted { tau_steps: pre.steps });
        }
        if l.is_tau() {
            return Ok(WeakOutcome::Target {
                term: pre.result,
                tau_steps: pre.steps,
            });
        }
        if !self.enabled(&pre.result, l)? {
            return Ok(WeakOutcome::NotEnabled);
        }
        Ok(match self.fire_and_settle(&pre.result, l, fuel)? {
            WeakOutcome::Target { term, tau_steps } => WeakOutcome::Target {
                term,
                tau_steps: tau_steps + pre.steps,
            },
            WeakOutcome::FuelExhausted { tau_steps } => WeakOutcome::FuelExhausted {
                tau_steps: tau_steps + pre.steps,
            },
            other => other,
        })
    }

    /// Fires a visible label at a τ-normal state and τ-normalises the
    /// residual, without checking that the label belongs to the state.
    pub(crate) fn fire_and_settle(&self, nf: &Term, l: &Label<Term>, fuel: usize) -> Result<WeakOutcome> {
        let fired = match self.apply(nf, l) {
            Ok(t) => t,
            Err(Error::NotEnabled { .. }) => return Ok(WeakOutcome::NotEnabled),
            Err(e) => return Err(e),
        };
        let post = self.normalize(&fired, fuel)?;
        Ok(if post.is_normal() {
            WeakOutcome::Target {
                term: post.result,
                tau_steps: post.steps,
            }
        } else {
            WeakOutcome::FuelExhausted { tau_steps: post.steps }
        })
    }

    pub fn explore(&self, root: &Term, depth: usize, fuel: usize) -> Result<TransitionGraph> {
        explore::explore(self, root, depth, fuel)
    }
}

/// The table-driven label set of `state` under `cfg`.
pub fn labels_table(state: &Term, cfg: &Config) -> Result<Vec<Label<Term>>> {
    Lts::new(*cfg)?.labels(state)
}

/// Reactive labels of a second-order CL* state derived by unification.
/// Under the finite label set the engine prunes labels whose redex lies
/// inside the instantiated head variable.
pub fn labels_generic(state: &ClTerm, cfg: &Config) -> Result<Vec<Label<ClTerm>>> {
    labels_generic_avoiding(state, cfg, &BTreeSet::new())
}

pub fn labels_generic_avoiding(
    state: &ClTerm,
    cfg: &Config,
    avoid: &BTreeSet<Meta>,
) -> Result<Vec<Label<ClTerm>>> {
    cfg.validate()?;
    if cfg.order != Order::Second || cfg.labels == LabelSet::AllIpo {
        return Err(Error::UnsupportedConfig(format!(
            "{cfg}: the unification engine derives reactive second-order labels only"
        )));
    }
    let pruned = cfg.labels == LabelSet::Finite;
    Ok(generic::derive_labels(state, cfg.strategy, pruned, cfg.arg_bound, avoid))
}

pub fn apply_label(state: &Term, l: &Label<Term>, cfg: &Config) -> Result<Term> {
    Lts::new(*cfg)?.apply(state, l)
}

pub fn weak_successor(state: &Term, l: &Label<Term>, cfg: &Config, fuel: usize) -> Result<WeakOutcome> {
    Lts::new(*cfg)?.weak_successor(state, l, fuel)
}

pub fn lts_explore(root: &Term, cfg: &Config, depth: usize, fuel: usize) -> Result<TransitionGraph> {
    Lts::new(*cfg)?.explore(root, depth, fuel)
}
