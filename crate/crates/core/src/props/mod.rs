//! Exhaustive and randomised invariant checks over the term enumerations.

pub mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ipo::{canonicalize, Config, Label, Lts};
use crate::reduction::{
    plain_cbv_value, step_cl_unchecked, step_lambda_unchecked, Calculus, StepResult, Strategy,
};
use crate::terms::{
    alpha_eq, classify_cbv, classify_lazy, cr, enumerate_closed_lambda, enumerate_terms,
    par_for_each_term, parse_cl, parse_lambda, ClTerm, Flavor, LambdaTerm, Meta, SpineClass, Term,
};
use crate::unify::mgu;
use reference::{reducts_cl, reducts_lambda};

#[derive(Clone, Debug, Serialize)]
pub struct InvariantOptions {
    /// Size bound for closed CL* and λ-terms.
    pub max_size: usize,
    /// Size bound for CL* terms over two metavariables.
    pub open_size: usize,
    pub mgu_pairs: usize,
    pub seed: u64,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            max_size: 8,
            open_size: 6,
            mgu_pairs: 10_000,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// The smallest failing case, by printed length then text.
    pub example: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub options: InvariantOptions,
    pub properties: Vec<PropertyResult>,
    /// Stuck cbv terms outside the cbv grammar that have no critical variable.
    pub cbv_no_class: u64,
    pub wall_ms: Option<u64>,
}

impl InvariantReport {
    pub fn all_green(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

const NAMES: [&str; 13] = [
    "parse-print",
    "stepper-determinism",
    "stepper-agreement",
    "cbv-values-halt",
    "subject-closure",
    "classify-lazy-partition",
    "classify-cbv-partition",
    "critical-variable-occurs",
    "finite-branching",
    "tau-enabledness",
    "label-canonical",
    "mgu-sound-idempotent",
    "mgu-general",
];

struct Tally {
    cases: Vec<AtomicU64>,
    failures: Vec<AtomicU64>,
    examples: Vec<Mutex<Option<String>>>,
    no_class: AtomicU64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: NAMES.iter().map(|_| AtomicU64::new(0)).collect(),
            failures: NAMES.iter().map(|_| AtomicU64::new(0)).collect(),
            examples: NAMES.iter().map(|_| Mutex::new(None)).collect(),
            no_class: AtomicU64::new(0),
        }
    }

    fn check(&self, name: &str, ok: bool, example: impl FnOnce() -> String) {
        let i = NAMES.iter().position(|n| *n == name).expect("known property");
        self.cases[i].fetch_add(1, Ordering::Relaxed);
        if !ok {
            self.failures[i].fetch_add(1, Ordering::Relaxed);
            let ex = example();
            let mut slot = self.examples[i].lock().expect("tally lock");
            let smaller = match &*slot {
                None => true,
                Some(old) => (ex.len(), &ex) < (old.len(), old),
            };
            if smaller {
                *slot = Some(ex);
            }
        }
    }

    fn finish(self, options: InvariantOptions, wall_ms: Option<u64>) -> InvariantReport {
        let properties = NAMES
            .iter()
            .enumerate()
            .map(|(i, name)| PropertyResult {
                name,
                cases: self.cases[i].load(Ordering::Relaxed),
                failures: self.failures[i].load(Ordering::Relaxed),
                example: self.examples[i].lock().expect("tally lock").take(),
            })
            .collect();
        InvariantReport {
            options,
            properties,
            cbv_no_class: self.no_class.load(Ordering::Relaxed),
            wall_ms,
        }
    }
}

fn cl_modes(t: &ClTerm) -> Vec<(Calculus, Strategy)> {
    let mut modes = vec![
        (Calculus::ClStar, Strategy::Lazy),
        (Calculus::ClStar, Strategy::Cbv),
    ];
    if t.is_plain_cl() {
        modes.push((Calculus::Cl, Strategy::Lazy));
        modes.push((Calculus::Cl, Strategy::Cbv));
    }
    modes
}

fn check_steppers(tally: &Tally, t: &ClTerm) {
    for (calc, strat) in cl_modes(t) {
        let main = step_cl_unchecked(t, calc, strat);
        let refs = reducts_cl(t, calc, strat);
        let tag = || format!("{t} [{calc}, {strat}]");
        tally.check("stepper-determinism", refs.len() <= 1, tag);
        let agree = match &main {
            StepResult::Stepped(u) => refs.len() == 1 && refs[0] == *u,
            _ => refs.is_empty(),
        };
        tally.check("stepper-agreement", agree, tag);
        if let StepResult::Stepped(u) = &main {
            let closed = !t.is_closed() || u.is_closed();
            let grammar = match (calc, strat) {
                (Calculus::Cl, _) => u.is_plain_cl(),
                (_, Strategy::Cbv) => !t.in_cbv_grammar() || u.in_cbv_grammar(),
                _ => true,
            };
            tally.check("subject-closure", closed && grammar, tag);
        }
        if strat == Strategy::Cbv {
            let value = match calc {
                Calculus::Cl => plain_cbv_value(t),
                _ => t.is_cbv_value(),
            };
            if value {
                tally.check("cbv-values-halt", !matches!(main, StepResult::Stepped(_)), tag);
            }
        }
    }
}

fn check_classification(tally: &Tally, t: &ClTerm) {
    let (bottom, args) = t.spine();
    let lazy_steps = matches!(
        step_cl_unchecked(t, Calculus::ClStar, Strategy::Lazy),
        StepResult::Stepped(_)
    );
    // Independent guards; exactly one must hold.
    let guards = [
        matches!(t, ClTerm::Meta(_)),
        matches!(bottom, ClTerm::Meta(_)) && !args.is_empty(),
        t.is_lazy_value(),
        lazy_steps,
    ];
    let expected = match classify_lazy(t) {
        SpineClass::BareVar(_) => 0,
        SpineClass::HeadStuck(..) => 1,
        SpineClass::Value => 2,
        SpineClass::Reducible => 3,
        SpineClass::Critical(_) => usize::MAX,
    };
    let one = guards.iter().filter(|g| **g).count() == 1;
    tally.check("classify-lazy-partition", one && guards.get(expected) == Some(&true), || {
        t.to_string()
    });

    let cbv = step_cl_unchecked(t, Calculus::ClStar, Strategy::Cbv);
    let crit = cr(t);
    if let Some(x) = &crit {
        tally.check("critical-variable-occurs", t.contains_meta(x), || t.to_string());
    }
    let ok = match classify_cbv(t) {
        Ok(SpineClass::BareVar(_)) => matches!(t, ClTerm::Meta(_)),
        Ok(SpineClass::Value) => t.is_cbv_value() && !matches!(t, ClTerm::Meta(_)),
        Ok(SpineClass::Reducible) => matches!(cbv, StepResult::Stepped(_)) && !t.is_cbv_value(),
        Ok(SpineClass::Critical(x)) => cbv == StepResult::StuckOpen(x.clone()) && crit == Some(x),
        Ok(SpineClass::HeadStuck(..)) => false,
        Err(_) => {
            if !t.in_cbv_grammar() {
                tally.no_class.fetch_add(1, Ordering::Relaxed);
            }
            // Outside the cbv grammar a stuck term may lack a critical
            // variable; inside it, never.
            !t.in_cbv_grammar() && matches!(cbv, StepResult::StuckOpen(_)) && crit.is_none()
        }
    };
    tally.check("classify-cbv-partition", ok, || t.to_string());
}

fn check_labels(tally: &Tally, t: &ClTerm, finite: &Lts, cbv: &Lts) {
    let state = Term::Cl(t.clone());
    let metas = t.free_metavars();
    let canonical = |labels: &[Label<Term>]| {
        let cls: Vec<Label<ClTerm>> = labels.iter().filter_map(|l| l.as_cl()).collect();
        let stable = cls.iter().all(|l| canonicalize(l, &metas) == *l);
        let distinct = cls.iter().collect::<std::collections::HashSet<_>>().len() == cls.len();
        stable && distinct && cls.len() == labels.len()
    };
    match finite.labels(&state) {
        Ok(labels) => {
            let class = classify_lazy(t);
            let exact_one = matches!(class, SpineClass::Value | SpineClass::Reducible);
            let bounded = labels.len() <= 5 && (!exact_one || labels.len() == 1);
            tally.check("finite-branching", bounded, || t.to_string());
            let tau = labels.iter().any(Label::is_tau);
            tally.check("tau-enabledness", tau == (class == SpineClass::Reducible), || {
                format!("{t} [lazy]")
            });
            tally.check("label-canonical", canonical(&labels), || format!("{t} [lazy]"));
        }
        Err(e) => tally.check("finite-branching", false, || format!("{t}: {e}")),
    }
    if !t.in_cbv_grammar() {
        return;
    }
    match (cbv.labels(&state), classify_cbv(t)) {
        (Ok(labels), Ok(class)) => {
            let tau = labels.iter().any(Label::is_tau);
            tally.check("tau-enabledness", tau == (class == SpineClass::Reducible), || {
                format!("{t} [cbv]")
            });
            tally.check("label-canonical", canonical(&labels), || format!("{t} [cbv]"));
        }
        (Err(e), _) | (_, Err(e)) => tally.check("tau-enabledness", false, || format!("{t}: {e}")),
    }
}

fn check_lambda(tally: &Tally, t: &LambdaTerm) {
    let printed = t.to_string();
    let round = parse_lambda(&printed).map(|u| alpha_eq(&u, t)).unwrap_or(false);
    tally.check("parse-print", round, || printed.clone());
    for strat in [Strategy::Lazy, Strategy::Cbv] {
        let main = step_lambda_unchecked(t, strat);
        let refs = reducts_lambda(t, strat);
        let tag = || format!("{t} [lambda, {strat}]");
        tally.check("stepper-determinism", refs.len() <= 1, tag);
        let agree = match &main {
            StepResult::Stepped(u) => refs.len() == 1 && alpha_eq(&refs[0], u),
            _ => refs.is_empty(),
        };
        tally.check("stepper-agreement", agree, tag);
        if let StepResult::Stepped(u) = &main {
            tally.check("subject-closure", u.is_closed(), tag);
        }
        if strat == Strategy::Cbv && t.is_abs() {
            tally.check("cbv-values-halt", !matches!(main, StepResult::Stepped(_)), tag);
        }
    }
}

/// One-sided matching: extends `rho` so that `rho(pat) == ground`.
fn match_into(pat: &ClTerm, ground: &ClTerm, rho: &mut BTreeMap<Meta, ClTerm>) -> bool {
    match (pat, ground) {
        (ClTerm::Meta(x), _) => match rho.get(x) {
            Some(bound) => bound == ground,
            None => {
                rho.insert(x.clone(), ground.clone());
                true
            }
        },
        (ClTerm::K, ClTerm::K) | (ClTerm::S, ClTerm::S) => true,
        (ClTerm::Kp(m), ClTerm::Kp(n)) | (ClTerm::Sp(m), ClTerm::Sp(n)) => match_into(m, n, rho),
        (ClTerm::Spp(m1, m2), ClTerm::Spp(n1, n2)) | (ClTerm::App(m1, m2), ClTerm::App(n1, n2)) => {
            match_into(m1, n1, rho) && match_into(m2, n2, rho)
        }
        _ => false,
    }
}

/// Ground substitutions over a three-term pool that unify `a` and `b`.
fn ground_unifiers(a: &ClTerm, b: &ClTerm, vars: &[Meta]) -> Vec<crate::terms::Substitution> {
    let pool = [ClTerm::K, ClTerm::S, ClTerm::kp(ClTerm::S)];
    let mut out = Vec::new();
    let total = pool.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let sigma: crate::terms::Substitution = vars
            .iter()
            .map(|v| {
                let pick = pool[code % pool.len()].clone();
                code /= pool.len();
                (v.clone(), pick)
            })
            .collect();
        if sigma.apply(a) == sigma.apply(b) {
            out.push(sigma);
        }
    }
    out
}

fn check_mgu_pair(tally: &Tally, a: &ClTerm, b: &ClTerm) {
    let tag = || format!("{a} =? {b}");
    let mut vars: BTreeSet<Meta> = a.free_metavars();
    vars.extend(b.free_metavars());
    let vars: Vec<Meta> = vars.into_iter().collect();
    let grounds = if vars.len() <= 5 {
        ground_unifiers(a, b, &vars)
    } else {
        Vec::new()
    };
    match mgu(a, b) {
        Ok(theta) => {
            let ta = theta.apply(a);
            let sound = ta == theta.apply(b) && theta.apply(&ta) == ta && theta.is_idempotent();
            tally.check("mgu-sound-idempotent", sound, tag);
            for sigma in &grounds {
                let mut rho = BTreeMap::new();
                let general = vars.iter().all(|v| {
                    match_into(&theta.apply(&ClTerm::Meta(v.clone())), &sigma.apply(&ClTerm::Meta(v.clone())), &mut rho)
                });
                tally.check("mgu-general", general, || format!("{a} =? {b} with {sigma}"));
            }
        }
        Err(_) => {
            tally.check("mgu-sound-idempotent", true, tag);
            // A failure is wrong if some ground instance unifies.
            tally.check("mgu-general", grounds.is_empty(), tag);
        }
    }
}

fn mgu_pairs(n: usize, size: usize, seed: u64) -> Vec<(ClTerm, ClTerm)> {
    let xy = [Meta::new("x"), Meta::new("y")];
    let zw = [Meta::new("z"), Meta::new("w")];
    let big = enumerate_terms(size, &xy, Flavor::ClStar);
    let small = enumerate_terms(size.min(4), &xy, Flavor::ClStar);
    let pieces = enumerate_terms(3, &zw, Flavor::ClStar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let apart = |t: &ClTerm| {
        t.rename_metas(&|m| {
            Some(Meta::new(if m.name() == "x" { "z" } else { "w" }))
        })
    };
    (0..n)
        .map(|i| {
            // Small terms first so that random pairs unify often enough to
            // say something; the instance third always unifies.
            let source = if rng.gen_bool(0.5) { &small } else { &big };
            let a = source.choose(&mut rng).expect("non-empty").clone();
            let b = match i % 3 {
                0 => source.choose(&mut rng).expect("non-empty").clone(),
                1 => apart(source.choose(&mut rng).expect("non-empty")),
                _ => {
                    let sigma: crate::terms::Substitution = a
                        .free_metavars()
                        .into_iter()
                        .map(|v| (v, pieces.choose(&mut rng).expect("non-empty").clone()))
                        .collect();
                    sigma.apply(&a)
                }
            };
            (a, b)
        })
        .collect()
}

/// Runs every invariant over the enumerations described by `options`.
pub fn run_invariants(options: &InvariantOptions) -> InvariantReport {
    let start = Instant::now();
    let tally = Tally::new();

    par_for_each_term(options.max_size, &[], Flavor::ClStar, |t| {
        let printed = t.to_string();
        tally.check("parse-print", parse_cl(&printed).as_ref() == Ok(t), || printed.clone());
        check_steppers(&tally, t);
    });

    let finite = Lts::new(Config::lazy_finite()).expect("valid config");
    let cbv = Lts::new(Config::cbv_second()).expect("valid config");
    let xy = [Meta::new("x"), Meta::new("y")];
    par_for_each_term(options.open_size, &xy, Flavor::ClStar, |t| {
        if t.is_closed() {
            // Closed terms were stepped above; classification still applies.
            check_classification(&tally, t);
            check_labels(&tally, t, &finite, &cbv);
            return;
        }
        let printed = t.to_string();
        tally.check("parse-print", parse_cl(&printed).as_ref() == Ok(t), || printed.clone());
        check_steppers(&tally, t);
        check_classification(&tally, t);
        check_labels(&tally, t, &finite, &cbv);
    });

    enumerate_closed_lambda(options.max_size)
        .par_iter()
        .for_each(|t| check_lambda(&tally, t));

    mgu_pairs(options.mgu_pairs, options.open_size, options.seed)
        .par_iter()
        .for_each(|(a, b)| check_mgu_pair(&tally, a, b));

    let wall = start.elapsed().as_millis() as u64;
    tally.finish(options.clone(), Some(wall))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_green() {
        let report = run_invariants(&InvariantOptions {
            max_size: 4,
            open_size: 3,
            mgu_pairs: 300,
            seed: 7,
        });
        for p in &report.properties {
            assert_eq!(p.failures, 0, "{}: {:?}", p.name, p.example);
            assert!(p.cases > 0, "{} never ran", p.name);
        }
    }

    #[test]
    fn matching_respects_repeated_variables() {
        let pat = parse_cl("?x ?x").unwrap();
        let mut rho = BTreeMap::new();
        assert!(!match_into(&pat, &parse_cl("K S").unwrap(), &mut rho));
        let mut rho = BTreeMap::new();
        assert!(match_into(&pat, &parse_cl("K K").unwrap(), &mut rho));
    }

    #[test]
    fn mgu_checks_on_a_simple_pair() {
        let tally = Tally::new();
        let a = parse_cl("?x K").unwrap();
        let b = parse_cl("S ?y").unwrap();
        check_mgu_pair(&tally, &a, &b);
        let report = tally.finish(InvariantOptions::default(), None);
        assert!(report.all_green());
        assert!(report.property("mgu-general").unwrap().cases > 0);
    }
}
