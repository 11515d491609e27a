use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::game::{check_weak_bisim_with, BisimOptions};
use super::{TraceStep, Verdict};
use crate::error::{Error, Result};
use crate::ipo::{Config, Order};
use crate::reduction::Strategy;
use crate::terms::{enumerate_terms, ClTerm, Flavor, Meta, Substitution, Term};

/// Size bound of the terms placed in contexts and substitutions.
const PIECE_SIZE: usize = 2;
/// Most application layers wrapped around the hole.
const MAX_LAYERS: usize = 3;
const HOLE: &str = "#hole";

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub pair: usize,
    pub context: String,
    pub subst: String,
    pub left: String,
    pub right: String,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub seed: u64,
    pub samples: usize,
    pub certified_depth: usize,
    pub check_depth: usize,
    pub equivalent: usize,
    pub unknown: usize,
    pub violations: Vec<Violation>,
}

struct Sample {
    pair: usize,
    context: ClTerm,
    theta: Substitution,
}

fn as_cl(t: &Term) -> Result<&ClTerm> {
    match t {
        Term::Cl(c) => Ok(c),
        Term::Lambda(_) => Err(Error::UnsupportedConfig(
            "the congruence harness works on CL terms".into(),
        )),
    }
}

fn draw(rng: &mut ChaCha8Rng, pieces: &[ClTerm], pairs: &[(ClTerm, ClTerm)], cfg: &Config) -> Sample {
    let pair = rng.gen_range(0..pairs.len());
    let mut context = ClTerm::meta(HOLE);
    for _ in 0..rng.gen_range(0..=MAX_LAYERS) {
        let m = pieces.choose(rng).expect("non-empty piece pool").clone();
        context = if rng.gen_bool(0.5) {
            ClTerm::app(context, m)
        } else {
            ClTerm::app(m, context)
        };
    }
    let (a, b) = &pairs[pair];
    let vars: BTreeSet<Meta> = a.free_metavars().union(&b.free_metavars()).cloned().collect();
    let values: Vec<&ClTerm> = pieces
        .iter()
        .filter(|p| cfg.strategy != Strategy::Cbv || p.is_cbv_value())
        .collect();
    let mut theta = Substitution::new();
    for v in vars {
        if rng.gen_bool(0.5) {
            theta.insert(v, (*values.choose(rng).expect("values in pool")).clone());
        }
    }
    Sample { pair, context, theta }
}

/// Checks empirically that the relation is preserved by contexts and
/// substitutions: each pair must first be certified equivalent at `depth`;
/// then `samples` random context/substitution instances are checked at
/// `depth - 2` and must never be distinguished. Samples are drawn from a
/// ChaCha8 stream seeded with `seed`, so reports are reproducible.
pub fn congruence_harness(
    pairs: &[(Term, Term)],
    cfg: &Config,
    samples: usize,
    seed: u64,
    depth: usize,
    fuel: usize,
) -> Result<HarnessReport> {
    if pairs.is_empty() {
        return Err(Error::Precondition("no pairs given".into()));
    }
    let certify = BisimOptions {
        depth,
        fuel,
        ..BisimOptions::default()
    };
    let mut cl_pairs = Vec::new();
    for (a, b) in pairs {
        let verdict = check_weak_bisim_with(a, b, cfg, &certify)?.verdict;
        if !verdict.is_equivalent() {
            return Err(Error::Precondition(format!(
                "{a} and {b} are not certified equivalent at depth {depth}: {verdict}"
            )));
        }
        cl_pairs.push((as_cl(a)?.clone(), as_cl(b)?.clone()));
    }

    let mut pool: Vec<Meta> = Vec::new();
    if cfg.order == Order::Second {
        let mut names: BTreeSet<Meta> = cl_pairs
            .iter()
            .flat_map(|(a, b)| a.free_metavars().into_iter().chain(b.free_metavars()))
            .collect();
        names.insert(Meta::new("w"));
        pool.extend(names);
    }
    let flavor = match cfg.calculus {
        crate::reduction::Calculus::Cl => Flavor::Cl,
        _ => Flavor::ClStar,
    };
    let pieces = enumerate_terms(PIECE_SIZE, &pool, flavor);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn: Vec<Sample> = (0..samples).map(|_| draw(&mut rng, &pieces, &cl_pairs, cfg)).collect();
    let check_depth = depth.saturating_sub(2);
    let opts = BisimOptions {
        depth: check_depth,
        fuel,
        ..BisimOptions::default()
    };
    let hole = Meta::new(HOLE);
    let verdicts: Vec<Result<(Verdict, ClTerm, ClTerm)>> = drawn
        .par_iter()
        .map(|s| {
            let (a, b) = &cl_pairs[s.pair];
            let plug = |t: &ClTerm| Substitution::singleton(hole.clone(), s.theta.apply(t)).apply(&s.context);
            let (ca, cb) = (plug(a), plug(b));
            let r = check_weak_bisim_with(&Term::Cl(ca.clone()), &Term::Cl(cb.clone()), cfg, &opts)?;
            Ok((r.verdict, ca, cb))
        })
        .collect();

    let mut report = HarnessReport {
        seed,
        samples,
        certified_depth: depth,
        check_depth,
        equivalent: 0,
        unknown: 0,
        violations: Vec::new(),
    };
    for (s, v) in drawn.iter().zip(verdicts) {
        let (verdict, ca, cb) = v?;
        match verdict {
            Verdict::Equivalent(_) => report.equivalent += 1,
            Verdict::Unknown(_) => report.unknown += 1,
            Verdict::Distinguished(trace) => report.violations.push(Violation {
                pair: s.pair,
                context: s.context.to_string().replace(&format!("?{HOLE}"), "[_]"),
                subst: s.theta.to_string(),
                left: ca.to_string(),
                right: cb.to_string(),
                trace,
            }),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_cl;

    fn cl(s: &str) -> Term {
        Term::Cl(parse_cl(s).unwrap())
    }

    #[test]
    fn reflexive_pairs_never_violate() {
        let cfg = Config::lazy_finite();
        let r = congruence_harness(&[(cl("S ?x K"), cl("S ?x K"))], &cfg, 20, 7, 4, 200).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.equivalent + r.unknown, 20);
    }

    #[test]
    fn uncertified_pairs_are_rejected() {
        let cfg = Config::lazy_finite();
        let err = congruence_harness(&[(cl("S K K"), cl("K"))], &cfg, 5, 1, 4, 200).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = Config::lazy_finite();
        let pairs = [(cl("?x"), cl("S K K ?x"))];
        let a = congruence_harness(&pairs, &cfg, 15, 3, 4, 200).unwrap();
        let b = congruence_harness(&pairs, &cfg, 15, 3, 4, 200).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.violations.is_empty());
    }
}
