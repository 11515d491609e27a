use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use super::{Report, Side, Stats, StepReason, TraceStep, UnknownReason, Verdict};
use crate::error::{Error, Result};
use crate::ipo::{Config, Label, Lts, WeakOutcome};
use crate::reduction::DEFAULT_FUEL;
use crate::terms::{ClTerm, Meta, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BisimOptions {
    pub depth: usize,
    pub fuel: usize,
    /// Treat two τ-divergent states as related and a halting/divergent
    /// pair as distinguished, instead of answering `Unknown`.
    pub divergence_blind: bool,
    /// Pairs visited before the game gives up with `DepthExhausted`.
    pub max_pairs: usize,
    pub timing: bool,
}

impl Default for BisimOptions {
    fn default() -> Self {
        BisimOptions {
            depth: 6,
            fuel: DEFAULT_FUEL,
            divergence_blind: false,
            max_pairs: 200_000,
            timing: false,
        }
    }
}

enum Outcome {
    Related,
    Distinguished(Vec<TraceStep>),
}

fn metas(t: &Term) -> BTreeSet<Meta> {
    match t {
        Term::Cl(c) => c.free_metavars(),
        Term::Lambda(_) => BTreeSet::new(),
    }
}

/// Printed forms of the pair after a joint renaming of metavariables by
/// first occurrence, so that pairs differing only in names share a key.
fn pair_key(a: &Term, b: &Term) -> (String, String) {
    match (a, b) {
        (Term::Cl(x), Term::Cl(y)) => {
            let mut map: BTreeMap<Meta, Meta> = BTreeMap::new();
            for v in x.metavars().into_iter().chain(y.metavars()) {
                let n = map.len() + 1;
                map.entry(v).or_insert_with(|| Meta::new(&format!("#{n}")));
            }
            let rn = |t: &ClTerm| t.rename_metas(&|v| map.get(v).cloned()).to_string();
            (rn(x), rn(y))
        }
        _ => (a.to_string(), b.to_string()),
    }
}

struct Game<'a> {
    lts: &'a Lts,
    opts: BisimOptions,
    memo: HashMap<(String, String), usize>,
    pairs: usize,
    tau_steps: usize,
    fuel_unknown: bool,
    budget_hit: bool,
    /// Some pair was cut off by the depth bound.
    cut: bool,
    compared_labels: bool,
}

impl<'a> Game<'a> {
    fn new(lts: &'a Lts, opts: BisimOptions) -> Self {
        Game {
            lts,
            opts,
            memo: HashMap::new(),
            pairs: 0,
            tau_steps: 0,
            fuel_unknown: false,
            budget_hit: false,
            cut: false,
            compared_labels: false,
        }
    }

    fn play(&mut self, a: &Term, b: &Term, depth: usize) -> Result<Outcome> {
        self.pairs += 1;
        if self.pairs > self.opts.max_pairs {
            self.budget_hit = true;
            return Ok(Outcome::Related);
        }
        let na = self.lts.normalize(a, self.opts.fuel)?;
        let nb = self.lts.normalize(b, self.opts.fuel)?;
        self.tau_steps += na.steps + nb.steps;
        match (na.is_normal(), nb.is_normal()) {
            (true, true) => {}
            (false, false) => {
                if !self.opts.divergence_blind {
                    self.fuel_unknown = true;
                }
                return Ok(Outcome::Related);
            }
            (halts_a, _) => {
                if !self.opts.divergence_blind {
                    self.fuel_unknown = true;
                    return Ok(Outcome::Related);
                }
                let side = if halts_a { Side::Left } else { Side::Right };
                return Ok(Outcome::Distinguished(vec![TraceStep::labelled(
                    Label::tau(),
                    side,
                    StepReason::Observability,
                )]));
            }
        }
        let (a, b) = (na.result, nb.result);
        if a == b {
            return Ok(Outcome::Related);
        }
        if depth == 0 {
            self.cut = true;
            return Ok(Outcome::Related);
        }
        let key = pair_key(&a, &b);
        if self.memo.get(&key).is_some_and(|&seen| seen >= depth) {
            return Ok(Outcome::Related);
        }
        self.memo.insert(key, depth);

        let mut avoid = metas(&a);
        avoid.extend(metas(&b));
        let la = self.lts.labels_avoiding(&a, &avoid)?;
        let lb = self.lts.labels_avoiding(&b, &avoid)?;
        self.compared_labels = true;
        if la != lb {
            return Ok(Outcome::Distinguished(vec![witness(&la, &lb)]));
        }
        for l in la {
            if l.is_tau() {
                continue;
            }
            let sa = fire(self.lts, &a, &l)?;
            let sb = fire(self.lts, &b, &l)?;
            let (sa, sb) = match (sa, sb) {
                (Some(x), Some(y)) => (x, y),
                (None, None) => continue,
                (x, _) => {
                    let side = if x.is_some() { Side::Left } else { Side::Right };
                    return Ok(Outcome::Distinguished(vec![TraceStep::labelled(
                        l,
                        side,
                        StepReason::MissingLabel,
                    )]));
                }
            };
            if let Outcome::Distinguished(mut trace) = self.play(&sa, &sb, depth - 1)? {
                trace.insert(0, TraceStep::labelled(l, Side::Both, StepReason::Matched));
                return Ok(Outcome::Distinguished(trace));
            }
        }
        Ok(Outcome::Related)
    }
}

fn fire(lts: &Lts, t: &Term, l: &Label<Term>) -> Result<Option<Term>> {
    match lts.apply(t, l) {
        Ok(u) => Ok(Some(u)),
        Err(Error::NotEnabled { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The least label, by printed form, offered by exactly one side.
fn witness(la: &[Label<Term>], lb: &[Label<Term>]) -> TraceStep {
    let only_a = la.iter().filter(|l| !lb.contains(l)).map(|l| (l, Side::Left));
    let only_b = lb.iter().filter(|l| !la.contains(l)).map(|l| (l, Side::Right));
    let (l, side) = only_a
        .chain(only_b)
        .min_by_key(|(l, _)| l.to_string())
        .expect("label sets differ");
    TraceStep::labelled(l.clone(), side, StepReason::MissingLabel)
}

/// Plays the weak bisimulation game on `a` and `b` to the configured
/// depth, returning the verdict together with game statistics.
///
/// The game is iteratively deepened, so a distinguishing trace is a
/// shortest one. Label sets at each pair are compared after canonical
/// renaming, labels are explored in printed order, and a pair already
/// entered at the same or a larger remaining depth is assumed related.
pub fn check_weak_bisim_with(a: &Term, b: &Term, cfg: &Config, opts: &BisimOptions) -> Result<Report> {
    let started = Instant::now();
    let lts = Lts::new(*cfg)?;
    lts.check_state(a)?;
    lts.check_state(b)?;
    let mut stats = Stats::default();
    let mut last = None;
    let rounds: Vec<usize> = if opts.depth == 0 { vec![0] } else { (1..=opts.depth).collect() };
    for d in rounds {
        let mut game = Game::new(&lts, *opts);
        let outcome = game.play(a, b, d)?;
        stats.pairs_visited += game.pairs;
        stats.tau_steps += game.tau_steps;
        if let Outcome::Distinguished(trace) = outcome {
            last = Some(Verdict::Distinguished(trace));
            break;
        }
        let settled = !game.cut || game.budget_hit;
        last = Some(if game.fuel_unknown {
            Verdict::Unknown(UnknownReason::FuelExhausted)
        } else if game.budget_hit {
            Verdict::Unknown(UnknownReason::DepthExhausted)
        } else if game.compared_labels && !cfg.is_exact() {
            Verdict::Unknown(UnknownReason::PoolLimited)
        } else {
            Verdict::Equivalent(opts.depth)
        });
        if settled {
            break;
        }
    }
    if opts.timing {
        stats.wall_ms = Some(started.elapsed().as_millis() as u64);
    }
    Ok(Report {
        verdict: last.expect("at least one round is played"),
        depth: opts.depth,
        stats,
    })
}

/// [`check_weak_bisim_with`] with default options apart from depth and fuel.
pub fn check_weak_bisim(a: &Term, b: &Term, cfg: &Config, depth: usize, fuel: usize) -> Result<Verdict> {
    let opts = BisimOptions {
        depth,
        fuel,
        ..BisimOptions::default()
    };
    Ok(check_weak_bisim_with(a, b, cfg, &opts)?.verdict)
}

/// Re-executes a distinguishing trace from `(a, b)` with weak transitions
/// and checks that its last step really separates the pair.
pub fn replay_trace(a: &Term, b: &Term, cfg: &Config, trace: &[TraceStep], fuel: usize) -> Result<bool> {
    let lts = Lts::new(*cfg)?;
    let (mut a, mut b) = (a.clone(), b.clone());
    let Some((last, prefix)) = trace.split_last() else {
        return Ok(false);
    };
    for step in prefix {
        let Some(l) = &step.label else { return Ok(false) };
        if step.reason != StepReason::Matched {
            return Ok(false);
        }
        match (lts.weak_successor(&a, l, fuel)?, lts.weak_successor(&b, l, fuel)?) {
            (WeakOutcome::Target { term: x, .. }, WeakOutcome::Target { term: y, .. }) => {
                a = x;
                b = y;
            }
            _ => return Ok(false),
        }
    }
    let na = lts.normalize(&a, fuel)?;
    let nb = lts.normalize(&b, fuel)?;
    match last.reason {
        StepReason::Observability => Ok(match last.side {
            Side::Left => na.is_normal() && !nb.is_normal(),
            Side::Right => !na.is_normal() && nb.is_normal(),
            Side::Both => false,
        }),
        StepReason::MissingLabel => {
            let Some(l) = &last.label else { return Ok(false) };
            if !(na.is_normal() && nb.is_normal()) {
                return Ok(false);
            }
            let mut avoid = metas(&na.result);
            avoid.extend(metas(&nb.result));
            let la = lts.labels_avoiding(&na.result, &avoid)?;
            let lb = lts.labels_avoiding(&nb.result, &avoid)?;
            let (has, lacks) = match last.side {
                Side::Left => (&la, &lb),
                Side::Right => (&lb, &la),
                Side::Both => return Ok(false),
            };
            Ok(has.contains(l) && !lacks.contains(l))
        }
        StepReason::Matched => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipo::{LabelSet, Order};
    use crate::reduction::{Calculus, Strategy};
    use crate::terms::{parse_cl, parse_closed_lambda};
    use crate::translate::to_cl;

    fn cl(s: &str) -> Term {
        Term::Cl(parse_cl(s).unwrap())
    }

    #[test]
    fn k_and_its_eta_expansion_agree_lazily() {
        let v = check_weak_bisim(&cl("K"), &cl("S (K K) (S K K)"), &Config::lazy_finite(), 8, 200).unwrap();
        assert_eq!(v, Verdict::Equivalent(8));
    }

    #[test]
    fn first_order_cl_separates_them() {
        let cfg = Config::new(Calculus::Cl, Order::First, Strategy::Lazy, LabelSet::ReactiveOnly)
            .with_arg_pool(2);
        let a = cl("K");
        let b = cl("S (K K) (S K K)");
        let v = check_weak_bisim(&a, &b, &cfg, 2, 50).unwrap();
        assert!(v.is_distinguished(), "{v}");
        assert_eq!(v.trace().len(), 1);
        assert!(replay_trace(&a, &b, &cfg, v.trace(), 50).unwrap());
    }

    #[test]
    fn cbv_counterexample_trace() {
        let id = Term::Cl(to_cl(&parse_closed_lambda("\\x. x").unwrap()));
        let app = Term::Cl(to_cl(&parse_closed_lambda("\\x y. x y").unwrap()));
        let cfg = Config::cbv_second();
        let v = check_weak_bisim(&id, &app, &cfg, 4, 200).unwrap();
        let texts: Vec<(&str, Side)> = v.trace().iter().map(|s| (s.text.as_str(), s.side)).collect();
        assert_eq!(texts, vec![("[_] ?y1", Side::Both), ("[_] ?y2", Side::Right)]);
        assert!(replay_trace(&id, &app, &cfg, v.trace(), 200).unwrap());
        let back = check_weak_bisim(&app, &id, &cfg, 4, 200).unwrap();
        assert_eq!(back.trace().last().unwrap().side, Side::Left);
    }

    #[test]
    fn reflexivity_and_fuel() {
        let cfg = Config::lazy_finite();
        let t = cl("S (K ?x) K");
        assert_eq!(check_weak_bisim(&t, &t, &cfg, 5, 100).unwrap(), Verdict::Equivalent(5));
        let omega = cl("S (S K K) (S K K) (S (S K K) (S K K))");
        assert_eq!(
            check_weak_bisim(&omega, &cl("K"), &cfg, 3, 50).unwrap(),
            Verdict::Unknown(UnknownReason::FuelExhausted)
        );
        let blind = BisimOptions {
            depth: 3,
            fuel: 50,
            divergence_blind: true,
            ..BisimOptions::default()
        };
        let r = check_weak_bisim_with(&omega, &cl("K"), &cfg, &blind).unwrap();
        assert_eq!(r.verdict.trace()[0].reason, StepReason::Observability);
        assert_eq!(r.verdict.trace()[0].side, Side::Right);
    }

    #[test]
    fn first_order_survivors_are_pool_limited() {
        let cfg = Config::new(Calculus::ClStar, Order::First, Strategy::Lazy, LabelSet::ReactiveOnly)
            .with_arg_pool(1);
        let v = check_weak_bisim(&cl("K"), &cl("S (K K) (S K K)"), &cfg, 3, 100).unwrap();
        assert_eq!(v, Verdict::Unknown(UnknownReason::PoolLimited));
    }

    #[test]
    fn report_json_shape() {
        let r = check_weak_bisim_with(&cl("K"), &cl("S"), &Config::lazy_finite(), &BisimOptions::default())
            .unwrap();
        let j = r.to_json();
        assert_eq!(j["verdict"], "Distinguished");
        assert_eq!(j["stats"]["wall_ms"], serde_json::Value::Null);
        assert!(j["trace"][0]["label"].is_string());
    }
}
