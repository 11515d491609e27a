//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ipobisim_core::bisim::{
    check_weak_bisim_with, congruence_harness, contextual_oracle, replay_trace, BisimOptions,
    Side, StepReason, Verdict,
};
use ipobisim_core::ipo::{check_tables, Config, LabelSet, Order};
use ipobisim_core::props::{run_invariants, InvariantOptions};
use ipobisim_core::reduction::{normalize_lambda, Calculus, Strategy};
use ipobisim_core::terms::{enumerate_closed_lambda, parse_cl, parse_closed_lambda, Term};
use ipobisim_core::translate::{check_et_identity, to_cl, EtOutcome};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cl(s: &str) -> Term {
    Term::Cl(parse_cl(s).expect("valid CL term"))
}

fn image(s: &str) -> Term {
    Term::Cl(to_cl(&parse_closed_lambda(s).expect("valid closed λ-term")))
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn lazy_coincidence() -> Outcome {
    let opts = BisimOptions {
        depth: 8,
        fuel: 200,
        ..BisimOptions::default()
    };
    let start = Instant::now();
    let r = check_weak_bisim_with(&cl("K"), &cl("S (K K) (S K K)"), &Config::lazy_finite(), &opts);
    let took = start.elapsed();
    match r {
        Ok(r) => outcome(
            r.verdict == Verdict::Equivalent(8) && took < Duration::from_secs(10),
            format!("{} in {}", r.verdict, secs(took)),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn first_order_discrimination() -> Outcome {
    let cfg = Config::new(Calculus::Cl, Order::First, Strategy::Lazy, LabelSet::ReactiveOnly)
        .with_arg_pool(2);
    let (a, b) = (cl("K"), cl("S (K K) (S K K)"));
    let opts = BisimOptions {
        depth: 2,
        ..BisimOptions::default()
    };
    let run = || -> ipobisim_core::Result<Outcome> {
        let r = check_weak_bisim_with(&a, &b, &cfg, &opts)?;
        let trace = r.verdict.trace();
        let shaped = trace.last().and_then(|s| s.label.as_ref()).is_some_and(|l| !l.is_tau());
        let replays = replay_trace(&a, &b, &cfg, trace, opts.fuel)?;
        Ok(outcome(
            r.verdict.is_distinguished() && trace.len() <= 2 && shaped && replays,
            format!("{}; replays: {replays}", r.verdict),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn cbv_counterexample() -> Outcome {
    let run = || -> ipobisim_core::Result<Outcome> {
        let a = image("\\x. x");
        let printed = cl("S (S (K S) (S (K K) (S K K))) (S (S (K S) (K K)) (K K))");
        let b = image("\\x y. x y");
        let same_image = b == printed;
        let cfg = Config::cbv_second();
        let opts = BisimOptions::default();
        let r = check_weak_bisim_with(&a, &b, &cfg, &opts)?;
        let trace = r.verdict.trace();
        let shape: Vec<(String, Side, StepReason)> =
            trace.iter().map(|s| (s.text.clone(), s.side, s.reason)).collect();
        let expected = vec![
            ("[_] ?y1".to_string(), Side::Both, StepReason::Matched),
            ("[_] ?y2".to_string(), Side::Right, StepReason::MissingLabel),
        ];
        let replays = replay_trace(&a, &b, &cfg, trace, opts.fuel)?;
        let lam = |s: &str| Term::Lambda(parse_closed_lambda(s).expect("valid"));
        let oracle = contextual_oracle(&lam("\\x. x"), &lam("\\x y. x y"), Strategy::Lazy, 5, 512)?;
        Ok(outcome(
            same_image && shape == expected && replays && oracle.is_distinguished(),
            format!(
                "checker: {}; lazy contextual oracle: {}",
                r.verdict, oracle
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn et_corpus() -> Outcome {
    let start = Instant::now();
    let (mut normalizing, mut confirmed, mut misses) = (0usize, 0usize, Vec::new());
    for m in enumerate_closed_lambda(7) {
        let nf = normalize_lambda(&m, Strategy::NormalFull, 1000).expect("normal_full is total");
        if !nf.is_normal() {
            continue;
        }
        normalizing += 1;
        match check_et_identity(&m, 1000) {
            EtOutcome::Confirmed => confirmed += 1,
            o => misses.push((m, o)),
        }
    }
    let took = start.elapsed();
    // Diagnostic only: whether the misses are fuel artefacts.
    let later = misses
        .iter()
        .filter(|(m, _)| check_et_identity(m, 20_000) == EtOutcome::Confirmed)
        .count();
    let detail = match misses.first() {
        None => String::new(),
        Some((m, o)) => format!(
            "; first miss {m}: {o:?}; {later}/{} misses confirmed at fuel 20000",
            misses.len()
        ),
    };
    outcome(
        confirmed == normalizing && took < Duration::from_secs(60),
        format!("{confirmed}/{normalizing} confirmed at fuel 1000 in {}{detail}", secs(took)),
    )
}

fn table_oracle() -> Outcome {
    let start = Instant::now();
    match check_tables(6, 2, 2) {
        Ok(r) => {
            let took = start.elapsed();
            outcome(
                r.lazy_agrees() && took < Duration::from_secs(300),
                format!(
                    "{} terms, finite diffs {}, reactive diffs {}, cbv diffs {} in {}",
                    r.terms_checked,
                    r.finite_diffs,
                    r.reactive_diffs,
                    r.cbv_diffs,
                    secs(took)
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

const CONVERTIBLE: [(&str, &str); 20] = [
    ("(\\x.x)(\\x.x)", "\\x.x"),
    ("(\\x.x x)(\\y.y)", "\\y.y"),
    ("(\\x.\\y.x)(\\z.z)", "\\y.\\z.z"),
    ("(\\x y.x) (\\z.z) (\\w.w)", "\\z.z"),
    ("(\\x.x x)(\\x y. x)", "\\a b c. b"),
    ("(\\f.\\x.f x)(\\y.y)", "\\x.x"),
    ("(\\x.\\y.y x)(\\z.z)", "\\y.y (\\z.z)"),
    ("\\x.(\\y.y) x", "\\x.x"),
    ("\\x y. (\\z.z) x y", "\\x y. x y"),
    ("(\\x.x)(\\x y.x)", "\\x y.x"),
    ("(\\x.x)((\\x.x)(\\x.x))", "\\x.x"),
    ("(\\x y. y)(\\z.z)", "\\y.y"),
    ("(\\x y z. x z (y z)) (\\a b. a) (\\a b. a)", "\\z.z"),
    ("(\\x.x x x)(\\y.y)", "\\y.y"),
    ("(\\x. \\y. x y)(\\z.z)", "\\y.(\\z.z) y"),
    ("(\\x y. x)(\\z.z) ((\\x.x x)(\\x.x x))", "\\z.z"),
    ("\\x.(\\y.\\z.y) x", "\\x.\\z.x"),
    ("(\\f. f (\\x.x)) (\\y.y)", "\\x.x"),
    ("(\\f g x. f (g x)) (\\y.y) (\\y.y)", "\\x.x"),
    ("(\\x.\\y.x)((\\z.z)(\\z.z))", "\\y.\\z.z"),
];

const INEQUIVALENT: [(&str, &str); 10] = [
    ("\\x.x", "\\x y.x"),
    ("\\x.x", "\\x y.x y"),
    ("\\x y.x", "\\x y.y"),
    ("\\x.x", "\\x.x x"),
    ("\\x y.x", "\\x y z.x"),
    ("\\x y.y", "\\x.x"),
    ("\\x.x (\\y.y)", "\\x.x"),
    ("\\x y z. x z (y z)", "\\x y.x"),
    ("\\x.\\y.y x", "\\x.\\y.x y"),
    ("\\x.x (\\y.y)", "\\x.x (\\y.\\z.y)"),
];

fn correspondence() -> Outcome {
    let cfg = Config::lazy_finite();
    let opts = BisimOptions::default();
    let mut misses = Vec::new();
    let mut check = |pairs: &[(&str, &str)], want_equivalent: bool| {
        for (a, b) in pairs {
            let r = check_weak_bisim_with(&image(a), &image(b), &cfg, &opts);
            let ok = match &r {
                Ok(r) if want_equivalent => r.verdict == Verdict::Equivalent(6),
                Ok(r) => r.verdict.is_distinguished(),
                Err(_) => false,
            };
            if !ok {
                misses.push(format!("{a} vs {b}"));
            }
        }
    };
    check(&CONVERTIBLE, true);
    check(&INEQUIVALENT, false);
    outcome(
        misses.is_empty(),
        format!(
            "{} convertible, {} inequivalent, {} exceptions{}",
            CONVERTIBLE.len(),
            INEQUIVALENT.len(),
            misses.len(),
            misses.first().map(|m| format!(" (first: {m})")).unwrap_or_default()
        ),
    )
}

fn congruence() -> Outcome {
    let pairs = vec![
        (cl("K"), cl("S (K K) (S K K)")),
        (cl("S K K"), cl("S K S")),
        (image("(\\x. \\y. x) (\\z. z)"), image("\\y. \\z. z")),
        (image("(\\x. x x) (\\x y. x)"), image("\\a b c. b")),
    ];
    let start = Instant::now();
    match congruence_harness(&pairs, &Config::lazy_finite(), 200, 42, 8, 512) {
        Ok(r) => outcome(
            r.violations.is_empty(),
            format!(
                "{} samples at depth {}: {} equivalent, {} unknown, {} violations in {}",
                r.samples,
                r.check_depth,
                r.equivalent,
                r.unknown,
                r.violations.len(),
                secs(start.elapsed())
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let r = run_invariants(&InvariantOptions::default());
    let took = start.elapsed();
    let failed: Vec<&str> = r.properties.iter().filter(|p| p.failures > 0).map(|p| p.name).collect();
    let cases: u64 = r.properties.iter().map(|p| p.cases).sum();
    outcome(
        r.all_green() && took < Duration::from_secs(120),
        format!(
            "{} properties, {cases} cases, failing: {:?} in {}",
            r.properties.len(),
            failed,
            secs(took)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("lazy CL* coincidence instance", lazy_coincidence),
        ("first-order CL discrimination", first_order_discrimination),
        ("cbv counterexample", cbv_counterexample),
        ("E(T(M)) corpus", et_corpus),
        ("table/engine agreement", table_oracle),
        ("translation correspondence", correspondence),
        ("congruence harness", congruence),
        ("invariant suite", invariants),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
