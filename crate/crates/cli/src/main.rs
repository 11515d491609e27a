use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ipobisim_core::bisim::{
    applicative_oracle, check_weak_bisim_with, congruence_harness, BisimOptions, Report, Stats,
    Verdict,
};
use ipobisim_core::ipo::{check_tables, Config, LabelSet, Lts, Order};
use ipobisim_core::props::{run_invariants, InvariantOptions};
use ipobisim_core::reduction::{step, Calculus, StepResult, Strategy, DEFAULT_FUEL};
use ipobisim_core::terms::{parse_cl, parse_lambda, Term};
use ipobisim_core::translate::{to_cl, to_lambda};
use ipobisim_core::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const SEED_ENV: &str = "IPOBISIM_SEED";

/// Reactive-context LTSs and bounded weak bisimilarity for λ, CL and CL*.
#[derive(Parser)]
#[command(name = "ipobisim", version)]
struct Cli {
    /// Caps the worker threads used by the parallel phases.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SyntaxArg {
    /// λ if the text has a binder, else CL, falling back to λ.
    Auto,
    Lambda,
    Cl,
}

#[derive(Clone, Copy, ValueEnum)]
enum CalculusArg {
    Lambda,
    Cl,
    Clstar,
}

impl From<CalculusArg> for Calculus {
    fn from(c: CalculusArg) -> Self {
        match c {
            CalculusArg::Lambda => Calculus::Lambda,
            CalculusArg::Cl => Calculus::Cl,
            CalculusArg::Clstar => Calculus::ClStar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Lazy,
    Cbv,
    #[value(name = "normal_full")]
    NormalFull,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Lazy => Strategy::Lazy,
            StrategyArg::Cbv => Strategy::Cbv,
            StrategyArg::NormalFull => Strategy::NormalFull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    First,
    Second,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelsArg {
    Reactive,
    All,
    Finite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    LambdaToCl,
    ClToLambda,
}

#[derive(Args, Clone)]
struct LtsArgs {
    /// Defaults to lambda for λ-syntax input and clstar otherwise.
    #[arg(long, value_enum)]
    calculus: Option<CalculusArg>,
    /// Defaults to first for λ and plain CL, second for clstar.
    #[arg(long, value_enum)]
    order: Option<OrderArg>,
    #[arg(long, value_enum, default_value = "lazy")]
    strategy: StrategyArg,
    /// Defaults to finite for (clstar, second, lazy), reactive otherwise.
    #[arg(long, value_enum)]
    labels: Option<LabelsArg>,
    /// Size bound of the closed first-order label arguments.
    #[arg(long, default_value_t = 3)]
    pool: usize,
    /// Argument vector bound for unpruned lazy second-order labels.
    #[arg(long, default_value_t = 2)]
    arg_bound: usize,
}

impl LtsArgs {
    fn config(&self, sample: &Term) -> Config {
        let calculus = match (self.calculus, sample) {
            (Some(c), _) => c.into(),
            (None, Term::Lambda(_)) => Calculus::Lambda,
            (None, Term::Cl(_)) => Calculus::ClStar,
        };
        let order = match (self.order, calculus) {
            (Some(OrderArg::First), _) => Order::First,
            (Some(OrderArg::Second), _) => Order::Second,
            (None, Calculus::ClStar) => Order::Second,
            (None, _) => Order::First,
        };
        let strategy: Strategy = self.strategy.into();
        let labels = match self.labels {
            Some(LabelsArg::Reactive) => LabelSet::ReactiveOnly,
            Some(LabelsArg::All) => LabelSet::AllIpo,
            Some(LabelsArg::Finite) => LabelSet::Finite,
            None if calculus == Calculus::ClStar
                && order == Order::Second
                && strategy == Strategy::Lazy =>
            {
                LabelSet::Finite
            }
            None => LabelSet::ReactiveOnly,
        };
        Config::new(calculus, order, strategy, labels)
            .with_arg_pool(self.pool)
            .with_arg_bound(self.arg_bound)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Prints the canonical form of a term.
    Parse {
        term: String,
        #[arg(long, value_enum, default_value = "auto")]
        syntax: SyntaxArg,
    },
    /// Reduces a term until it halts or the fuel runs out.
    Reduce {
        term: String,
        #[arg(long, value_enum, default_value = "auto")]
        syntax: SyntaxArg,
        #[arg(long, value_enum)]
        calculus: Option<CalculusArg>,
        #[arg(long, value_enum, default_value = "lazy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Also list every intermediate term.
        #[arg(long)]
        trace: bool,
    },
    /// Translates between λ-terms and combinators.
    Translate {
        term: String,
        #[arg(long, value_enum)]
        dir: Direction,
    },
    /// Dumps the labelled transition graph reachable from a term.
    Lts {
        term: String,
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Plays the bounded weak bisimulation game on two terms.
    Bisim {
        a: String,
        b: String,
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Relate two divergent states; separate a halting state from a
        /// divergent one.
        #[arg(long)]
        divergence_blind: bool,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = 200_000)]
        max_pairs: usize,
    },
    /// Diffs the unification engine against the label tables.
    CheckTables {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        max_metavars: usize,
        #[arg(long, default_value_t = 2)]
        arg_bound: usize,
    },
    /// Label-free equivalence oracles on closed terms.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Property checks.
    #[command(subcommand)]
    Prop(PropCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    Applicative {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "lazy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 3)]
        pool: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    Contextual {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "lazy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 5)]
        context_size: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
}

#[derive(Subcommand)]
enum PropCommand {
    /// Checks that certified pairs stay related under random contexts and
    /// substitutions.
    Congruence {
        /// A pair of terms; λ-terms are translated first. Repeatable.
        #[arg(long = "pair", num_args = 2, value_names = ["A", "B"])]
        pairs: Vec<String>,
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Certification depth; samples are checked two rounds shallower.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Runs the exhaustive invariant suite.
    Invariants {
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        /// Size bound for terms over two metavariables.
        #[arg(long, default_value_t = 6)]
        open_size: usize,
        #[arg(long, default_value_t = 10_000)]
        mgu_pairs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        timing: bool,
    },
}

/// Pairs used by `prop congruence` when none are given.
const DEFAULT_PAIRS: [(&str, &str); 4] = [
    ("K", "S (K K) (S K K)"),
    ("S K K", "S K S"),
    ("(\\x. \\y. x) (\\z. z)", "\\y. \\z. z"),
    ("(\\x. x x) (\\x y. x)", "\\a b c. b"),
];

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(Error::Parse { .. } | Error::OpenTerm(_) | Error::NotInCalculus { .. }) => {
                EXIT_DATA
            }
            Failure::Core(_) => EXIT_USAGE,
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_term(text: &str, syntax: SyntaxArg) -> Result<Term, Error> {
    match syntax {
        SyntaxArg::Lambda => parse_lambda(text).map(Term::Lambda),
        SyntaxArg::Cl => parse_cl(text).map(Term::Cl),
        SyntaxArg::Auto if text.contains('\\') || text.contains('λ') => {
            parse_lambda(text).map(Term::Lambda)
        }
        SyntaxArg::Auto => parse_cl(text)
            .map(Term::Cl)
            .or_else(|e| parse_lambda(text).map(Term::Lambda).map_err(|_| e)),
    }
}

/// Parses a term for a calculus: λ-syntax for λ, CL syntax otherwise.
fn read_for(text: &str, calculus: Option<CalculusArg>) -> Result<Term, Error> {
    match calculus {
        Some(CalculusArg::Lambda) => read_term(text, SyntaxArg::Lambda),
        Some(_) => read_term(text, SyntaxArg::Cl),
        None => read_term(text, SyntaxArg::Auto),
    }
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn emit(v: &Value) {
    println!("{v}");
}

fn verdict_report(verdict: Verdict, depth: usize) -> Report {
    Report {
        verdict,
        depth,
        stats: Stats::default(),
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Parse { term, syntax } => {
            let t = read_term(&term, syntax)?;
            let kind = match t {
                Term::Lambda(_) => "lambda",
                Term::Cl(_) => "cl",
            };
            emit(&json!({ "syntax": kind, "term": t.to_string() }));
            eprintln!("{t}");
            Ok(0)
        }
        Command::Reduce {
            term,
            syntax,
            calculus,
            strategy,
            fuel,
            trace,
        } => {
            let t = match syntax {
                SyntaxArg::Auto => read_for(&term, calculus)?,
                s => read_term(&term, s)?,
            };
            let calculus = match (calculus, &t) {
                (Some(c), _) => c.into(),
                (None, Term::Lambda(_)) => Calculus::Lambda,
                (None, Term::Cl(_)) => Calculus::ClStar,
            };
            reduce(t, calculus, strategy.into(), fuel, trace)
        }
        Command::Translate { term, dir } => {
            let (input, output) = match dir {
                Direction::LambdaToCl => {
                    let m = parse_lambda(&term)?;
                    (m.to_string(), to_cl(&m).to_string())
                }
                Direction::ClToLambda => {
                    let c = parse_cl(&term)?;
                    (c.to_string(), to_lambda(&c).to_string())
                }
            };
            emit(&json!({ "input": input, "output": output }));
            eprintln!("{output}");
            Ok(0)
        }
        Command::Lts {
            term,
            lts,
            depth,
            fuel,
            format,
        } => {
            let t = read_for(&term, lts.calculus)?;
            let cfg = lts.config(&t);
            let graph = Lts::new(cfg)?.explore(&t, depth, fuel)?;
            match format {
                Format::Json => graph.json_lines().iter().for_each(|l| println!("{l}")),
                Format::Text => graph.text_lines().iter().for_each(|l| println!("{l}")),
            }
            eprintln!(
                "{cfg}: {} states, {} transitions, {} on the frontier, {} out of fuel",
                graph.states.len(),
                graph.transitions.len(),
                graph.frontier.len(),
                graph.exhausted.len()
            );
            Ok(0)
        }
        Command::Bisim {
            a,
            b,
            lts,
            depth,
            fuel,
            divergence_blind,
            timing,
            max_pairs,
        } => {
            let (a, b) = (read_for(&a, lts.calculus)?, read_for(&b, lts.calculus)?);
            let cfg = lts.config(&a);
            let opts = BisimOptions {
                depth,
                fuel,
                divergence_blind,
                max_pairs,
                timing,
            };
            let report = check_weak_bisim_with(&a, &b, &cfg, &opts)?;
            emit(&report.to_json());
            eprintln!("{}", report.verdict);
            Ok(report.verdict.exit_code() as u8)
        }
        Command::CheckTables {
            max_size,
            max_metavars,
            arg_bound,
        } => {
            let report = check_tables(max_size, max_metavars, arg_bound)?;
            emit(&json!(report));
            eprintln!(
                "{} terms: finite {} diffs, reactive {} diffs, cbv {} diffs ({} unclassified)",
                report.terms_checked,
                report.finite_diffs,
                report.reactive_diffs,
                report.cbv_diffs,
                report.cbv_unclassified
            );
            Ok(if report.lazy_agrees() && report.cbv_diffs == 0 { 0 } else { 1 })
        }
        Command::Oracle(OracleCommand::Applicative {
            a,
            b,
            strategy,
            pool,
            depth,
            fuel,
        }) => {
            let (a, b) = (read_term(&a, SyntaxArg::Auto)?, read_term(&b, SyntaxArg::Auto)?);
            let verdict = applicative_oracle(&a, &b, strategy.into(), pool, depth, fuel)?;
            finish_oracle(verdict, depth)
        }
        Command::Oracle(OracleCommand::Contextual {
            a,
            b,
            strategy,
            context_size,
            fuel,
        }) => {
            let (a, b) = (read_term(&a, SyntaxArg::Auto)?, read_term(&b, SyntaxArg::Auto)?);
            let verdict = ipobisim_core::bisim::contextual_oracle(
                &a,
                &b,
                strategy.into(),
                context_size,
                fuel,
            )?;
            finish_oracle(verdict, context_size)
        }
        Command::Prop(PropCommand::Congruence {
            pairs,
            lts,
            samples,
            seed: flag,
            depth,
            fuel,
        }) => {
            let texts: Vec<(String, String)> = if pairs.is_empty() {
                DEFAULT_PAIRS
                    .iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect()
            } else {
                pairs
                    .chunks(2)
                    .map(|c| (c[0].clone(), c[1].clone()))
                    .collect()
            };
            let as_cl = |s: &str| -> Result<Term, Error> {
                Ok(match read_term(s, SyntaxArg::Auto)? {
                    Term::Lambda(m) => Term::Cl(to_cl(&m)),
                    t => t,
                })
            };
            let terms = texts
                .iter()
                .map(|(a, b)| Ok((as_cl(a)?, as_cl(b)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let cfg = lts.config(&terms[0].0);
            let report = congruence_harness(&terms, &cfg, samples, seed(flag)?, depth, fuel)?;
            emit(&json!(report));
            eprintln!(
                "{} samples: {} equivalent, {} unknown, {} violations",
                report.samples,
                report.equivalent,
                report.unknown,
                report.violations.len()
            );
            Ok(if report.violations.is_empty() { 0 } else { 1 })
        }
        Command::Prop(PropCommand::Invariants {
            max_size,
            open_size,
            mgu_pairs,
            seed: flag,
            timing,
        }) => {
            let opts = InvariantOptions {
                max_size,
                open_size,
                mgu_pairs,
                seed: seed(flag)?,
            };
            let mut report = run_invariants(&opts);
            if !timing {
                report.wall_ms = None;
            }
            emit(&json!(report));
            for p in &report.properties {
                let status = if p.failures == 0 { "ok" } else { "FAILED" };
                eprintln!("{:<26} {status:<6} {} cases, {} failures", p.name, p.cases, p.failures);
                if let Some(ex) = &p.example {
                    eprintln!("    e.g. {ex}");
                }
            }
            Ok(if report.all_green() { 0 } else { 1 })
        }
    }
}

fn finish_oracle(verdict: Verdict, depth: usize) -> CmdResult {
    let report = verdict_report(verdict, depth);
    emit(&report.to_json());
    eprintln!("{}", report.verdict);
    Ok(report.verdict.exit_code() as u8)
}

fn reduce(t: Term, calculus: Calculus, strategy: Strategy, fuel: usize, trace: bool) -> CmdResult {
    let mut cur = t.clone();
    let mut seen = vec![cur.to_string()];
    let mut steps = 0;
    let last = loop {
        let r = step(&cur, calculus, strategy)?;
        match r {
            StepResult::Stepped(_) if steps == fuel => break r,
            StepResult::Stepped(next) => {
                cur = next;
                steps += 1;
                if trace {
                    seen.push(cur.to_string());
                }
            }
            other => break other,
        }
    };
    let (status, stuck_on) = match &last {
        StepResult::Stepped(_) => ("fuel_exhausted", None),
        StepResult::Halted(_) => ("normal", None),
        StepResult::StuckOpen(x) => ("normal", Some(x.to_string())),
    };
    let mut out = json!({
        "term": t.to_string(),
        "calculus": calculus,
        "strategy": strategy,
        "result": cur.to_string(),
        "status": status,
        "steps": steps,
        "stuck_on": stuck_on,
    });
    if trace {
        out["trace"] = json!(seen);
    }
    emit(&out);
    eprintln!("{cur}  ({status} after {steps} steps)");
    Ok(if status == "normal" { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
