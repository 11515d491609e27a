//! Bounded weak bisimulation on the configured LTSs, with independent
//! applicative and contextual oracles and a congruence harness.

mod game;
mod harness;
mod oracle;

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::ipo::Label;
use crate::terms::Term;

pub use game::{check_weak_bisim, check_weak_bisim_with, replay_trace, BisimOptions};
pub use harness::{congruence_harness, HarnessReport, Violation};
pub use oracle::{applicative_oracle, contextual_oracle};

/// Which side of the pair a trace step concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Both,
    Left,
    Right,
}

impl Side {
    pub fn mirror(self) -> Side {
        match self {
            Side::Both => Side::Both,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepReason {
    /// Both sides took the step.
    Matched,
    /// Only `side` offers the label.
    MissingLabel,
    /// Only `side` halts within the fuel.
    Observability,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Printed label, or the separating context for the contextual oracle.
    #[serde(rename = "label")]
    pub text: String,
    #[serde(skip)]
    pub label: Option<Label<Term>>,
    pub side: Side,
    pub reason: StepReason,
}

impl TraceStep {
    pub fn labelled(label: Label<Term>, side: Side, reason: StepReason) -> Self {
        TraceStep {
            text: label.to_string(),
            label: Some(label),
            side,
            reason,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnknownReason {
    FuelExhausted,
    DepthExhausted,
    PoolLimited,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnknownReason::FuelExhausted => "fuel exhausted",
            UnknownReason::DepthExhausted => "pair budget exhausted",
            UnknownReason::PoolLimited => "only a finite pool of arguments or contexts was tried",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(usize),
    Distinguished(Vec<TraceStep>),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }

    pub fn is_distinguished(&self) -> bool {
        matches!(self, Verdict::Distinguished(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Equivalent(_) => "Equivalent",
            Verdict::Distinguished(_) => "Distinguished",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    /// Process exit status: 0, 1 or 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Equivalent(_) => 0,
            Verdict::Distinguished(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            Verdict::Distinguished(t) => t,
            _ => &[],
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent(d) => write!(f, "Equivalent({d})"),
            Verdict::Distinguished(trace) => {
                f.write_str("Distinguished:")?;
                for s in trace {
                    let who = match s.side {
                        Side::Both => "both",
                        Side::Left => "left only",
                        Side::Right => "right only",
                    };
                    let why = match s.reason {
                        StepReason::Matched => "",
                        StepReason::MissingLabel => ", other side lacks the label",
                        StepReason::Observability => ", other side does not halt",
                    };
                    write!(f, " [{} ({who}{why})]", s.text)?;
                }
                Ok(())
            }
            Verdict::Unknown(r) => write!(f, "Unknown({r})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub pairs_visited: usize,
    pub tau_steps: usize,
    /// Only filled in when timing is requested, so that reports are
    /// reproducible byte for byte by default.
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub verdict: Verdict,
    /// The depth bound the game was played to.
    pub depth: usize,
    pub stats: Stats,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let reason = match &self.verdict {
            Verdict::Unknown(r) => json!(r),
            _ => Value::Null,
        };
        json!({
            "verdict": self.verdict.kind(),
            "reason": reason,
            "depth": self.depth,
            "trace": self.verdict.trace(),
            "stats": self.stats,
        })
    }
}
