use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::{labels_generic, Config, LabelSet, Lts};
use crate::error::Result;
use crate::terms::{par_for_each_term, ClTerm, Flavor, Meta, Term};

/// Diffs reported in full; the rest are only counted.
const SHOWN_DIFFS: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct TableDiff {
    pub mode: String,
    pub state: String,
    pub table: Vec<String>,
    pub generic: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub max_size: usize,
    pub max_metavars: usize,
    pub arg_bound: usize,
    pub terms_checked: usize,
    /// Pruned engine against the finite lazy table.
    pub finite_diffs: usize,
    /// Unpruned engine against the reactive lazy table.
    pub reactive_diffs: usize,
    /// Unification engine against the cbv table, over states the cbv table
    /// classifies.
    pub cbv_diffs: usize,
    pub cbv_unclassified: usize,
    pub examples: Vec<TableDiff>,
}

impl TableReport {
    pub fn lazy_agrees(&self) -> bool {
        self.finite_diffs == 0 && self.reactive_diffs == 0
    }
}

fn strings<T: super::ArgDisplay>(ls: &[super::Label<T>]) -> Vec<String> {
    ls.iter().map(|l| l.to_string()).collect()
}

/// Exhaustively compares the unification engine with the label tables on
/// every CL* term of size at most `max_size` over `max_metavars`
/// metavariables. Terms are checked in parallel.
pub fn check_tables(max_size: usize, max_metavars: usize, arg_bound: usize) -> Result<TableReport> {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    let pool: Vec<Meta> = (0..max_metavars)
        .map(|i| Meta::new(NAMES.get(i).copied().unwrap_or(&format!("v{i}"))))
        .collect();
    let finite = Config::lazy_finite().with_arg_bound(arg_bound);
    let reactive = Config { labels: LabelSet::ReactiveOnly, ..finite };
    let cbv = Config::cbv_second().with_arg_bound(arg_bound);
    let lts = [Lts::new(finite)?, Lts::new(reactive)?, Lts::new(cbv)?];
    let counters: [AtomicUsize; 5] = Default::default();
    let examples = Mutex::new(Vec::new());
    let record = |mode: &str, t: &ClTerm, table: Vec<String>, generic: Vec<String>| {
        let mut ex = examples.lock().expect("diff list lock");
        ex.push(TableDiff {
            mode: mode.to_string(),
            state: t.to_string(),
            table,
            generic,
        });
    };
    par_for_each_term(max_size, &pool, Flavor::ClStar, |t| {
        counters[0].fetch_add(1, Ordering::Relaxed);
        let state = Term::Cl(t.clone());
        for (i, (name, l)) in [("finite", &lts[0]), ("reactive", &lts[1]), ("cbv", &lts[2])]
            .into_iter()
            .enumerate()
        {
            let Ok(table) = l.labels(&state) else {
                counters[4].fetch_add(1, Ordering::Relaxed);
                continue;
            };
            let generic: Vec<_> = labels_generic(t, l.config())
                .expect("validated config")
                .into_iter()
                .map(super::Label::into_term)
                .collect();
            if table != generic {
                counters[1 + i].fetch_add(1, Ordering::Relaxed);
                record(name, t, strings(&table), strings(&generic));
            }
        }
    });
    let mut examples = examples.into_inner().expect("diff list lock");
    examples.sort_by(|a, b| (&a.mode, a.state.len(), &a.state).cmp(&(&b.mode, b.state.len(), &b.state)));
    examples.truncate(SHOWN_DIFFS);
    let n = |i: usize| counters[i].load(Ordering::Relaxed);
    Ok(TableReport {
        max_size,
        max_metavars,
        arg_bound,
        terms_checked: n(0),
        finite_diffs: n(1),
        reactive_diffs: n(2),
        cbv_diffs: n(3),
        cbv_unclassified: n(4),
        examples,
    })
}
