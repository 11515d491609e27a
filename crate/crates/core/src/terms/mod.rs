//! Term representations, parsing, printing, enumeration and classification.

mod cl;
mod classify;
mod enumerate;
mod lambda;
mod parse;
mod subst;

use std::collections::BTreeSet;

pub use cl::{ClTerm, Meta};
pub use classify::{classify_cbv, classify_lazy, cr, SpineClass};
pub use enumerate::{
    enumerate_closed_lambda, enumerate_terms, for_each_term, par_for_each_term, Enumerator, Flavor,
};
pub use lambda::{alpha_eq, LambdaTerm, FREE_INDEX};
pub use parse::{parse_cl, parse_closed_lambda, parse_lambda};
pub use subst::{apply_subst, Substitution};

/// A parsed term of either calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Lambda(LambdaTerm),
    Cl(ClTerm),
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Term::Lambda(t) => t.fmt(f),
            Term::Cl(t) => t.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Syntax {
    Lambda,
    Cl,
}

/// Parses `text` in the given syntax; λ-terms must be closed if `closed`.
pub fn parse_term(text: &str, syntax: Syntax, closed: bool) -> crate::Result<Term> {
    match syntax {
        Syntax::Lambda if closed => parse_closed_lambda(text).map(Term::Lambda),
        Syntax::Lambda => parse_lambda(text).map(Term::Lambda),
        Syntax::Cl => parse_cl(text).map(Term::Cl),
    }
}

/// Canonical printer; `parse_term` inverts it (up to α for λ-terms).
pub fn format_term(t: &Term) -> String {
    t.to_string()
}

/// The first of `prefix1, prefix2, ...` not in `avoid`.
pub fn fresh_named(prefix: &str, avoid: &BTreeSet<Meta>) -> Meta {
    (1..)
        .map(|i| Meta::new(&format!("{prefix}{i}")))
        .find(|m| !avoid.contains(m))
        .expect("unbounded supply of names")
}

/// The least canonical fresh name (`y1`, `y2`, ...) outside `avoid`.
pub fn fresh_metavar(avoid: &BTreeSet<Meta>) -> Meta {
    fresh_named("y", avoid)
}

pub fn free_metavars(t: &ClTerm) -> BTreeSet<Meta> {
    t.free_metavars()
}
