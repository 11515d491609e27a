use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::terms::{ClTerm, LambdaTerm, Meta, Substitution, Term};

/// A context `C[ ]_θ`: an optional left applicant, the hole under `θ`,
/// then right arguments. The empty label is τ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Label<T> {
    pub subst: Substitution,
    pub left: Option<T>,
    pub args: Vec<T>,
}

impl<T> Label<T> {
    pub fn tau() -> Self {
        Label {
            subst: Substitution::new(),
            left: None,
            args: Vec::new(),
        }
    }

    pub fn is_tau(&self) -> bool {
        self.subst.is_empty() && self.left.is_none() && self.args.is_empty()
    }

    pub fn map<U>(self, f: impl Fn(T) -> U) -> Label<U> {
        Label {
            subst: self.subst,
            left: self.left.map(&f),
            args: self.args.into_iter().map(f).collect(),
        }
    }
}

impl Label<ClTerm> {
    pub fn into_term(self) -> Label<Term> {
        self.map(Term::Cl)
    }

    /// Every metavariable mentioned by the label.
    pub fn metavars(&self) -> BTreeSet<Meta> {
        let mut out: BTreeSet<Meta> = self.subst.domain().cloned().collect();
        for (_, t) in self.subst.iter() {
            out.extend(t.metavars());
        }
        for t in self.left.iter().chain(self.args.iter()) {
            out.extend(t.metavars());
        }
        out
    }
}

impl Label<Term> {
    /// The CL view of the label, if all its terms are CL terms.
    pub fn as_cl(&self) -> Option<Label<ClTerm>> {
        let cl = |t: &Term| match t {
            Term::Cl(c) => Some(c.clone()),
            Term::Lambda(_) => None,
        };
        Some(Label {
            subst: self.subst.clone(),
            left: match &self.left {
                Some(l) => Some(cl(l)?),
                None => None,
            },
            args: self.args.iter().map(cl).collect::<Option<_>>()?,
        })
    }

    pub fn metavars(&self) -> BTreeSet<Meta> {
        self.as_cl().map(|l| l.metavars()).unwrap_or_default()
    }

    /// The transition-dump form: `"tau"` or `{subst, left, args}`.
    pub fn to_json(&self) -> Value {
        if self.is_tau() {
            return json!("tau");
        }
        let subst: serde_json::Map<String, Value> = self
            .subst
            .iter()
            .map(|(x, t)| (x.name().to_string(), json!(t.to_string())))
            .collect();
        json!({
            "subst": subst,
            "left": self.left.as_ref().map(|l| l.to_string()),
            "args": self.args.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Wraps a term in parentheses when it would not read as a single argument.
pub trait ArgDisplay {
    fn arg_string(&self) -> String;
    /// Printed form in function position; application associates left.
    fn head_string(&self) -> String;
}

impl ArgDisplay for ClTerm {
    fn arg_string(&self) -> String {
        if self.is_app() {
            format!("({self})")
        } else {
            self.to_string()
        }
    }

    fn head_string(&self) -> String {
        self.to_string()
    }
}

impl ArgDisplay for LambdaTerm {
    fn arg_string(&self) -> String {
        if self.is_var() {
            self.to_string()
        } else {
            format!("({self})")
        }
    }

    fn head_string(&self) -> String {
        if self.is_abs() {
            format!("({self})")
        } else {
            self.to_string()
        }
    }
}

impl ArgDisplay for Term {
    fn arg_string(&self) -> String {
        match self {
            Term::Cl(t) => t.arg_string(),
            Term::Lambda(t) => t.arg_string(),
        }
    }

    fn head_string(&self) -> String {
        match self {
            Term::Cl(t) => t.head_string(),
            Term::Lambda(t) => t.head_string(),
        }
    }
}

impl<T: ArgDisplay> fmt::Display for Label<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tau() {
            return f.write_str("tau");
        }
        if let Some(l) = &self.left {
            write!(f, "{} ", l.head_string())?;
        }
        f.write_str("[_")?;
        if !self.subst.is_empty() {
            f.write_str("{")?;
            for (i, (x, t)) in self.subst.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}:={t}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("]")?;
        for a in &self.args {
            write!(f, " {}", a.arg_string())?;
        }
        Ok(())
    }
}

impl<T: ArgDisplay> fmt::Debug for Label<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn inside_primed(t: &ClTerm, under: bool, out: &mut Vec<(Meta, bool)>) {
    match t {
        ClTerm::K | ClTerm::S => {}
        ClTerm::Meta(m) => out.push((m.clone(), under)),
        ClTerm::Kp(a) | ClTerm::Sp(a) => inside_primed(a, true, out),
        ClTerm::Spp(a, b) => {
            inside_primed(a, true, out);
            inside_primed(b, true, out);
        }
        ClTerm::App(a, b) => {
            inside_primed(a, under, out);
            inside_primed(b, under, out);
        }
    }
}

/// Renames the label's fresh metavariables (those outside `state`) to
/// canonical names. A fresh metavariable whose first occurrence sits inside
/// a primed constructor becomes `?z1, ?z2, ...`; any other becomes
/// `?y1, ?y2, ...`. Occurrences are scanned through the substitution (by
/// variable), then the left applicant, then the arguments. Names already
/// used by `state` are skipped.
pub fn canonicalize(label: &Label<ClTerm>, state: &BTreeSet<Meta>) -> Label<ClTerm> {
    let mut occurrences = Vec::new();
    for (_, t) in label.subst.iter() {
        inside_primed(t, false, &mut occurrences);
    }
    for t in label.left.iter().chain(label.args.iter()) {
        inside_primed(t, false, &mut occurrences);
    }
    let mut taken: BTreeSet<Meta> = state.clone();
    let mut map: BTreeMap<Meta, Meta> = BTreeMap::new();
    for (m, under) in occurrences {
        if state.contains(&m) || map.contains_key(&m) {
            continue;
        }
        let fresh = crate::terms::fresh_named(if under { "z" } else { "y" }, &taken);
        taken.insert(fresh.clone());
        map.insert(m, fresh);
    }
    let rn = |t: &ClTerm| t.rename_metas(&|m| map.get(m).cloned());
    Label {
        subst: label.subst.iter().map(|(x, t)| (x.clone(), rn(t))).collect(),
        left: label.left.as_ref().map(rn),
        args: label.args.iter().map(rn).collect(),
    }
}

/// Sorts labels by their printed form and removes duplicates.
pub fn sort_labels<T: ArgDisplay + PartialEq>(labels: &mut Vec<Label<T>>) {
    labels.sort_by_cached_key(|l| l.to_string());
    labels.dedup();
}
