use std::collections::BTreeMap;
use std::fmt;

use super::cl::{ClTerm, Meta};

/// A finite map from metavariables to terms, applied simultaneously.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Meta, ClTerm>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Meta, t: ClTerm) -> Self {
        let mut s = Self::new();
        s.bindings.insert(x, t);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, x: &Meta) -> Option<&ClTerm> {
        self.bindings.get(x)
    }

    pub fn insert(&mut self, x: Meta, t: ClTerm) {
        self.bindings.insert(x, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Meta, &ClTerm)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Meta> {
        self.bindings.keys()
    }

    pub fn apply(&self, t: &ClTerm) -> ClTerm {
        if self.is_empty() {
            return t.clone();
        }
        match t {
            ClTerm::K | ClTerm::S => t.clone(),
            ClTerm::Meta(m) => self.bindings.get(m).cloned().unwrap_or_else(|| t.clone()),
            ClTerm::Kp(m) => ClTerm::kp(self.apply(m)),
            ClTerm::Sp(m) => ClTerm::sp(self.apply(m)),
            ClTerm::Spp(m, n) => ClTerm::spp(self.apply(m), self.apply(n)),
            ClTerm::App(m, n) => ClTerm::app(self.apply(m), self.apply(n)),
        }
    }

    /// `self` followed by `other`: applying the result equals applying
    /// `self` and then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Meta, ClTerm> = self
            .bindings
            .iter()
            .map(|(x, t)| (x.clone(), other.apply(t)))
            .collect();
        for (x, t) in &other.bindings {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|x, t| *t != ClTerm::Meta(x.clone()));
        Substitution { bindings: out }
    }

    /// Keeps only the bindings whose variable satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Meta) -> bool) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(x, _)| keep(x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|t| self.apply(t) == *t)
    }
}

impl FromIterator<(Meta, ClTerm)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Meta, ClTerm)>>(iter: I) -> Self {
        Substitution {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Shorthand for `apply_subst(t, θ)`.
pub fn apply_subst(t: &ClTerm, theta: &Substitution) -> ClTerm {
    theta.apply(t)
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:={t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Meta {
        Meta::new("x")
    }

    #[test]
    fn apply_examples() {
        let t = ClTerm::app(ClTerm::meta("x"), ClTerm::K);
        assert_eq!(
            apply_subst(&t, &Substitution::singleton(x(), ClTerm::S)),
            ClTerm::app(ClTerm::S, ClTerm::K)
        );
        assert_eq!(
            apply_subst(&ClTerm::meta("x"), &Substitution::new()),
            ClTerm::meta("x")
        );
        let xx = ClTerm::app(ClTerm::meta("x"), ClTerm::meta("x"));
        let kk = ClTerm::kp(ClTerm::K);
        assert_eq!(
            apply_subst(&xx, &Substitution::singleton(x(), kk.clone())),
            ClTerm::app(kk.clone(), kk)
        );
    }

    #[test]
    fn application_is_simultaneous() {
        let swap: Substitution = [
            (Meta::new("x"), ClTerm::meta("y")),
            (Meta::new("y"), ClTerm::meta("x")),
        ]
        .into_iter()
        .collect();
        let t = ClTerm::app(ClTerm::meta("x"), ClTerm::meta("y"));
        assert_eq!(
            swap.apply(&t),
            ClTerm::app(ClTerm::meta("y"), ClTerm::meta("x"))
        );
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = Substitution::singleton(x(), ClTerm::app(ClTerm::meta("y"), ClTerm::K));
        let b = Substitution::singleton(Meta::new("y"), ClTerm::S);
        let t = ClTerm::app(ClTerm::meta("x"), ClTerm::meta("y"));
        assert_eq!(a.then(&b).apply(&t), b.apply(&a.apply(&t)));
    }
}
