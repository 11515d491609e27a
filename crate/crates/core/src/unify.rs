//! Syntactic first-order unification over CL terms.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::terms::{fresh_metavar, ClTerm, Meta, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NoUnifier {
    #[error("constructor clash between {0} and {1}")]
    Clash(ClTerm, ClTerm),
    #[error("occurs check: {0} occurs in {1}")]
    Occurs(Meta, ClTerm),
}

/// Most general unifier of `a` and `b`.
///
/// The result is idempotent. When a variable meets a variable, the one on
/// the left is bound, so callers control orientation by argument order.
pub fn mgu(a: &ClTerm, b: &ClTerm) -> Result<Substitution, NoUnifier> {
    let mut theta = Substitution::new();
    let mut work: Vec<(ClTerm, ClTerm)> = vec![(a.clone(), b.clone())];
    while let Some((s, t)) = work.pop() {
        let s = theta.apply(&s);
        let t = theta.apply(&t);
        if s == t {
            continue;
        }
        match (&s, &t) {
            (ClTerm::Meta(x), _) => bind(&mut theta, x, &t)?,
            (_, ClTerm::Meta(y)) => bind(&mut theta, y, &s)?,
            (ClTerm::Kp(m), ClTerm::Kp(n)) | (ClTerm::Sp(m), ClTerm::Sp(n)) => {
                work.push(((**m).clone(), (**n).clone()));
            }
            (ClTerm::Spp(m1, m2), ClTerm::Spp(n1, n2)) | (ClTerm::App(m1, m2), ClTerm::App(n1, n2)) => {
                // Pushed in reverse so the left components are solved first.
                work.push(((**m2).clone(), (**n2).clone()));
                work.push(((**m1).clone(), (**n1).clone()));
            }
            _ => return Err(NoUnifier::Clash(s, t)),
        }
    }
    Ok(theta)
}

fn bind(theta: &mut Substitution, x: &Meta, t: &ClTerm) -> Result<(), NoUnifier> {
    if t.contains_meta(x) {
        return Err(NoUnifier::Occurs(x.clone(), t.clone()));
    }
    *theta = theta.then(&Substitution::singleton(x.clone(), t.clone()));
    Ok(())
}

/// Renames every metavariable of `t` to `?y1, ?y2, ...` (by first
/// occurrence), skipping names in `avoid`. Returns the renaming.
pub fn rename_apart(t: &ClTerm, avoid: &BTreeSet<Meta>) -> (ClTerm, BTreeMap<Meta, Meta>) {
    let mut used = avoid.clone();
    let mut map = BTreeMap::new();
    for m in t.metavars() {
        let fresh = fresh_metavar(&used);
        used.insert(fresh.clone());
        map.insert(m, fresh);
    }
    let renamed = t.rename_metas(&|m| map.get(m).cloned());
    (renamed, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_cl;

    fn cl(s: &str) -> ClTerm {
        parse_cl(s).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<Meta> {
        names.iter().map(|n| Meta::new(n)).collect()
    }

    #[test]
    fn pattern_match() {
        let theta = mgu(&cl("K ?x1"), &cl("K K")).unwrap();
        assert_eq!(theta, Substitution::singleton(Meta::new("x1"), ClTerm::K));
    }

    #[test]
    fn occurs_check() {
        assert!(matches!(
            mgu(&cl("?x"), &cl("K'(?x)")),
            Err(NoUnifier::Occurs(..))
        ));
    }

    #[test]
    fn both_sides_bind() {
        let a = cl("?x K");
        let b = cl("K'(?a) ?b");
        let theta = mgu(&a, &b).unwrap();
        assert_eq!(theta.apply(&a), theta.apply(&b));
        assert_eq!(theta.get(&Meta::new("x")), Some(&cl("K'(?a)")));
        assert_eq!(theta.get(&Meta::new("b")), Some(&ClTerm::K));
        assert_eq!(theta.len(), 2);
    }

    #[test]
    fn chained_bindings_stay_idempotent() {
        let a = cl("?x ?y ?z");
        let b = cl("?y ?z K");
        let theta = mgu(&a, &b).unwrap();
        assert!(theta.is_idempotent());
        assert_eq!(theta.apply(&a), cl("K K K"));
    }

    #[test]
    fn clash() {
        assert!(matches!(mgu(&cl("K"), &cl("S")), Err(NoUnifier::Clash(..))));
        assert!(mgu(&cl("K'(K)"), &cl("S'(K)")).is_err());
    }

    #[test]
    fn renaming_apart() {
        let (t, r) = rename_apart(&cl("K ?x"), &set(&["x"]));
        assert_eq!(t, cl("K ?y1"));
        assert_eq!(r, [(Meta::new("x"), Meta::new("y1"))].into_iter().collect());
        let (t, r) = rename_apart(&ClTerm::K, &set(&["x"]));
        assert_eq!((t, r.len()), (ClTerm::K, 0));
        let (t, _) = rename_apart(&cl("?x ?x"), &set(&["x", "y1"]));
        assert_eq!(t, cl("?y2 ?y2"));
    }
}
