//! Exhaustive, deterministically ordered term enumeration.
//!
//! Terms come out by size, then by constructor (`K < S < K' < S' < S'' < App
//! < Meta`), then lexicographically by the enumeration index of their
//! children. Levels below the requested size are materialised; the top
//! level can be streamed so that large bounds do not need to be stored.

use std::sync::Arc;

use rayon::prelude::*;

use super::cl::{ClTerm, Meta};
use super::lambda::LambdaTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// K, S and application only.
    Cl,
    /// CL plus the primed constructors.
    ClStar,
}

/// Holds every term of each size up to the largest level requested so far.
pub struct Enumerator {
    pool: Vec<Meta>,
    flavor: Flavor,
    levels: Vec<Vec<Arc<ClTerm>>>,
}

impl Enumerator {
    pub fn new(pool: &[Meta], flavor: Flavor) -> Self {
        Enumerator {
            pool: pool.to_vec(),
            flavor,
            levels: vec![Vec::new()],
        }
    }

    /// Terms of exactly `size` constructors.
    pub fn level(&mut self, size: usize) -> &[Arc<ClTerm>] {
        while self.levels.len() <= size {
            let s = self.levels.len();
            let mut out = Vec::new();
            self.visit_stored(s, &mut |t| out.push(Arc::new(t)));
            self.levels.push(out);
        }
        &self.levels[size]
    }

    fn prepare(&mut self, size: usize) {
        if size > 0 {
            self.level(size - 1);
        }
    }

    fn visit_stored(&self, s: usize, f: &mut dyn FnMut(ClTerm)) {
        if s == 0 {
            return;
        }
        let lv = &self.levels;
        if s == 1 {
            f(ClTerm::K);
            f(ClTerm::S);
        }
        if self.flavor == Flavor::ClStar && s >= 2 {
            for m in &lv[s - 1] {
                f(ClTerm::Kp(m.clone()));
            }
            for m in &lv[s - 1] {
                f(ClTerm::Sp(m.clone()));
            }
            for i in 1..s.saturating_sub(1) {
                for a in &lv[i] {
                    for b in &lv[s - 1 - i] {
                        f(ClTerm::Spp(a.clone(), b.clone()));
                    }
                }
            }
        }
        for i in 1..s {
            for a in &lv[i] {
                for b in &lv[s - i] {
                    f(ClTerm::App(a.clone(), b.clone()));
                }
            }
        }
        if s == 1 {
            for m in &self.pool {
                f(ClTerm::Meta(m.clone()));
            }
        }
    }

    /// Streams the terms of exactly `size` constructors without storing them.
    pub fn visit_level(&mut self, size: usize, f: &mut dyn FnMut(ClTerm)) {
        self.prepare(size);
        if size < self.levels.len() {
            for t in &self.levels[size] {
                f((**t).clone());
            }
        } else {
            self.visit_stored(size, f);
        }
    }

    /// Parallel, unordered visit of the terms of exactly `size` constructors.
    pub fn par_visit_level<F>(&mut self, size: usize, f: F)
    where
        F: Fn(&ClTerm) + Sync + Send,
    {
        self.prepare(size);
        if size == 0 {
            return;
        }
        let lv = &self.levels;
        let star = self.flavor == Flavor::ClStar;
        if size == 1 {
            f(&ClTerm::K);
            f(&ClTerm::S);
            for m in &self.pool {
                f(&ClTerm::Meta(m.clone()));
            }
            return;
        }
        if star {
            lv[size - 1].par_iter().for_each(|m| {
                f(&ClTerm::Kp(m.clone()));
                f(&ClTerm::Sp(m.clone()));
            });
            for i in 1..size - 1 {
                lv[i].par_iter().for_each(|a| {
                    for b in &lv[size - 1 - i] {
                        f(&ClTerm::Spp(a.clone(), b.clone()));
                    }
                });
            }
        }
        for i in 1..size {
            lv[i].par_iter().for_each(|a| {
                for b in &lv[size - i] {
                    f(&ClTerm::App(a.clone(), b.clone()));
                }
            });
        }
    }
}

/// Every term of size `1..=size_bound`, in enumeration order.
pub fn enumerate_terms(size_bound: usize, pool: &[Meta], flavor: Flavor) -> Vec<ClTerm> {
    let mut en = Enumerator::new(pool, flavor);
    let mut out = Vec::new();
    for s in 1..=size_bound {
        out.extend(en.level(s).iter().map(|t| (**t).clone()));
    }
    out
}

/// Streaming form of [`enumerate_terms`]; only the top level is not stored.
pub fn for_each_term(size_bound: usize, pool: &[Meta], flavor: Flavor, mut f: impl FnMut(ClTerm)) {
    let mut en = Enumerator::new(pool, flavor);
    for s in 1..=size_bound {
        en.visit_level(s, &mut f);
    }
}

/// Parallel, unordered form of [`enumerate_terms`].
pub fn par_for_each_term<F>(size_bound: usize, pool: &[Meta], flavor: Flavor, f: F)
where
    F: Fn(&ClTerm) + Sync + Send,
{
    let mut en = Enumerator::new(pool, flavor);
    for s in 1..=size_bound {
        en.par_visit_level(s, &f);
    }
}

fn binder_name(depth: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    match NAMES.get(depth) {
        Some(n) => n.to_string(),
        None => format!("x{depth}"),
    }
}

/// λ-terms of exactly `size` (variables and abstractions count one) with at
/// most `depth` enclosing binders available.
fn lambda_level(
    size: usize,
    depth: usize,
    memo: &mut std::collections::HashMap<(usize, usize), Vec<LambdaTerm>>,
) -> Vec<LambdaTerm> {
    if let Some(v) = memo.get(&(size, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        // Innermost binder first.
        for i in 0..depth {
            out.push(LambdaTerm::var(i, &binder_name(depth - 1 - i)));
        }
    }
    if size >= 2 {
        for body in lambda_level(size - 1, depth + 1, memo) {
            out.push(LambdaTerm::abs(&binder_name(depth), body));
        }
        for i in 1..size {
            let left = lambda_level(i, depth, memo);
            let right = lambda_level(size - i, depth, memo);
            for a in &left {
                for b in &right {
                    out.push(LambdaTerm::app(a.clone(), b.clone()));
                }
            }
        }
    }
    memo.insert((size, depth), out.clone());
    out
}

/// Every closed λ-term of size `1..=size_bound`, ordered by size.
pub fn enumerate_closed_lambda(size_bound: usize) -> Vec<LambdaTerm> {
    let mut memo = std::collections::HashMap::new();
    (1..=size_bound)
        .flat_map(|s| lambda_level(s, 0, &mut memo))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent count of CL* terms of exact size, straight from the grammar.
    fn count(size: usize, metas: usize, star: bool) -> usize {
        match size {
            0 => 0,
            1 => 2 + metas,
            s => {
                let mut n: usize = (1..s).map(|i| count(i, metas, star) * count(s - i, metas, star)).sum();
                if star {
                    n += 2 * count(s - 1, metas, star);
                    n += (1..s - 1)
                        .map(|i| count(i, metas, star) * count(s - 1 - i, metas, star))
                        .sum::<usize>();
                }
                n
            }
        }
    }

    #[test]
    fn size_one_and_two() {
        let one = enumerate_terms(1, &[], Flavor::ClStar);
        assert_eq!(one, vec![ClTerm::K, ClTerm::S]);
        let two = enumerate_terms(2, &[], Flavor::ClStar);
        let k = || ClTerm::K;
        let s = || ClTerm::S;
        assert_eq!(
            two[2..].to_vec(),
            vec![
                ClTerm::kp(k()),
                ClTerm::kp(s()),
                ClTerm::sp(k()),
                ClTerm::sp(s()),
                ClTerm::app(k(), k()),
                ClTerm::app(k(), s()),
                ClTerm::app(s(), k()),
                ClTerm::app(s(), s()),
            ]
        );
        let with_meta = enumerate_terms(1, &[Meta::new("x")], Flavor::ClStar);
        assert_eq!(with_meta, vec![ClTerm::K, ClTerm::S, ClTerm::meta("x")]);
    }

    #[test]
    fn level_sizes_match_grammar_count() {
        for metas in 0..=2 {
            let pool: Vec<Meta> = ["x", "y"][..metas].iter().map(|n| Meta::new(n)).collect();
            for flavor in [Flavor::Cl, Flavor::ClStar] {
                let mut en = Enumerator::new(&pool, flavor);
                for s in 1..=5 {
                    let n = en.level(s).len();
                    assert_eq!(n, count(s, metas, flavor == Flavor::ClStar));
                    assert!(en.level(s).iter().all(|t| t.size() == s));
                }
            }
        }
    }

    #[test]
    fn streaming_agrees_with_materialised() {
        let mut streamed = Vec::new();
        for_each_term(4, &[Meta::new("x")], Flavor::ClStar, |t| streamed.push(t));
        assert_eq!(streamed, enumerate_terms(4, &[Meta::new("x")], Flavor::ClStar));
        let seen = std::sync::Mutex::new(0usize);
        par_for_each_term(4, &[Meta::new("x")], Flavor::ClStar, |_| {
            *seen.lock().unwrap() += 1
        });
        assert_eq!(*seen.lock().unwrap(), streamed.len());
    }

    #[test]
    fn closed_lambda_counts() {
        let all = enumerate_closed_lambda(5);
        assert_eq!(all.len(), 100);
        assert!(all.iter().all(|t| t.is_closed()));
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
    }
}
