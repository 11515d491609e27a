use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Index given to free variables by [`LambdaTerm::free`] and the parser.
pub const FREE_INDEX: usize = 1 << 40;

/// λ-terms with binder-distance indices.
///
/// A variable whose index reaches past every enclosing binder is free; free
/// variables are identified by their name. Binder names are kept only for
/// printing, so `==` is α-equivalence.
#[derive(Clone)]
pub enum LambdaTerm {
    Var { index: usize, name: Arc<str> },
    Abs { name: Arc<str>, body: Arc<LambdaTerm> },
    App(Arc<LambdaTerm>, Arc<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(index: usize, name: &str) -> Self {
        LambdaTerm::Var {
            index,
            name: Arc::from(name),
        }
    }

    pub fn abs(name: &str, body: LambdaTerm) -> Self {
        LambdaTerm::Abs {
            name: Arc::from(name),
            body: Arc::new(body),
        }
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Arc::new(f), Arc::new(a))
    }

    pub fn apply_all<I: IntoIterator<Item = LambdaTerm>>(head: LambdaTerm, args: I) -> Self {
        args.into_iter().fold(head, LambdaTerm::app)
    }

    /// A free variable. Its index sits far above any realistic binder depth,
    /// so it stays free when the term is placed under abstractions.
    pub fn free(name: &str) -> Self {
        LambdaTerm::var(FREE_INDEX, name)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, LambdaTerm::Var { .. })
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, LambdaTerm::Abs { .. })
    }

    /// Variables and abstractions count one each; application is free.
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var { .. } => 1,
            LambdaTerm::Abs { body, .. } => 1 + body.size(),
            LambdaTerm::App(f, a) => f.size() + a.size(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.first_free().is_none()
    }

    /// Name of the leftmost free variable, if any.
    pub fn first_free(&self) -> Option<Arc<str>> {
        fn go(t: &LambdaTerm, depth: usize) -> Option<Arc<str>> {
            match t {
                LambdaTerm::Var { index, name } => (*index >= depth).then(|| name.clone()),
                LambdaTerm::Abs { body, .. } => go(body, depth + 1),
                LambdaTerm::App(f, a) => go(f, depth).or_else(|| go(a, depth)),
            }
        }
        go(self, 0)
    }

    /// Free variable names in order of first occurrence.
    pub fn free_names(&self) -> Vec<Arc<str>> {
        fn go(t: &LambdaTerm, depth: usize, out: &mut Vec<Arc<str>>) {
            match t {
                LambdaTerm::Var { index, name } => {
                    if *index >= depth && !out.contains(name) {
                        out.push(name.clone());
                    }
                }
                LambdaTerm::Abs { body, .. } => go(body, depth + 1, out),
                LambdaTerm::App(f, a) => {
                    go(f, depth, out);
                    go(a, depth, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, 0, &mut out);
        out
    }

    /// Adds `by` to every variable index at or above `cutoff`.
    pub fn shift(&self, by: isize, cutoff: usize) -> LambdaTerm {
        match self {
            LambdaTerm::Var { index, name } => {
                if *index >= cutoff {
                    let shifted = *index as isize + by;
                    debug_assert!(shifted >= 0);
                    LambdaTerm::Var {
                        index: shifted as usize,
                        name: name.clone(),
                    }
                } else {
                    self.clone()
                }
            }
            LambdaTerm::Abs { name, body } => LambdaTerm::Abs {
                name: name.clone(),
                body: Arc::new(body.shift(by, cutoff + 1)),
            },
            LambdaTerm::App(f, a) => LambdaTerm::app(f.shift(by, cutoff), a.shift(by, cutoff)),
        }
    }

    /// Replaces variable `target` by `with` (already shifted to depth 0).
    fn subst_at(&self, target: usize, with: &LambdaTerm, depth: usize) -> LambdaTerm {
        match self {
            LambdaTerm::Var { index, .. } => {
                if *index == target + depth {
                    with.shift(depth as isize, 0)
                } else {
                    self.clone()
                }
            }
            LambdaTerm::Abs { name, body } => LambdaTerm::Abs {
                name: name.clone(),
                body: Arc::new(body.subst_at(target, with, depth + 1)),
            },
            LambdaTerm::App(f, a) => LambdaTerm::app(
                f.subst_at(target, with, depth),
                a.subst_at(target, with, depth),
            ),
        }
    }

    /// `body[arg/0]` for the body of an abstraction: the β-contractum.
    pub fn instantiate(body: &LambdaTerm, arg: &LambdaTerm) -> LambdaTerm {
        body.subst_at(0, &arg.shift(1, 0), 0).shift(-1, 0)
    }

    /// Replaces the free variable `name` everywhere by a closed term.
    pub fn substitute_free(&self, name: &str, closed: &LambdaTerm) -> LambdaTerm {
        fn go(t: &LambdaTerm, name: &str, closed: &LambdaTerm, depth: usize) -> LambdaTerm {
            match t {
                LambdaTerm::Var { index, name: n } if *index >= depth && &**n == name => {
                    closed.clone()
                }
                LambdaTerm::Var { .. } => t.clone(),
                LambdaTerm::Abs { name: n, body } => LambdaTerm::Abs {
                    name: n.clone(),
                    body: Arc::new(go(body, name, closed, depth + 1)),
                },
                LambdaTerm::App(f, a) => {
                    LambdaTerm::app(go(f, name, closed, depth), go(a, name, closed, depth))
                }
            }
        }
        go(self, name, closed, 0)
    }
}

/// α-equivalence: bound variables compare by index, free ones by name.
pub fn alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    fn go(a: &LambdaTerm, b: &LambdaTerm, depth: usize) -> bool {
        match (a, b) {
            (
                LambdaTerm::Var { index: i, name: n },
                LambdaTerm::Var { index: j, name: m },
            ) => {
                if *i < depth || *j < depth {
                    i == j
                } else {
                    n == m
                }
            }
            (LambdaTerm::Abs { body: b1, .. }, LambdaTerm::Abs { body: b2, .. }) => {
                go(b1, b2, depth + 1)
            }
            (LambdaTerm::App(f1, a1), LambdaTerm::App(f2, a2)) => {
                go(f1, f2, depth) && go(a1, a2, depth)
            }
            _ => false,
        }
    }
    go(a, b, 0)
}

impl PartialEq for LambdaTerm {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for LambdaTerm {}

impl Hash for LambdaTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        fn go<H: Hasher>(t: &LambdaTerm, depth: usize, state: &mut H) {
            match t {
                LambdaTerm::Var { index, name } => {
                    if *index < depth {
                        0u8.hash(state);
                        index.hash(state);
                    } else {
                        1u8.hash(state);
                        name.hash(state);
                    }
                }
                LambdaTerm::Abs { body, .. } => {
                    2u8.hash(state);
                    go(body, depth + 1, state);
                }
                LambdaTerm::App(f, a) => {
                    3u8.hash(state);
                    go(f, depth, state);
                    go(a, depth, state);
                }
            }
        }
        go(self, 0, state)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Picks a binder name that neither clashes with an enclosing binder nor
/// with a free variable, so that printing never captures.
fn printable_binder(wanted: &str, scope: &[String], free: &[Arc<str>]) -> String {
    let base = if wanted.is_empty() || !wanted.chars().all(is_ident_char) {
        "v"
    } else {
        wanted
    };
    let taken = |n: &str| scope.iter().any(|s| s == n) || free.iter().any(|f| &**f == n);
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .expect("unbounded suffixes")
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(
            t: &LambdaTerm,
            scope: &mut Vec<String>,
            free: &[Arc<str>],
            out: &mut String,
        ) {
            match t {
                LambdaTerm::Var { index, name } => {
                    if *index < scope.len() {
                        out.push_str(&scope[scope.len() - 1 - index]);
                    } else {
                        out.push_str(name);
                    }
                }
                LambdaTerm::Abs { name, body } => {
                    let n = printable_binder(name, scope, free);
                    out.push('\\');
                    out.push_str(&n);
                    out.push_str(". ");
                    scope.push(n);
                    go(body, scope, free, out);
                    scope.pop();
                }
                LambdaTerm::App(fun, arg) => {
                    if fun.is_abs() {
                        out.push('(');
                        go(fun, scope, free, out);
                        out.push(')');
                    } else {
                        go(fun, scope, free, out);
                    }
                    out.push(' ');
                    if matches!(**arg, LambdaTerm::Var { .. }) {
                        go(arg, scope, free, out);
                    } else {
                        out.push('(');
                        go(arg, scope, free, out);
                        out.push(')');
                    }
                }
            }
        }
        let free = self.free_names();
        let mut out = String::new();
        go(self, &mut Vec::new(), &free, &mut out);
        f.write_str(&out)
    }
}

impl fmt::Debug for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(name: &str) -> LambdaTerm {
        LambdaTerm::abs(name, LambdaTerm::var(0, name))
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        assert_eq!(id("x"), id("y"));
        assert_ne!(
            LambdaTerm::abs("x", LambdaTerm::abs("y", LambdaTerm::var(0, "y"))),
            LambdaTerm::abs("x", LambdaTerm::abs("y", LambdaTerm::var(1, "x"))),
        );
    }

    #[test]
    fn free_variables_compare_by_name() {
        assert_eq!(LambdaTerm::free("x"), LambdaTerm::var(3, "x"));
        assert_ne!(LambdaTerm::free("x"), LambdaTerm::free("y"));
    }

    #[test]
    fn beta_contractum() {
        // (\x. \y. x) z  ->  \y. z
        let body = LambdaTerm::abs("y", LambdaTerm::var(1, "x"));
        let r = LambdaTerm::instantiate(&body, &LambdaTerm::free("z"));
        assert_eq!(r, LambdaTerm::abs("y", LambdaTerm::free("z")));
        assert_eq!(r.to_string(), "\\y. z");
    }

    #[test]
    fn printer_avoids_capture() {
        // \x. \x'. x  printed with a shadowing display name
        let t = LambdaTerm::abs("x", LambdaTerm::abs("x", LambdaTerm::var(1, "x")));
        assert_eq!(t.to_string(), "\\x. \\x1. x");
        // bound name clashing with a free variable
        let u = LambdaTerm::abs(
            "y",
            LambdaTerm::app(LambdaTerm::var(0, "y"), LambdaTerm::var(1, "y")),
        );
        assert_eq!(u.to_string(), "\\y1. y1 y");
    }
}
