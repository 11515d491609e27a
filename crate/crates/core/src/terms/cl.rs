use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A metavariable name, printed as `?name`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Meta(Arc<str>);

impl Meta {
    pub fn new(name: &str) -> Self {
        Meta(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Meta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Debug for Meta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl From<&str> for Meta {
    fn from(s: &str) -> Self {
        Meta::new(s)
    }
}

/// Terms of CL and CL*, with metavariables.
///
/// The variant order is the enumeration tag order, so the derived `Ord`
/// agrees with it on terms of equal shape.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClTerm {
    K,
    S,
    Kp(Arc<ClTerm>),
    Sp(Arc<ClTerm>),
    Spp(Arc<ClTerm>, Arc<ClTerm>),
    App(Arc<ClTerm>, Arc<ClTerm>),
    Meta(Meta),
}

impl ClTerm {
    pub fn app(f: ClTerm, a: ClTerm) -> ClTerm {
        ClTerm::App(Arc::new(f), Arc::new(a))
    }

    pub fn kp(m: ClTerm) -> ClTerm {
        ClTerm::Kp(Arc::new(m))
    }

    pub fn sp(m: ClTerm) -> ClTerm {
        ClTerm::Sp(Arc::new(m))
    }

    pub fn spp(m: ClTerm, n: ClTerm) -> ClTerm {
        ClTerm::Spp(Arc::new(m), Arc::new(n))
    }

    pub fn meta(name: &str) -> ClTerm {
        ClTerm::Meta(Meta::new(name))
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apply_all<I>(head: ClTerm, args: I) -> ClTerm
    where
        I: IntoIterator<Item = ClTerm>,
    {
        args.into_iter().fold(head, ClTerm::app)
    }

    /// Splits the application spine into its bottom and arguments (in order).
    pub fn spine(&self) -> (&ClTerm, Vec<&ClTerm>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let ClTerm::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn is_app(&self) -> bool {
        matches!(self, ClTerm::App(..))
    }

    /// No K', S', S'' anywhere.
    pub fn is_plain_cl(&self) -> bool {
        match self {
            ClTerm::K | ClTerm::S | ClTerm::Meta(_) => true,
            ClTerm::App(f, a) => f.is_plain_cl() && a.is_plain_cl(),
            ClTerm::Kp(_) | ClTerm::Sp(_) | ClTerm::Spp(..) => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            ClTerm::K | ClTerm::S => true,
            ClTerm::Meta(_) => false,
            ClTerm::Kp(m) | ClTerm::Sp(m) => m.is_closed(),
            ClTerm::Spp(m, n) | ClTerm::App(m, n) => m.is_closed() && n.is_closed(),
        }
    }

    /// CL* lazy values: a combinator form, whatever its arguments.
    pub fn is_lazy_value(&self) -> bool {
        matches!(
            self,
            ClTerm::K | ClTerm::S | ClTerm::Kp(_) | ClTerm::Sp(_) | ClTerm::Spp(..)
        )
    }

    /// CL* cbv values; metavariables stand for values.
    pub fn is_cbv_value(&self) -> bool {
        match self {
            ClTerm::K | ClTerm::S | ClTerm::Meta(_) => true,
            ClTerm::Kp(v) | ClTerm::Sp(v) => v.is_cbv_value(),
            ClTerm::Spp(v, w) => v.is_cbv_value() && w.is_cbv_value(),
            ClTerm::App(..) => false,
        }
    }

    /// Whether K', S', S'' only ever hold cbv values (the cbv CL* grammar).
    pub fn in_cbv_grammar(&self) -> bool {
        match self {
            ClTerm::K | ClTerm::S | ClTerm::Meta(_) => true,
            ClTerm::Kp(_) | ClTerm::Sp(_) | ClTerm::Spp(..) => self.is_cbv_value(),
            ClTerm::App(f, a) => f.in_cbv_grammar() && a.in_cbv_grammar(),
        }
    }

    /// Number of atoms and primed constructors; application is free.
    pub fn size(&self) -> usize {
        match self {
            ClTerm::K | ClTerm::S | ClTerm::Meta(_) => 1,
            ClTerm::Kp(m) | ClTerm::Sp(m) => 1 + m.size(),
            ClTerm::Spp(m, n) => 1 + m.size() + n.size(),
            ClTerm::App(m, n) => m.size() + n.size(),
        }
    }

    /// Metavariables in order of first occurrence (left to right).
    pub fn metavars(&self) -> Vec<Meta> {
        let mut out = Vec::new();
        self.collect_metas(&mut out);
        out
    }

    fn collect_metas(&self, out: &mut Vec<Meta>) {
        match self {
            ClTerm::K | ClTerm::S => {}
            ClTerm::Meta(m) => {
                if !out.contains(m) {
                    out.push(m.clone());
                }
            }
            ClTerm::Kp(m) | ClTerm::Sp(m) => m.collect_metas(out),
            ClTerm::Spp(m, n) | ClTerm::App(m, n) => {
                m.collect_metas(out);
                n.collect_metas(out);
            }
        }
    }

    pub fn free_metavars(&self) -> BTreeSet<Meta> {
        self.metavars().into_iter().collect()
    }

    pub fn contains_meta(&self, x: &Meta) -> bool {
        match self {
            ClTerm::K | ClTerm::S => false,
            ClTerm::Meta(m) => m == x,
            ClTerm::Kp(m) | ClTerm::Sp(m) => m.contains_meta(x),
            ClTerm::Spp(m, n) | ClTerm::App(m, n) => m.contains_meta(x) || n.contains_meta(x),
        }
    }

    /// Renames metavariables through `f`; unmapped names are kept.
    pub fn rename_metas(&self, f: &impl Fn(&Meta) -> Option<Meta>) -> ClTerm {
        match self {
            ClTerm::K => ClTerm::K,
            ClTerm::S => ClTerm::S,
            ClTerm::Meta(m) => ClTerm::Meta(f(m).unwrap_or_else(|| m.clone())),
            ClTerm::Kp(m) => ClTerm::kp(m.rename_metas(f)),
            ClTerm::Sp(m) => ClTerm::sp(m.rename_metas(f)),
            ClTerm::Spp(m, n) => ClTerm::spp(m.rename_metas(f), n.rename_metas(f)),
            ClTerm::App(m, n) => ClTerm::app(m.rename_metas(f), n.rename_metas(f)),
        }
    }
}

impl fmt::Display for ClTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClTerm::K => write!(f, "K"),
            ClTerm::S => write!(f, "S"),
            ClTerm::Meta(m) => write!(f, "{m}"),
            ClTerm::Kp(m) => write!(f, "K'({m})"),
            ClTerm::Sp(m) => write!(f, "S'({m})"),
            ClTerm::Spp(m, n) => write!(f, "S''({m}, {n})"),
            ClTerm::App(m, n) => {
                write!(f, "{m} ")?;
                if n.is_app() {
                    write!(f, "({n})")
                } else {
                    write!(f, "{n}")
                }
            }
        }
    }
}

impl fmt::Debug for ClTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spine_of_left_nested_application() {
        let t = ClTerm::apply_all(ClTerm::meta("x"), [ClTerm::K, ClTerm::S]);
        let (head, args) = t.spine();
        assert_eq!(head, &ClTerm::meta("x"));
        assert_eq!(args, vec![&ClTerm::K, &ClTerm::S]);
    }

    #[test]
    fn value_predicates() {
        let x = ClTerm::meta("x");
        assert!(ClTerm::kp(ClTerm::app(ClTerm::K, ClTerm::K)).is_lazy_value());
        assert!(!ClTerm::kp(ClTerm::app(ClTerm::K, ClTerm::K)).is_cbv_value());
        assert!(ClTerm::spp(x.clone(), ClTerm::K).is_cbv_value());
        assert!(x.is_cbv_value());
        assert!(!x.is_lazy_value());
    }

    #[test]
    fn printing() {
        let t = ClTerm::apply_all(
            ClTerm::S,
            [
                ClTerm::app(ClTerm::K, ClTerm::K),
                ClTerm::apply_all(ClTerm::S, [ClTerm::K, ClTerm::K]),
            ],
        );
        assert_eq!(t.to_string(), "S (K K) (S K K)");
        let u = ClTerm::app(ClTerm::kp(ClTerm::meta("x")), ClTerm::meta("y"));
        assert_eq!(u.to_string(), "K'(?x) ?y");
        assert_eq!(ClTerm::spp(ClTerm::K, ClTerm::S).to_string(), "S''(K, S)");
    }

    #[test]
    fn size_does_not_count_application() {
        assert_eq!(ClTerm::app(ClTerm::K, ClTerm::K).size(), 2);
        assert_eq!(ClTerm::kp(ClTerm::K).size(), 2);
        assert_eq!(ClTerm::spp(ClTerm::K, ClTerm::K).size(), 3);
    }
}
