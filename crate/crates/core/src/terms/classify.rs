use std::fmt;

use serde::Serialize;

use super::cl::{ClTerm, Meta};
use crate::error::{Error, Result};
use crate::reduction::cbv_clstar_redex_exists;

/// Which row of the label tables a term falls into.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "class", content = "var")]
pub enum SpineClass {
    /// A metavariable on its own.
    BareVar(Meta),
    /// A metavariable applied to `n >= 1` arguments (lazy only).
    HeadStuck(Meta, usize),
    Value,
    Reducible,
    /// A stuck cbv term, unblocked only by instantiating this metavariable.
    Critical(Meta),
}

impl fmt::Display for SpineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpineClass::BareVar(x) => write!(f, "bare variable {x}"),
            SpineClass::HeadStuck(x, n) => write!(f, "{x} applied to {n} argument(s)"),
            SpineClass::Value => f.write_str("value"),
            SpineClass::Reducible => f.write_str("reducible"),
            SpineClass::Critical(x) => write!(f, "stuck on critical variable {x}"),
        }
    }
}

/// Row guard for the lazy second-order tables.
pub fn classify_lazy(t: &ClTerm) -> SpineClass {
    let (bottom, args) = t.spine();
    match (bottom, args.len()) {
        (ClTerm::Meta(x), 0) => SpineClass::BareVar(x.clone()),
        (ClTerm::Meta(x), n) => SpineClass::HeadStuck(x.clone(), n),
        (_, 0) => SpineClass::Value,
        _ => SpineClass::Reducible,
    }
}

/// Row guard for the cbv second-order table.
pub fn classify_cbv(t: &ClTerm) -> Result<SpineClass> {
    if let ClTerm::Meta(x) = t {
        return Ok(SpineClass::BareVar(x.clone()));
    }
    if t.is_cbv_value() {
        return Ok(SpineClass::Value);
    }
    if cbv_clstar_redex_exists(t) {
        return Ok(SpineClass::Reducible);
    }
    cr(t)
        .map(SpineClass::Critical)
        .ok_or_else(|| Error::NoClass(t.to_string()))
}

/// The critical variable of a stuck cbv term:
/// `Cr(X V) = X`, `Cr(V M) = Cr(M)` for a non-value `M`, and
/// `Cr(M N) = Cr(M)` for a non-value `M`. Undefined elsewhere.
pub fn cr(t: &ClTerm) -> Option<Meta> {
    match t {
        ClTerm::App(f, a) => {
            if !f.is_cbv_value() {
                cr(f)
            } else if !a.is_cbv_value() {
                cr(a)
            } else if let ClTerm::Meta(x) = &**f {
                Some(x.clone())
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ClTerm {
        ClTerm::meta("x")
    }

    #[test]
    fn lazy_rows() {
        assert_eq!(classify_lazy(&x()), SpineClass::BareVar(Meta::new("x")));
        assert_eq!(
            classify_lazy(&ClTerm::app(x(), ClTerm::K)),
            SpineClass::HeadStuck(Meta::new("x"), 1)
        );
        assert_eq!(classify_lazy(&ClTerm::app(ClTerm::K, x())), SpineClass::Reducible);
        assert_eq!(classify_lazy(&ClTerm::kp(x())), SpineClass::Value);
    }

    #[test]
    fn cbv_rows() {
        let y = ClTerm::meta("y");
        assert_eq!(
            classify_cbv(&ClTerm::app(x(), y.clone())),
            Ok(SpineClass::Critical(Meta::new("x")))
        );
        assert_eq!(classify_cbv(&ClTerm::kp(ClTerm::K)), Ok(SpineClass::Value));
        assert_eq!(
            classify_cbv(&ClTerm::apply_all(ClTerm::K, [x(), y.clone()])),
            Ok(SpineClass::Reducible)
        );
        // V M with M stuck: the critical variable comes from the argument.
        assert_eq!(
            classify_cbv(&ClTerm::app(ClTerm::K, ClTerm::app(y.clone(), x()))),
            Ok(SpineClass::Critical(Meta::new("y")))
        );
    }

    #[test]
    fn stuck_term_outside_cbv_grammar_has_no_class() {
        let t = ClTerm::kp(ClTerm::app(x(), ClTerm::K));
        assert!(matches!(classify_cbv(&t), Err(Error::NoClass(_))));
    }
}
