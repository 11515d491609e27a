use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {position}: expected {expected}")]
    Parse { position: usize, expected: String },

    #[error("term is not closed: free variable `{0}`")]
    OpenTerm(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("term is outside the {calculus} grammar: {term}")]
    NotInCalculus { calculus: &'static str, term: String },

    #[error("label {label} is not enabled at {state}")]
    NotEnabled { label: String, state: String },

    #[error("stuck cbv term has no critical variable: {0}")]
    NoClass(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn open(var: impl std::fmt::Display) -> Self {
        Error::OpenTerm(var.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
