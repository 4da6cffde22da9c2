use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(String, String),
    #[error("{0}: zero input not allowed")]
    ZeroInput(&'static str),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("morphism is not well defined: {0}")]
    IllDefined(String),
    #[error("submodule containment fails: {0}")]
    NotContained(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("set is not common multiplicatively closed")]
    NotCmc,
    #[error("not in skeleton form: {0}")]
    NotSkeleton(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Runtime domain violations, as opposed to malformed input.
    pub fn is_domain_violation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NotSkeleton(_))
    }
}
