use thiserror::Error;

/// Every failure the library reports. Verdicts are never smuggled through here:
/// a query that evaluates to `false` returns `Ok(false)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unresolved {kind} `{name}`")]
    Unresolved { kind: &'static str, name: String },
    #[error("arity mismatch for `{symbol}`: declared {expected}, used with {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("open atom `{0}` where a closed one is required")]
    OpenAtom(String),
    #[error("unsupported fragment: {0}")]
    Unsupported(String),
    #[error("variable capture substituting for `{0}`")]
    Capture(String),
    #[error("step budget of {0} exhausted")]
    Budget(u64),
    #[error("derivations are over different bases or contexts")]
    BaseMismatch,
    #[error("endpoint mismatch: {0}")]
    Endpoint(String),
    #[error("`{0}` lies outside the morphism signature")]
    Signature(String),
    #[error("invalid morphism or channel: {0}")]
    Flow(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for resource exhaustion as opposed to malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
