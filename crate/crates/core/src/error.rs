use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid address `{0}`: descends below a leaf")]
    InvalidAddress(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("tree is not finite (its presentation has a cycle)")]
    NotFinite,
    #[error("unknown counter `{0}`")]
    UnknownCounter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("counter `{0}` is not root-directed")]
    NotRootDirected(String),
    #[error("invalid run: {0}")]
    InvalidRun(String),
    #[error("bounded counter `{0}` is not separated and root-directed")]
    PropertyAViolated(String),
    #[error("automaton is not deterministic: {0}")]
    NondeterministicInput(String),
    #[error("malformed transition #{index}: {reason}")]
    MalformedTransition { index: usize, reason: String },
    #[error("automaton is not in normal form: {0}")]
    NotNormalForm(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
    Error::parse(line, message)
}
