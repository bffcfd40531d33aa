use thiserror::Error;

/// Syntax error in formula or tag-file text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset (formulas) or line number (tag files) of the error.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("tag system: {0}")]
    TagSystem(String),

    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(char),

    #[error("the empty word has no code")]
    EmptyWord,

    #[error("hat template must have exactly the variable x, got `{0}`")]
    BadHat(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no hat template among the candidates avoids the axioms of P0")]
    HatExhausted,

    #[error("generator cap of {cap} exceeded at level {level}")]
    GeneratorCap { cap: usize, level: usize },

    #[error("combinatorial budget of {0} formulas exceeded")]
    OracleBudget(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed {what}: {message}")]
    Schema { what: &'static str, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
