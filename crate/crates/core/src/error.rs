use thiserror::Error;

/// Position of a syntax problem inside a text input. Lines and columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum CqaError {
    #[error("csv {at}: {message}")]
    Csv { at: Position, message: String },

    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("invalid constraint: {0}")]
    Constraint(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("tuple {0} is not a vertex of the conflict hypergraph")]
    NotAVertex(String),

    #[error("tuple set is not independent in the conflict hypergraph")]
    NotIndependent,

    #[error("{what} budget of {limit} exceeded{hint}")]
    Budget {
        what: &'static str,
        limit: u64,
        hint: &'static str,
    },

    #[error("strategy `{strategy}` cannot answer this query: {reason}")]
    StrategyMismatch {
        strategy: &'static str,
        reason: String,
    },

    #[error("rewriting failed: {0}")]
    Rewrite(String),

    #[error("reduction input rejected: {0}")]
    Reduction(String),
}

impl CqaError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        CqaError::Syntax {
            at: Position { line, column },
            message: message.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, CqaError::Budget { .. })
    }
}

pub type Result<T, E = CqaError> = std::result::Result<T, E>;
