use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("signature mismatch: {0}")]
pub struct SignatureError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("step budget of {limit} exceeded")]
    StepBudgetExceeded { limit: u64 },
    #[error("loop budget of {limit} iterations exceeded")]
    LoopBudgetExceeded { limit: u64 },
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("undefined variable `{0}`")]
    UndefinedVariable(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: String,
        got: usize,
    },
    #[error("expected {expected} argument(s), got {got}")]
    ArgumentCount { expected: usize, got: usize },
    #[error("program finished without returning a value")]
    MissingReturn,
    #[error("malformed syntax tree: {0}")]
    Malformed(String),
}

impl ExecError {
    /// True for errors raised by the execution budgets.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            ExecError::StepBudgetExceeded { .. } | ExecError::LoopBudgetExceeded { .. }
        )
    }
}
