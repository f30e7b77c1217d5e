use thiserror::Error;

/// What went wrong while reading DSL text, a stream spec or an ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownState(String),
    DuplicateState(String),
    MissingDeclaration(&'static str),
    RuleFromHalt(String),
    TargetsLimit(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self::with_kind(line, column, ParseErrorKind::Syntax, message)
    }

    pub fn with_kind(
        line: usize,
        column: usize,
        kind: ParseErrorKind,
        message: impl Into<String>,
    ) -> Self {
        Self {
            line,
            column,
            kind,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("cell positions start at 1")]
    InvalidPosition,
    #[error("cannot write to a read-only query stream")]
    ReadOnly,
    #[error("shift comparison is undecidable on query streams")]
    Undecidable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("halted snapshots have no successors")]
    NoSuccessor,
    #[error("snapshot belongs to program `{found}`, expected `{expected}`")]
    WrongProgram { expected: String, found: String },
    #[error(transparent)]
    Stream(#[from] StreamError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("value exceeds the 64-bit position range")]
    Range,
    #[error("malformed code: {0}")]
    Malformed(String),
    #[error("query streams have no finite code")]
    NotEncodable,
    #[error("program `{0}` is not in the registry")]
    UnknownProgram(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("computation tree exceeds the node cap of {0}")]
    TreeTooLarge(usize),
    #[error("policy enumeration exceeds the cap of {0}")]
    TooManyPolicies(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("checker `{0}` is not deterministic")]
    NondeterministicChecker(String),
    #[error("checker `{0}` has a rule targeting its limit state")]
    CheckerTargetsLimit(String),
}
