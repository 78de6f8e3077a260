use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TapeError {
    #[error(
        "statement stores {0} arguments but a Jacobian statement holds at most 255; \
         split the expression into smaller assignments"
    )]
    TooManyArguments(usize),

    #[error(
        "primal statement payload is {0} bytes but the size field holds at most 65535; \
         split the expression into smaller assignments"
    )]
    StatementTooLarge(usize),

    #[error("statement has {0} inactive arguments but at most 255 can be recorded")]
    TooManyInactive(usize),

    #[error("identifier space exhausted after {0} identifiers")]
    IdentifierOverflow(u32),

    #[error("unknown statement handle {0}: the tape is corrupted")]
    UnknownHandle(u64),

    #[error("statement {index} declares {found} payload bytes but its shape needs {expected}")]
    PayloadMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("no tape is active on this thread")]
    NoActiveTape,
}

pub type Result<T, E = TapeError> = std::result::Result<T, E>;
