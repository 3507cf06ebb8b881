use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid user-supplied configuration (bad parameters, missing fields, incomplete policies).
    #[error("configuration error: {0}")]
    Config(String),

    /// A joint policy has no entry for an information state of the tree.
    #[error("policy has no entry for player {player} infostate {key:?}")]
    MissingInfostate { player: usize, key: String },

    /// A game tree violated a structural invariant.
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// Game-file syntax or validation failure.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A convex-function evaluator was called outside its domain.
    #[error("domain error: {family} evaluated at {arg}")]
    Domain { family: String, arg: f64 },

    /// The dual solver could not satisfy the simplex constraint.
    #[error("solver error: {0}")]
    Solver(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error stems from the numerical machinery rather than from the inputs.
    pub fn is_solver_error(&self) -> bool {
        matches!(self, Error::Solver(_) | Error::Domain { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
