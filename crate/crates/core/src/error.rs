use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(usize),

    #[error("letter {letter} out of range for degree {degree}")]
    LetterOutOfRange { letter: usize, degree: usize },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("refinement level {level} is shallower than vertex of level {vertex_level}")]
    RefineTooShallow { level: usize, vertex_level: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("boundary point needs a nonempty period")]
    EmptyPeriod,

    #[error("cannot mix finitary portraits and automaton words in one operation")]
    MixedRepresentation,

    #[error("elements belong to different automata")]
    AutomatonMismatch,

    #[error("budget of {budget} exceeded while {context}")]
    BudgetExceeded { budget: usize, context: String },

    #[error("nothing found within budget: {0}")]
    NotFound(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("support filling stalled at step {step}: {reason}")]
    StepStall { step: usize, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not in P* (weights must be pairwise distinct)")]
    NotInPStar,

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown group '{0}'")]
    UnknownGroup(String),

    #[error("built-in self-test failed for {group}: {reason}")]
    SelfTest { group: String, reason: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn budget(budget: usize, context: impl Into<String>) -> Self {
        Error::BudgetExceeded {
            budget,
            context: context.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::NotFound(_))
    }
}
