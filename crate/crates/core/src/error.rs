use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("odd length {0}")]
    OddLength(usize),

    #[error("not prefix-free: {shorter:?} is a prefix of {longer:?}")]
    NotPrefixFree { shorter: String, longer: String },

    #[error("position {0} constrained twice")]
    DuplicatePosition(u64),

    #[error("stage {stage} beyond horizon {horizon}")]
    BeyondHorizon { stage: u64, horizon: u64 },

    #[error("element {element} repeated (stages {first} and {second})")]
    RepeatedElement {
        element: u64,
        first: u64,
        second: u64,
    },

    #[error("stage {stage} used twice (elements {first} and {second})")]
    RepeatedStage { stage: u64, first: u64, second: u64 },

    #[error("empty word enumerated at stage {0}")]
    EmptyWord(u64),

    #[error("decided set disagrees with enumeration: {0} enumerated but not a member")]
    InconsistentDecidedSet(u64),

    #[error("divergence at desk scale: output bit {bit} undefined within the step budget")]
    Divergence { bit: usize },

    #[error("selection not injective: p({first}) = p({second}) = {image}")]
    NotInjective { first: u64, second: u64, image: u64 },

    #[error("selection undefined at {0}")]
    SelectionUndefined(u64),

    #[error("fiber not provably singleton at desk scale (depth cap {depth})")]
    NotSingleton { depth: usize },

    #[error("target not in range at depth {depth}")]
    NotInRange { depth: usize },

    #[error("inverter refuted at output bit {bit}")]
    InverterRefuted { bit: usize },

    #[error("inverter diverged while validating at bit {bit}")]
    InverterDiverged { bit: usize },

    #[error("measure threshold unreachable within budget (reached {reached} of {needed}, {explored} nodes)")]
    ThresholdUnreachable {
        reached: String,
        needed: String,
        explored: usize,
    },

    #[error("counter stalled below {target} through stage {horizon}")]
    CounterStalled { target: u64, horizon: u64 },

    #[error("element {n} must exceed |zeta| = {zeta_len}")]
    ZetaTooLong { n: u64, zeta_len: usize },

    #[error("read of position {0} beyond the input")]
    ReadBeyondInput(u64),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse(m) => Error::Parse(format!("line {line}: {m}")),
            other => Error::Parse(format!("line {line}: {other}")),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Argument or input-format problems, as opposed to failures of the
    /// computation itself.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Usage(_))
    }
}
