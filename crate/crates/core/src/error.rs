use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: header mismatch, expected [{expected}] but found [{found}]")]
    HeaderMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("duplicate member_id `{member}` at line {line}")]
    DuplicateMember { member: String, line: u64 },
    #[error("member `{member}` belongs to families `{first}` and `{second}`")]
    DuplicateMembership {
        member: String,
        first: String,
        second: String,
    },
    #[error("duplicate family_id `{0}`")]
    DuplicateFamily(String),
    #[error("family `{family}` lists unknown member `{member}`")]
    UnknownFamilyMember { family: String, member: String },
    #[error("family `{0}` has no members")]
    EmptyFamily(String),
    #[error("singleton family id `{0}` collides with an existing family id")]
    FamilyIdCollision(String),
    #[error("column `{0}` has no non-missing values, cannot impute a mean")]
    NoMean(&'static str),
    #[error("profile `{member}` still has a missing `{field}`; run clean_missing first")]
    NotCleaned { member: String, field: &'static str },
    #[error("temporal split at {split_point} leaves the {side} partition empty")]
    EmptyPartition {
        split_point: chrono::NaiveDateTime,
        side: &'static str,
    },
    #[error("test fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
    #[error("profile vector layouts differ")]
    LayoutMismatch,
    #[error("no profile vector for member `{0}`")]
    MissingProfile(String),
    #[error("matrices are indexed over different actors")]
    IndexMismatch,
    #[error("normalized distance {0} lies outside [0, 1]")]
    DistanceOutOfRange(f64),
    #[error("at least two actors are required, got {0}")]
    TooFewActors(usize),
    #[error("blend weights must be nonnegative with at least one positive")]
    BadWeights,
    #[error("blend weight given for `{0}` but no such matrix was supplied")]
    MissingAxis(String),
    #[error("matrix for `{0}` supplied twice")]
    DuplicateAxis(String),
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("group rating needs at least one member rating")]
    EmptyGroup,
    #[error("no member rating reaches the misery threshold {0}")]
    NoRatingAboveThreshold(f64),
    #[error("strategy requires {0}")]
    MissingStrategyInput(&'static str),
    #[error("respected member `{0}` has no rating in the group")]
    RespectedNotInGroup(String),
    #[error("list length must be positive")]
    ZeroLength,
    #[error("{0} is zero, metric undefined")]
    EmptyDenominator(&'static str),
    #[error("report is empty")]
    EmptyReport,
    #[error("malformed report line {line}: {reason}")]
    BadReport { line: u64, reason: String },
    #[error("malformed matrix file: {0}")]
    BadMatrixFile(String),
    #[error("unknown model `{0}`; expected user, hybrid_user or hybrid_family")]
    UnknownModel(String),
    #[error("invalid synthetic config: {0}")]
    BadSynthConfig(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BadFraction(_) | Error::UnknownAxis(_) | Error::BadWeights | Error::BadSynthConfig(_) | Error::UnknownModel(_) | Error::ZeroLength => {
                ErrorKind::Usage
            }
            Error::Invariant(_) => ErrorKind::Internal,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
