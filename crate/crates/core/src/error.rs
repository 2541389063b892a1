use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("generator x{index} out of range for rank {rank}")]
    UnknownGenerator { index: u32, rank: usize },
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("meridian letter inside a y/z word")]
    MeridianInWord,
    #[error("unknown knot label {0:?}")]
    UnknownKnot(String),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("automorphism mismatch")]
    KappaMismatch,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("no leading-unit inverse")]
    NoLeadingUnitInverse,
    #[error("series has infinite support")]
    InfiniteSupport,
    #[error("cover degree {0} is not supported")]
    BadCoverDegree(usize),
    #[error("infinite torsion candidate: {0}")]
    InfiniteTorsion(String),
    #[error("relation {index} violated: kappa(rho(y{index})) != rho(z{index})")]
    RepViolation { index: usize },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
