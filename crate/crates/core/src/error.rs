use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("weight length must be positive")]
    EmptyWeight,
    #[error("invalid weight character {ch:?} at position {pos} (expected 'v' or '^')")]
    BadWeightChar { ch: char, pos: usize },
    #[error("weight {0} has an odd number of up labels")]
    OddParity(String),
    #[error("size mismatch: expected n = {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("partition {partition} does not fit in the region for n = {n}")]
    PartitionTooLarge { partition: String, n: usize },
    #[error("invalid partition {0}: some tile is unsupported")]
    UnsupportedTile(String),
    #[error("weight {weight} is not contractible at k = {k}")]
    NotContractible { weight: String, k: usize },
    #[error("contraction needs n >= 3, got n = {0}")]
    ContractionTooSmall(usize),
    #[error("arc {0} is not a cup")]
    NotACup(String),
    #[error("arc {arc} is not an arc of the cup diagram of {weight}")]
    ArcNotInDiagram { arc: String, weight: String },
    #[error("{0} is not a cup diagram of any weight")]
    BadDiagram(String),
    #[error("cups must be distinct")]
    SameCup,
    #[error("{lam} is not obtained from {mu} by flipping a single cup")]
    NotACupFlip { lam: String, mu: String },
    #[error("cup {p} and cup {t} are not adjacent")]
    NotAdjacent { p: String, t: String },
    #[error("generated cup is not unique for {p} and {t} in {mu}")]
    AmbiguousGeneratedCup { mu: String, p: String, t: String },
    #[error("weight {orient} does not orient the cup diagram of {weight}")]
    NotOriented { weight: String, orient: String },
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("middle cup {0} is already deleted")]
    AlreadyDeleted(String),
    #[error("middle arc index {0} is not a cup")]
    MiddleNotACup(usize),
    #[error("no admissible surgery exists")]
    NoAdmissibleSurgery,
    #[error("local idempotent precondition fails for cup {0}")]
    NotLocalIdempotent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
