use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the crate. Vertices in messages are 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mapping is not a bijection on 1..{n}: {detail}")]
    NotABijection { n: usize, detail: String },
    #[error("vertex {vertex} appears in more than one cycle")]
    OverlappingCycles { vertex: usize },
    #[error("vertex {vertex} is outside 1..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("cycle ({}) has fewer than two vertices", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))]
    CycleTooShort(Vec<usize>),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not symmetric: cost({i},{j}) = {ij} but cost({j},{i}) = {ji}")]
    Asymmetry { i: usize, j: usize, ij: i64, ji: i64 },
    #[error("cost {value} at ({i},{j}) exceeds the supported magnitude {limit}")]
    CostOutOfRange { i: usize, j: usize, value: i64, limit: i64 },
    #[error("permutation fixes vertex {vertex}; its cost would read the diagonal")]
    FixedPointCost { vertex: usize },
    #[error("arc ({from},{to}) is forbidden in the derived matrix")]
    ForbiddenArc { from: usize, to: usize },
    #[error("arc ({from},{to}) fails the admissibility predicate")]
    InadmissibleArc { from: usize, to: usize },
    #[error("path has no repeated vertex")]
    NotNonSimple,
    #[error("path repeats more than one vertex")]
    MultipleRepeats,
    #[error("path repeats vertex {vertex} somewhere other than its endpoint")]
    MisplacedRepeat { vertex: usize },
    #[error("applying the cycle creates a fixed point at {vertex}")]
    CreatesFixedPoint { vertex: usize },
    #[error("applying the cycle creates the 2-cycle ({a} {b})")]
    CreatesTwoCycle { a: usize, b: usize },
    #[error("starting permutation is not a valid {mode} derangement")]
    InvalidStart { mode: String },
    #[error("instance size {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },
    #[error("no feasible {mode} derangement exists on {n} points")]
    Infeasible { n: usize, mode: String },
    #[error("range error: {0}")]
    Range(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors that signal a broken internal invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}
