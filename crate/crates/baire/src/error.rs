use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("{0} is not a code of a finite sequence")]
    NotASeqCode(String),
    #[error("cannot parse word {0:?}")]
    BadWord(String),
    #[error("cannot parse dimension {0:?}")]
    BadDimension(String),
    #[error("finite dimension must be at least 2, got {0}")]
    DimensionTooSmall(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("points live over different base points")]
    DifferentBases,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("coordinate {0} is beyond the certified horizon of the base")]
    BeyondHorizon(u64),
    #[error("no hit of letter {letter} at or after {from} below position {searched_to}")]
    NoHit {
        letter: u64,
        from: u64,
        searched_to: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("index {index} out of dimension {dim}")]
    IndexOutOfDimension { index: u64, dim: u64 },
    #[error("points live over different base points")]
    DifferentBases,
    #[error("coloring misses vertex {0}")]
    MissingVertex(String),
    #[error("{vertices} vertices exceed the bound {bound}")]
    TooLarge { vertices: u64, bound: u64 },
    #[error("parts do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error("part {0} contains a whole hyperedge")]
    PartNotDiscrete(usize),
    #[error("invalid truncation: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Point(#[from] PointError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("alphabet bound {k} does not exceed letter {letter} of s_{j}")]
    AlphabetTooSmall { k: u64, letter: u64, j: u64 },
    #[error("{0} is not a vertex of the graph")]
    VertexNotInGraph(String),
    #[error("no path between {0} and {1}")]
    Disconnected(String, String),
    #[error("not a path: {0}")]
    NotAPath(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("point is not over the base of this context")]
    DifferentBases,
    #[error("not a canonical modification: {0}")]
    NotCanonical(String),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Level(#[from] LevelError),
}
