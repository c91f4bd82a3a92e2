use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric: entry ({0},{1}) differs from ({1},{0})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry at index {0} is odd; the lattice is not even")]
    OddDiagonal(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("module is degenerate: the bilinear form has a nontrivial radical")]
    DegenerateModule,
    #[error("size guard exceeded: module order {order} is above the limit {limit}")]
    SizeGuardExceeded { order: String, limit: u64 },
    #[error("invalid block parameters: {0}")]
    InvalidBlockParameters(String),
    #[error("no realization found within the search budget: {0}")]
    RealizationNotFound(String),
    #[error("invalid module data: {0}")]
    InvalidModule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}
