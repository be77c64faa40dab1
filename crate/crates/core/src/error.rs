use thiserror::Error;

use crate::matrix::IndexKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    GcdOfZeros,
    #[error("q-degree of a vertex of degree 0")]
    ZeroDegree,
    #[error("pole at q = {point}{}", location.map(|(r, c)| format!(" in entry ({}, {})", r + 1, c + 1)).unwrap_or_default())]
    PoleAtPoint {
        point: String,
        location: Option<(usize, usize)>,
    },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("NotNonsingular: the tree has no perfect matching")]
    NotNonsingular,
    #[error("invalid labeling: {0}")]
    InvalidLabels(String),
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
    #[error("vertex {vertex} has degree {degree}; a split needs degree at least 2")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index kind mismatch: {left:?} against {right:?}")]
    IndexKindMismatch { left: IndexKind, right: IndexKind },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("bd_q vanishes; the inverse formula is undefined")]
    BdqZero,
    #[error("bd vanishes at q = 1; the inverse formula is undefined")]
    BdZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
}

pub type Result<T> = std::result::Result<T, Error>;
