//! Exact q-analogue bipartite distance matrices of nonsingular trees.
//!
//! A nonsingular tree is a tree with a perfect matching. This crate builds the
//! q-bipartite distance matrix, the exponential bipartite distance matrix and
//! the q-bipartite Laplacian of such a tree over `Z[q]`, their closed-form
//! inverses and the `bd_q` index, and checks the identities that relate them
//! using independent exact linear algebra.

pub mod error;
pub mod exactla;
pub mod json;
pub mod matched;
pub mod matrix;
pub mod poly;
pub mod qmatrices;
pub mod ratfun;
pub mod tree;
pub mod verify;

pub mod cli;

pub use error::{Error, Result};
pub use matched::{MatchedTree, Side};
pub use matrix::{IndexKind, IntMat, Matrix, PolyMat, PolyVec, QMat, RatMat, Vector};
pub use poly::Poly;
pub use ratfun::RatFun;
pub use tree::Tree;
