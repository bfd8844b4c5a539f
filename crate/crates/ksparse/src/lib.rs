//! Sparse matrix factorizations `Q = CD` with bounded forward overlap, and the
//! iterative linear solvers they enable.
//!
//! The central object is [`KSparseFactorization`]: a factorization `Q = CD`
//! whose certified sparsity index `k` bounds the cost of every projection
//! update `x <- x - (x.q_j / q_j.q_j) q_j` at `O(k)` multiply-adds, even when
//! the columns `q_j` are dense. The [`engine`] module runs randomized sweeps
//! of those updates, and [`solvers`] wires them into three end-to-end solvers:
//! minimum-norm underdetermined, square/overdetermined, and Laplacian systems.
//!
//! Matrix classes with small `k` are constructed in [`hmatrix`] (hierarchical
//! matrices over dendrograms, semiseparable conversion) and [`graphs`]
//! (reduced incidence matrices of trees and their inverses, via vertex
//! separators).
//!
//! All numeric types are generic over the scalar via [`Scalar`] and default to
//! `f64`.

pub mod dense;
pub mod engine;
pub mod error;
pub mod factorization;
pub mod graphs;
pub mod hmatrix;
pub mod instances;
pub mod io;
pub mod solvers;
pub mod sparse;
pub mod work;

mod scalar;

pub use error::{Error, Result};
pub use factorization::KSparseFactorization;
pub use scalar::Scalar;
pub use sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};

/// Single-precision aliases for the core operand types.
pub type SparseVector32 = SparseVector<f32>;
pub type ColMajorSparseMatrix32 = ColMajorSparseMatrix<f32>;
pub type DenseVector32 = DenseVector<f32>;
pub type KSparseFactorization32 = KSparseFactorization<f32>;
