//! Minimum-rank matrix-vector decompositions of order-3 tensors.
//!
//! A tensor `T` of size `m x n x p` is written as `sum_l M_l ⊗ w_l` with as
//! few total rank `sum_l rank(M_l)` as possible. When the images of the
//! `M_l` and of their transposes are in direct sum and the `w_l` are pairwise
//! independent, this decomposition is unique and [`decompose`] computes it
//! from two random slice combinations. The same machinery finds all the
//! minimum-rank matrices of a matrix subspace ([`minrank`]).
//!
//! Everything runs over [`Rational`] (exact) or `f64` (float).

pub mod decomp;
pub mod instancegen;
pub mod json;
pub mod linalg;
pub mod minrank;
pub mod scalar;
pub mod tensor;

pub use decomp::{decompose, jennrich_decompose, DecompConfig, DecompError, JennrichOutput, Verification};
pub use linalg::{LinalgError, Matrix, Subspace, Tolerances};
pub use minrank::{check_certificate, minrank, Certificate, MinrankError, MinrankResult};
pub use scalar::{Field, Mode, Rational, ScalarError};
pub use tensor::{
    canonicalize, reconstruct, MatrixVectorDecomposition, MatrixVectorTerm, RankOneDecomposition,
    Tensor3, TensorError,
};
