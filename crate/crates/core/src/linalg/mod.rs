//! Dense linear algebra over a [`Field`].
//!
//! Exact scalars go through fraction-free elimination. Floats go through
//! partial pivoting for determinants and inverses and through the SVD for
//! ranks, kernels, images and eigenspaces.

mod elim;
mod matrix;
mod spectral;
mod subspace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Field, ScalarError};

pub use elim::{
    determinant, full_rank_submatrix, full_rank_submatrix_tol, inverse, inverse_tol,
    pencil_det_poly,
};
pub use matrix::{dot, Matrix};
pub use spectral::{eigendecompose, principal_angle, pseudoinverse, Eigenspace};
pub use subspace::{
    basis_completion, direct_sum_check, direct_sum_check_tol, extend_to_invertible,
    extend_to_invertible_tol, Subspace,
};

pub(crate) use spectral::Svd;

pub const DEFAULT_TAU_RANK: f64 = 1e-9;
pub const DEFAULT_TAU_EIG: f64 = 1e-8;
pub const DEFAULT_TAU_PROP: f64 = 1e-7;
pub const DEFAULT_TAU_RESID: f64 = 1e-6;

/// Float-mode tolerances. Exact mode ignores all of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative singular value cutoff for numerical rank.
    pub rank: f64,
    /// Relative gap separating eigenvalue clusters.
    pub eig: f64,
    /// Relative residual allowed when checking slice proportionality.
    pub prop: f64,
    /// Relative reconstruction residual accepted before returning.
    pub resid: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: DEFAULT_TAU_RANK,
            eig: DEFAULT_TAU_EIG,
            prop: DEFAULT_TAU_PROP,
            resid: DEFAULT_TAU_RESID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("size mismatch: expected {expected:?}, found {found:?}")]
    SizeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has rank {rank}, needed {required}")]
    RankDeficient { required: usize, rank: usize },
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("subspaces are not in direct sum: dimensions add to {sum}, span has dimension {span}")]
    NotDirectSum { sum: usize, span: usize },
    #[error("vectors are linearly dependent")]
    DependentBasis,
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rank_tol(m, DEFAULT_TAU_RANK)
}

/// Rank; floats count singular values above `tol * sigma_max`.
pub fn rank_tol<F: Field>(m: &Matrix<F>, tol: f64) -> usize {
    if F::is_exact() {
        elim::pivots(m, 0.0, None).rank()
    } else {
        spectral::rank_svd(m, tol)
    }
}

pub fn nullspace<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    nullspace_tol(m, DEFAULT_TAU_RANK)
}

/// `ker m`. Exact mode uses the standard reduced-echelon basis; floats get an
/// orthonormal basis.
pub fn nullspace_tol<F: Field>(m: &Matrix<F>, tol: f64) -> Subspace<F> {
    Subspace::from_basis_unchecked(nullspace_basis(m, tol))
}

fn nullspace_basis<F: Field>(m: &Matrix<F>, tol: f64) -> Matrix<F> {
    if !F::is_exact() {
        return spectral::nullspace_svd(m, tol);
    }
    let n = m.cols();
    let (red, piv) = elim::rref(m, 0.0);
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    Matrix::from_fn(n, free.len(), |i, j| {
        let f = free[j];
        if i == f {
            F::one()
        } else if let Some(k) = piv.iter().position(|&c| c == i) {
            -red[(k, f)].clone()
        } else {
            F::zero()
        }
    })
}

pub fn image<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    image_tol(m, DEFAULT_TAU_RANK)
}

/// Column space. Exact mode keeps the pivot columns of `m`; floats get an
/// orthonormal basis.
pub fn image_tol<F: Field>(m: &Matrix<F>, tol: f64) -> Subspace<F> {
    let basis = if F::is_exact() {
        m.select_columns(&elim::pivots(m, 0.0, None).cols)
    } else {
        spectral::image_svd(m, tol)
    };
    Subspace::from_basis_unchecked(basis)
}
