//! Minimum-rank matrices of a subspace given by a basis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{decompose, DecompConfig, DecompError};
use crate::linalg::{direct_sum_check_tol, image_tol, rank_tol, Matrix, Subspace, DEFAULT_TAU_RANK};
use crate::scalar::Field;
use crate::tensor::{canonicalize, MatrixVectorDecomposition, MatrixVectorTerm, Tensor3, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Certificate {
    pub p_equals_q: bool,
    pub images_direct_sum: bool,
    pub transpose_images_direct_sum: bool,
    /// `rank [M_i; M_j] > rank M_i` for all `i < j` in rank order.
    pub stacked_rank_ok: bool,
}

impl Certificate {
    pub fn valid(&self) -> bool {
        self.p_equals_q
            && self.images_direct_sum
            && self.transpose_images_direct_sum
            && self.stacked_rank_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinrankResult<F> {
    pub rho: usize,
    /// The recovered basis matrices of rank `rho`.
    pub minimizers: Vec<Matrix<F>>,
    /// All recovered basis matrices, by nondecreasing rank.
    pub hidden_basis: Vec<Matrix<F>>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinrankError {
    #[error("basis matrices are linearly dependent")]
    BasisNotIndependent(Certificate),
    #[error("certificate check failed: {0:?}")]
    CertificateFailed(Certificate),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl MinrankError {
    /// The certificate carried by the error, if any.
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Self::BasisNotIndependent(c) | Self::CertificateFailed(c) => Some(c),
            _ => None,
        }
    }
}

/// All matrices of minimum rank (up to scale) in the span of `basis`.
///
/// The basis becomes the slices of a tensor whose minimum-rank
/// matrix-vector decomposition is computed; its matrices of least rank are
/// the minimizers. When the decomposition cannot be computed, the input basis
/// itself is certified instead: if that fails, the subspace is outside the
/// hypotheses and `CertificateFailed` is returned.
pub fn minrank<F: Field>(
    basis: &[Matrix<F>],
    seed: u64,
    config: &DecompConfig,
) -> Result<MinrankResult<F>, MinrankError> {
    let t = Tensor3::from_slices(basis.to_vec())?;
    let p = basis.len();
    let tol = rank_tolerance::<F>(config);
    let vectors: Vec<Vec<F>> = basis.iter().map(Matrix::vectorize).collect();
    let (m, n, _) = t.dims();
    let independent = rank_tol(&Matrix::from_columns(m * n, &vectors), tol) == p;

    let d = match decompose(&t, seed, config) {
        Ok(d) => d,
        Err(_) if !independent => {
            return Err(MinrankError::BasisNotIndependent(Certificate::default()));
        }
        Err(e) => {
            let trivial = given_basis(basis)?;
            let certificate = check_certificate_tol(&trivial, p, tol);
            return Err(if certificate.valid() {
                e.into()
            } else {
                MinrankError::CertificateFailed(certificate)
            });
        }
    };
    let d = canonicalize(&d);
    let certificate = check_certificate_tol(&d, p, tol);
    if !independent {
        return Err(MinrankError::BasisNotIndependent(certificate));
    }
    if !certificate.valid() {
        return Err(MinrankError::CertificateFailed(certificate));
    }
    let ranks = d.term_ranks().to_vec();
    let hidden_basis: Vec<Matrix<F>> = d.into_terms().into_iter().map(|t| t.matrix).collect();
    let rho = ranks.first().copied().unwrap_or(0);
    let minimizers = hidden_basis
        .iter()
        .zip(&ranks)
        .filter(|(_, &r)| r == rho)
        .map(|(a, _)| a.clone())
        .collect();
    Ok(MinrankResult {
        rho,
        minimizers,
        hidden_basis,
        certificate,
    })
}

/// `sum_k Z_k ⊗ e_k`.
fn given_basis<F: Field>(basis: &[Matrix<F>]) -> Result<MatrixVectorDecomposition<F>, TensorError> {
    let p = basis.len();
    let terms = basis
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let w = (0..p).map(|j| if j == k { F::one() } else { F::zero() }).collect();
            MatrixVectorTerm::new(z.clone(), w)
        })
        .collect();
    MatrixVectorDecomposition::with_tol(terms, 0.0)
}

fn rank_tolerance<F: Field>(config: &DecompConfig) -> f64 {
    if F::is_exact() {
        0.0
    } else {
        config.tol.rank
    }
}

/// Evaluates the certificate flags of a decomposition of a tensor with `p`
/// slices.
pub fn check_certificate<F: Field>(decomp: &MatrixVectorDecomposition<F>, p: usize) -> Certificate {
    let tol = if F::is_exact() { 0.0 } else { DEFAULT_TAU_RANK };
    check_certificate_tol(decomp, p, tol)
}

pub fn check_certificate_tol<F: Field>(
    decomp: &MatrixVectorDecomposition<F>,
    p: usize,
    tol: f64,
) -> Certificate {
    let mut matrices: Vec<(usize, &Matrix<F>)> = decomp
        .terms()
        .iter()
        .map(|t| (rank_tol(&t.matrix, tol), &t.matrix))
        .collect();
    matrices.sort_by_key(|(r, _)| *r);
    let images: Vec<Subspace<F>> = matrices.iter().map(|(_, a)| image_tol(a, tol)).collect();
    let co_images: Vec<Subspace<F>> = matrices
        .iter()
        .map(|(_, a)| image_tol(&a.transpose(), tol))
        .collect();
    let direct = |spaces: &[Subspace<F>]| direct_sum_check_tol(spaces, tol).unwrap_or(false);
    let stacked_rank_ok = matrices.iter().enumerate().all(|(i, (ri, a))| {
        matrices[i + 1..].iter().all(|(_, b)| {
            Matrix::vstack(a.cols(), &[a, b])
                .map(|n| rank_tol(&n, tol) > *ri)
                .unwrap_or(false)
        })
    });
    Certificate {
        p_equals_q: decomp.len() == p,
        images_direct_sum: direct(&images),
        transpose_images_direct_sum: direct(&co_images),
        stacked_rank_ok,
    }
}
