//! The decomposition engine.
//!
//! [`decompose`] recovers the images `Im(M_l)` from a random pencil of slice
//! combinations, maps them onto coordinate blocks, reads the terms off the
//! resulting disjoint-rows tensor and maps back. Every output is verified
//! before it is returned; a failed verification triggers a fresh draw of the
//! pencil coefficients, up to `max_retries` draws.

mod disjoint;
mod images;
mod jennrich;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    basis_completion, direct_sum_check_tol, image_tol, LinalgError, Subspace, Tolerances,
};
use crate::scalar::{Field, ScalarError};
use crate::tensor::{
    reconstruct_terms, MatrixVectorDecomposition, MatrixVectorTerm, Tensor3, TensorError,
};

pub use disjoint::disjoint_rows_decompose;
pub use images::{compute_images, compute_images_float, ImageRecovery, Pencil, PencilSpectrum};
pub use jennrich::{jennrich_decompose, JennrichOutput};

pub const DEFAULT_BOUND: i64 = 10_000;
pub const DEFAULT_MAX_RETRIES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("tensor does not have the disjoint rows property: {0}")]
    NotDisjointRows(String),
    #[error("block ranks add to {sum}, more than the {rows} available rows")]
    BlockRankMismatch { sum: usize, rows: usize },
    #[error("eigenvalue pairing failed: {0}")]
    PairingFailure(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl From<ScalarError> for DecompError {
    fn from(e: ScalarError) -> Self {
        DecompError::Linalg(e.into())
    }
}

impl DecompError {
    /// Errors that no redraw of the pencil coefficients can fix.
    fn is_structural(&self) -> bool {
        matches!(
            self,
            DecompError::Linalg(LinalgError::Scalar(
                ScalarError::NotExactMode | ScalarError::NotFloatMode
            )) | DecompError::Tensor(TensorError::DimensionMismatch { .. })
                | DecompError::BlockRankMismatch { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecompConfig {
    /// Pencil coefficients are drawn uniformly from `[-bound, bound]`.
    pub bound: i64,
    /// Number of coefficient draws before giving up.
    pub max_retries: usize,
    pub tol: Tolerances,
}

impl Default for DecompConfig {
    fn default() -> Self {
        Self {
            bound: DEFAULT_BOUND,
            max_retries: DEFAULT_MAX_RETRIES,
            tol: Tolerances::default(),
        }
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p` integers drawn uniformly from `[-bound, bound]`.
pub fn draw_coefficients<F: Field, R: Rng + ?Sized>(p: usize, bound: i64, rng: &mut R) -> Vec<F> {
    let bound = bound.max(1);
    (0..p)
        .map(|_| F::from_i64(rng.random_range(-bound..=bound)))
        .collect()
}

/// Retry bookkeeping shared by the randomized routines.
#[derive(Debug, Default)]
pub(crate) struct Attempt {
    pub r_max: usize,
    pub count: usize,
}

impl Attempt {
    /// Records a failed draw; returns the error once retries are exhausted
    /// or when it cannot be fixed by redrawing.
    pub fn fail(&mut self, e: DecompError, config: &DecompConfig) -> Result<(), DecompError> {
        self.count += 1;
        if e.is_structural() || self.count >= config.max_retries.max(1) {
            Err(e)
        } else {
            Ok(())
        }
    }
}

/// A verified decomposition with the pencil data that produced it.
#[derive(Debug, Clone)]
pub struct Decomposed<F> {
    pub decomposition: MatrixVectorDecomposition<F>,
    /// `None` for the zero tensor.
    pub recovery: Option<ImageRecovery<F>>,
    /// Number of coefficient draws used.
    pub attempts: usize,
}

/// The minimum-rank matrix-vector decomposition of `t`.
pub fn decompose<F: Field>(
    t: &Tensor3<F>,
    seed: u64,
    config: &DecompConfig,
) -> Result<MatrixVectorDecomposition<F>, DecompError> {
    decompose_detailed(t, seed, config).map(|d| d.decomposition)
}

pub fn decompose_detailed<F: Field>(
    t: &Tensor3<F>,
    seed: u64,
    config: &DecompConfig,
) -> Result<Decomposed<F>, DecompError> {
    if t.is_zero() {
        return Ok(Decomposed {
            decomposition: MatrixVectorDecomposition::empty(),
            recovery: None,
            attempts: 0,
        });
    }
    let mut rng = rng(seed);
    let mut state = Attempt::default();
    loop {
        let result = images::attempt(t, &mut rng, config, &mut state)
            .and_then(|rec| pipeline(t, &rec, config).map(|d| (d, rec)));
        match result {
            Ok((decomposition, rec)) => {
                return Ok(Decomposed {
                    decomposition,
                    recovery: Some(rec),
                    attempts: state.count + 1,
                })
            }
            Err(e) => state.fail(e, config)?,
        }
    }
}

fn pipeline<F: Field>(
    t: &Tensor3<F>,
    rec: &ImageRecovery<F>,
    config: &DecompConfig,
) -> Result<MatrixVectorDecomposition<F>, DecompError> {
    let m = t.dims().0;
    let tol = if F::is_exact() { 0.0 } else { config.tol.rank };
    let c = basis_completion(&rec.spectrum.images, m, tol)?;
    let a = crate::linalg::inverse_tol(&c, tol)?;
    let t_prime = t.left_multiply(&a)?;
    let dims = rec.image_dims();
    let blocks = disjoint_rows_decompose(&t_prime, &dims, &config.tol)?;
    let mut start = 0;
    let mut terms = Vec::with_capacity(dims.len());
    for (term, &d) in blocks.terms().iter().zip(&dims) {
        // A^-1 N_l only involves the columns of C matching the block of N_l
        let cols: Vec<usize> = (start..start + d).collect();
        let block = term.matrix.row_block(start, d);
        terms.push(MatrixVectorTerm::new(
            c.select_columns(&cols).mul(&block)?,
            term.w.clone(),
        ));
        start += d;
    }
    let d = MatrixVectorDecomposition::with_tol(terms, tol)?;
    verify(t, &d, rec.r(), config)?;
    Ok(d)
}

/// Outcome of checking a claimed decomposition against a tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// Relative Frobenius residual (exactly 0 for an exact match).
    pub residual: f64,
    pub reconstructs: bool,
    pub images_direct_sum: bool,
    pub transpose_images_direct_sum: bool,
    pub w_pairwise_independent: bool,
    pub term_ranks: Vec<usize>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.reconstructs
            && self.images_direct_sum
            && self.transpose_images_direct_sum
            && self.w_pairwise_independent
    }
}

/// Checks reconstruction (entry-exact, or relative residual below
/// `tol.resid`), both direct-sum conditions and pairwise independence of the
/// `w_l`. Works on raw terms so that invalid claims can be reported.
pub fn verify_terms<F: Field>(
    t: &Tensor3<F>,
    terms: &[MatrixVectorTerm<F>],
    tol: &Tolerances,
) -> Result<Verification, DecompError> {
    let (m, n, p) = t.dims();
    let rank_tol = if F::is_exact() { 0.0 } else { tol.rank };
    let w_ok = MatrixVectorDecomposition::with_tol(terms.to_vec(), rank_tol).is_ok();
    let rebuilt = reconstruct_terms(terms, m, n, p)?;
    let residual = t.relative_residual(&rebuilt)?;
    let reconstructs = if F::is_exact() {
        rebuilt == *t
    } else {
        residual < tol.resid
    };
    let images: Vec<Subspace<F>> = terms.iter().map(|x| image_tol(&x.matrix, rank_tol)).collect();
    let co_images: Vec<Subspace<F>> = terms
        .iter()
        .map(|x| image_tol(&x.matrix.transpose(), rank_tol))
        .collect();
    Ok(Verification {
        residual,
        reconstructs,
        images_direct_sum: direct_sum_check_tol(&images, rank_tol)?,
        transpose_images_direct_sum: direct_sum_check_tol(&co_images, rank_tol)?,
        w_pairwise_independent: w_ok,
        term_ranks: images.iter().map(Subspace::dim).collect(),
    })
}

fn verify<F: Field>(
    t: &Tensor3<F>,
    d: &MatrixVectorDecomposition<F>,
    r: usize,
    config: &DecompConfig,
) -> Result<(), DecompError> {
    let v = verify_terms(t, d.terms(), &config.tol)?;
    if !v.reconstructs {
        return Err(DecompError::HypothesisViolation(format!(
            "output does not reconstruct the input (relative residual {:e})",
            v.residual
        )));
    }
    if d.rank() != r {
        return Err(DecompError::HypothesisViolation(format!(
            "output rank {} differs from r = {r}",
            d.rank()
        )));
    }
    if !v.images_direct_sum || !v.transpose_images_direct_sum {
        return Err(DecompError::HypothesisViolation(
            "output images or transpose images are not in direct sum".into(),
        ));
    }
    Ok(())
}
