//! Recovery of the spaces `Im(M_l)` from two random slice combinations.

use rand::Rng;

use crate::linalg::{
    direct_sum_check_tol, eigendecompose, full_rank_submatrix_tol, nullspace_tol,
    pencil_det_poly, pseudoinverse, rank_tol, Matrix, Subspace,
};
use crate::scalar::{rational_roots, Field, ScalarError, UniPoly};
use crate::tensor::Tensor3;

use super::{draw_coefficients, Attempt, DecompConfig, DecompError};

/// The pair `(T_a, T_b)` with the data extracted from it.
#[derive(Debug, Clone)]
pub struct Pencil<F> {
    pub a: Vec<F>,
    pub b: Vec<F>,
    pub ta: Matrix<F>,
    pub tb: Matrix<F>,
    /// `rank(T_a)`
    pub r: usize,
    /// Rows and columns of an `r x r` nonsingular submatrix of `T_a` (exact
    /// mode only).
    pub subrows: Vec<usize>,
    pub subcols: Vec<usize>,
    /// `det(M_a - x M_b)` (exact mode only).
    pub poly: Option<UniPoly<F>>,
}

/// Nontrivial eigenvalues of the pencil with their eigenspaces and images.
///
/// In exact mode `eigenspaces[l] = ker(T_a - lambda_l T_b)` and
/// `images[l] = T_b(eigenspaces[l])`. In float mode the eigenspaces are those
/// of `T_a T_b^+`, which are already the images.
#[derive(Debug, Clone)]
pub struct PencilSpectrum<F> {
    pub eigenvalues: Vec<F>,
    pub eigenspaces: Vec<Subspace<F>>,
    pub images: Vec<Subspace<F>>,
}

#[derive(Debug, Clone)]
pub struct ImageRecovery<F> {
    pub pencil: Pencil<F>,
    pub spectrum: PencilSpectrum<F>,
}

impl<F: Field> ImageRecovery<F> {
    pub fn r(&self) -> usize {
        self.pencil.r
    }

    pub fn image_dims(&self) -> Vec<usize> {
        self.spectrum.images.iter().map(Subspace::dim).collect()
    }
}

/// Image recovery with retries: the exact pencil route for rationals, the
/// pseudoinverse route for floats.
pub fn compute_images<F: Field>(
    t: &Tensor3<F>,
    seed: u64,
    config: &DecompConfig,
) -> Result<ImageRecovery<F>, DecompError> {
    let mut rng = super::rng(seed);
    let mut state = Attempt::default();
    loop {
        match attempt(t, &mut rng, config, &mut state) {
            Ok(rec) => return Ok(rec),
            Err(e) => state.fail(e, config)?,
        }
    }
}

/// The pseudoinverse route on its own. Float mode only.
pub fn compute_images_float<F: Field>(
    t: &Tensor3<F>,
    seed: u64,
    config: &DecompConfig,
) -> Result<ImageRecovery<F>, DecompError> {
    if F::is_exact() {
        return Err(ScalarError::NotFloatMode.into());
    }
    compute_images(t, seed, config)
}

/// One draw of `(a, b)`. Genericity failures come back as
/// `HypothesisViolation`.
pub(crate) fn attempt<F: Field, R: Rng>(
    t: &Tensor3<F>,
    rng: &mut R,
    config: &DecompConfig,
    state: &mut Attempt,
) -> Result<ImageRecovery<F>, DecompError> {
    let (_, _, p) = t.dims();
    let a: Vec<F> = draw_coefficients(p, config.bound, rng);
    let b: Vec<F> = draw_coefficients(p, config.bound, rng);
    let ta = t.slice_combination(&a)?;
    let tb = t.slice_combination(&b)?;
    let r = rank_tol(&ta, config.tol.rank);
    if r < state.r_max {
        return Err(violation(format!(
            "rank(T_a) = {r} below the rank {} seen on an earlier draw",
            state.r_max
        )));
    }
    state.r_max = r;
    if r == 0 {
        return Err(violation("T_a is zero for a nonzero tensor"));
    }
    let rb = rank_tol(&tb, config.tol.rank);
    if rb != r {
        return Err(violation(format!("rank(T_b) = {rb} differs from rank(T_a) = {r}")));
    }
    let pencil = Pencil {
        a,
        b,
        ta,
        tb,
        r,
        subrows: Vec::new(),
        subcols: Vec::new(),
        poly: None,
    };
    let rec = if F::is_exact() {
        exact_route(pencil)?
    } else {
        float_route(pencil, config)?
    };
    let sum: usize = rec.image_dims().iter().sum();
    if sum != r {
        return Err(violation(format!("image dimensions add to {sum}, expected r = {r}")));
    }
    if !direct_sum_check_tol(&rec.spectrum.images, config.tol.rank)? {
        return Err(violation("recovered images are not in direct sum"));
    }
    Ok(rec)
}

fn violation(msg: impl Into<String>) -> DecompError {
    DecompError::HypothesisViolation(msg.into())
}

fn exact_route<F: Field>(mut pencil: Pencil<F>) -> Result<ImageRecovery<F>, DecompError> {
    let r = pencil.r;
    let n = pencil.ta.cols();
    let (rows, cols) = full_rank_submatrix_tol(&pencil.ta, r, 0.0)?;
    let ma = pencil.ta.submatrix(&rows, &cols);
    let mb = pencil.tb.submatrix(&rows, &cols);
    let poly = pencil_det_poly(&ma, &mb)?;
    let roots = rational_roots(&poly)?;

    let mut spectrum = PencilSpectrum {
        eigenvalues: Vec::with_capacity(roots.len()),
        eigenspaces: Vec::with_capacity(roots.len()),
        images: Vec::with_capacity(roots.len()),
    };
    for lambda in roots {
        let shifted = pencil.ta.axpy(&-lambda.clone(), &pencil.tb)?;
        let v = nullspace_tol(&shifted, 0.0);
        let image = Subspace::span(&pencil.tb.mul(v.basis())?);
        if v.dim() != n - r + image.dim() {
            return Err(violation(format!(
                "eigenspace of {lambda} has dimension {}, expected n - r + {} = {}",
                v.dim(),
                image.dim(),
                n - r + image.dim()
            )));
        }
        if image.dim() == 0 {
            return Err(violation(format!("root {lambda} is a trivial eigenvalue")));
        }
        spectrum.eigenvalues.push(lambda);
        spectrum.eigenspaces.push(v);
        spectrum.images.push(image);
    }
    pencil.subrows = rows;
    pencil.subcols = cols;
    pencil.poly = Some(poly);
    Ok(ImageRecovery { pencil, spectrum })
}

fn float_route<F: Field>(
    pencil: Pencil<F>,
    config: &DecompConfig,
) -> Result<ImageRecovery<F>, DecompError> {
    let m = pencil.ta.rows();
    let r = pencil.r;
    let x = pencil.ta.mul(&pseudoinverse(&pencil.tb, config.tol.rank)?)?;
    let clusters = eigendecompose(&x, &config.tol)?;
    let mut spectrum = PencilSpectrum {
        eigenvalues: Vec::new(),
        eigenspaces: Vec::new(),
        images: Vec::new(),
    };
    let mut zero_dim = 0;
    for c in clusters {
        if c.value.is_zero() {
            zero_dim = c.space.dim();
            continue;
        }
        spectrum.eigenvalues.push(c.value);
        spectrum.images.push(c.space.clone());
        spectrum.eigenspaces.push(c.space);
    }
    if zero_dim != m - r {
        return Err(violation(format!(
            "eigenvalue 0 of T_a T_b^+ has multiplicity {zero_dim}, expected m - r = {}",
            m - r
        )));
    }
    Ok(ImageRecovery { pencil, spectrum })
}
