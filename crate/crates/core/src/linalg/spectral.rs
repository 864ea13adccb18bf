//! Floating-point kernels built on the singular value decomposition.

use faer::Mat;

use crate::scalar::{Field, ScalarError};

use super::{LinalgError, Matrix, Subspace, Tolerances};

/// Full SVD `M = U diag(sigma) V^T` with singular values in decreasing
/// order; `U` is `m x m` and `V` is `n x n`.
pub(crate) struct Svd {
    pub u: Mat<f64>,
    pub sigma: Vec<f64>,
    pub v: Mat<f64>,
}

impl Svd {
    pub fn new(m: &Mat<f64>) -> Self {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Self {
                u: Mat::identity(m.nrows(), m.nrows()),
                sigma: Vec::new(),
                v: Mat::identity(m.ncols(), m.ncols()),
            };
        }
        let svd = m.svd().expect("SVD of a finite matrix");
        let s = svd.S().column_vector();
        let mut order: Vec<usize> = (0..s.nrows()).collect();
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        let sigma = order.iter().map(|&i| s[i]).collect();
        let permute = |q: faer::MatRef<'_, f64>| {
            Mat::from_fn(q.nrows(), q.ncols(), |i, j| {
                q[(i, order.get(j).copied().unwrap_or(j))]
            })
        };
        Self {
            u: permute(svd.U()),
            sigma,
            v: permute(svd.V()),
        }
    }

    pub fn max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.max();
        self.sigma.iter().filter(|&&s| s > cut && s > 0.0).count()
    }
}

pub(crate) fn rank_svd<F: Field>(m: &Matrix<F>, tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    Svd::new(&m.to_faer()).rank(tol)
}

pub(crate) fn nullspace_svd<F: Field>(m: &Matrix<F>, tol: f64) -> Matrix<F> {
    let n = m.cols();
    if m.rows() == 0 || n == 0 {
        return Matrix::identity(n);
    }
    let svd = Svd::new(&m.to_faer());
    let rank = svd.rank(tol);
    Matrix::from_fn(n, n - rank, |i, j| F::from_f64(svd.v[(i, rank + j)]))
}

pub(crate) fn image_svd<F: Field>(m: &Matrix<F>, tol: f64) -> Matrix<F> {
    if m.rows() == 0 || m.cols() == 0 {
        return Matrix::zeros(m.rows(), 0);
    }
    let svd = Svd::new(&m.to_faer());
    let rank = svd.rank(tol);
    Matrix::from_fn(m.rows(), rank, |i, j| F::from_f64(svd.u[(i, j)]))
}

/// Moore-Penrose inverse; singular values below `tau_rank * sigma_max` are
/// treated as zero. Float mode only.
pub fn pseudoinverse<F: Field>(m: &Matrix<F>, tau_rank: f64) -> Result<Matrix<F>, LinalgError> {
    if F::is_exact() {
        return Err(ScalarError::NotFloatMode.into());
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Matrix::zeros(m.cols(), m.rows()));
    }
    let svd = Svd::new(&m.to_faer());
    let rank = svd.rank(tau_rank);
    Ok(Matrix::from_fn(m.cols(), m.rows(), |i, j| {
        F::from_f64(
            (0..rank)
                .map(|k| svd.v[(i, k)] * svd.u[(j, k)] / svd.sigma[k])
                .sum::<f64>(),
        )
    }))
}

/// One eigenvalue cluster with its eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace<F> {
    pub value: F,
    pub space: Subspace<F>,
}

/// Eigenvalues of a diagonalizable real matrix, clustered with relative gap
/// `tol.eig`, each with an orthonormal eigenspace basis.
///
/// The eigenspace of a cluster of size `k` is spanned by the `k` right
/// singular vectors of `M - lambda I` with smallest singular values; the
/// residual `|(M - lambda I) V|` is checked against `tol.eig * scale`.
/// Clusters come out sorted by increasing eigenvalue.
pub fn eigendecompose<F: Field>(
    m: &Matrix<F>,
    tol: &Tolerances,
) -> Result<Vec<Eigenspace<F>>, LinalgError> {
    if F::is_exact() {
        return Err(ScalarError::NotFloatMode.into());
    }
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let x = m.to_faer();
    let norm = Svd::new(&x).max();
    if norm == 0.0 {
        return Ok(vec![Eigenspace {
            value: F::zero(),
            space: Subspace::from_basis_unchecked(Matrix::identity(n)),
        }]);
    }
    let eigen = x
        .eigenvalues()
        .map_err(|e| LinalgError::IllConditioned(format!("eigenvalue iteration failed: {e:?}")))?;
    let spectral_radius = eigen.iter().map(|z| z.re.hypot(z.im)).fold(0.0, f64::max);
    let scale = norm.max(spectral_radius);
    if let Some(z) = eigen.iter().find(|z| z.im.abs() > tol.eig * scale) {
        return Err(LinalgError::IllConditioned(format!(
            "non-real eigenvalue {} + {}i",
            z.re, z.im
        )));
    }
    let mut values: Vec<f64> = eigen.iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for v in values {
        match clusters.last_mut() {
            Some(c) if v - c[c.len() - 1] <= tol.eig * scale => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }

    let mut out = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let k = cluster.len();
        let mut lambda = cluster.iter().sum::<f64>() / k as f64;
        if lambda.abs() <= tol.eig * scale {
            lambda = 0.0;
        }
        let shifted = Mat::from_fn(n, n, |i, j| x[(i, j)] - if i == j { lambda } else { 0.0 });
        let svd = Svd::new(&shifted);
        let basis = Mat::from_fn(n, k, |i, j| svd.v[(i, n - k + j)]);
        let residual = Svd::new(&(&shifted * &basis)).max();
        if residual > tol.eig * scale {
            return Err(LinalgError::IllConditioned(format!(
                "eigenspace residual {residual:e} for eigenvalue {lambda} (multiplicity {k})"
            )));
        }
        out.push(Eigenspace {
            value: F::from_f64(lambda),
            space: Subspace::from_basis_unchecked(Matrix::from_faer(basis.as_ref())),
        });
    }
    Ok(out)
}

/// Largest principal angle between two subspaces, in radians. Subspaces of
/// different dimension are at angle `pi/2`.
pub fn principal_angle<F: Field>(a: &Subspace<F>, b: &Subspace<F>, tau_rank: f64) -> f64 {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.dim() == 0 {
        return 0.0;
    }
    let qa = orthonormal(&a.basis().to_faer(), tau_rank);
    let qb = orthonormal(&b.basis().to_faer(), tau_rank);
    if qa.ncols() != qb.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    // sin of the largest angle = |(I - Qa Qa^T) Qb|_2
    let residual = &qb - &qa * (qa.transpose() * &qb);
    Svd::new(&residual).max().clamp(0.0, 1.0).asin()
}

fn orthonormal(m: &Mat<f64>, tol: f64) -> Mat<f64> {
    let svd = Svd::new(m);
    let rank = svd.rank(tol);
    svd.u.subcols(0, rank).to_owned()
}
