use crate::scalar::Field;

use super::{elim, image, inverse_tol, rank_tol, LinalgError, Matrix, Svd, DEFAULT_TAU_RANK};

/// A linear subspace of `K^ambient_dim`, stored as a basis matrix with
/// linearly independent columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<F> {
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Checks that the columns of `basis` are linearly independent.
    pub fn from_basis(basis: Matrix<F>, tol: f64) -> Result<Self, LinalgError> {
        if rank_tol(&basis, tol) != basis.cols() {
            return Err(LinalgError::DependentBasis);
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_basis_unchecked(basis: Matrix<F>) -> Self {
        Self { basis }
    }

    /// Span of the columns of `m`, which may be dependent.
    pub fn span(m: &Matrix<F>) -> Self {
        image(m)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn into_basis(self) -> Matrix<F> {
        self.basis
    }

    /// Whether `v` lies in the subspace (up to `tol` for floats).
    pub fn contains(&self, v: &[F], tol: f64) -> bool {
        let col = Matrix::column_vector(v);
        let stacked = Matrix::hstack(self.ambient_dim(), &[&self.basis, &col])
            .expect("vector length matches ambient dimension");
        rank_tol(&stacked, tol) == self.dim()
    }

    /// Whether both subspaces are the same.
    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return false;
        }
        let stacked = Matrix::hstack(self.ambient_dim(), &[&self.basis, &other.basis])
            .expect("ambient dimensions agree");
        rank_tol(&stacked, tol) == self.dim()
    }
}

pub fn direct_sum_check<F: Field>(spaces: &[Subspace<F>]) -> Result<bool, LinalgError> {
    direct_sum_check_tol(spaces, DEFAULT_TAU_RANK)
}

/// True iff the concatenated bases have rank equal to the sum of dimensions.
pub fn direct_sum_check_tol<F: Field>(
    spaces: &[Subspace<F>],
    tol: f64,
) -> Result<bool, LinalgError> {
    let (sum, span) = sum_and_span(spaces, tol)?;
    Ok(sum == span)
}

fn ambient<F: Field>(spaces: &[Subspace<F>]) -> Result<Option<usize>, LinalgError> {
    let Some(first) = spaces.first() else {
        return Ok(None);
    };
    let m = first.ambient_dim();
    if let Some(bad) = spaces.iter().find(|s| s.ambient_dim() != m) {
        return Err(LinalgError::AmbientMismatch(m, bad.ambient_dim()));
    }
    Ok(Some(m))
}

fn concatenated<F: Field>(spaces: &[Subspace<F>], m: usize) -> Matrix<F> {
    let blocks: Vec<&Matrix<F>> = spaces.iter().map(|s| &s.basis).collect();
    Matrix::hstack(m, &blocks).expect("ambient dimensions agree")
}

fn sum_and_span<F: Field>(spaces: &[Subspace<F>], tol: f64) -> Result<(usize, usize), LinalgError> {
    let Some(m) = ambient(spaces)? else {
        return Ok((0, 0));
    };
    let sum = spaces.iter().map(Subspace::dim).sum();
    let span = rank_tol(&concatenated(spaces, m), tol);
    Ok((sum, span))
}

/// The invertible matrix `C` whose leading columns are the concatenated bases
/// of `spaces`, completed to a basis of `K^m`.
///
/// Exact mode completes with canonical vectors chosen greedily in order.
/// Float mode completes with an orthonormal basis of the orthogonal
/// complement, which keeps `C` as well conditioned as the input bases allow.
pub fn basis_completion<F: Field>(
    spaces: &[Subspace<F>],
    m: usize,
    tol: f64,
) -> Result<Matrix<F>, LinalgError> {
    if let Some(a) = ambient(spaces)? {
        if a != m {
            return Err(LinalgError::AmbientMismatch(m, a));
        }
    }
    let (sum, span) = sum_and_span(spaces, tol)?;
    if sum != span {
        return Err(LinalgError::NotDirectSum { sum, span });
    }
    let b = if spaces.is_empty() {
        Matrix::zeros(m, 0)
    } else {
        concatenated(spaces, m)
    };
    if F::is_exact() {
        let aug = Matrix::hstack(m, &[&b, &Matrix::identity(m)])?;
        let (_, piv) = elim::rref(&aug, tol);
        Ok(aug.select_columns(&piv))
    } else {
        let extra = if sum == 0 {
            Matrix::identity(m)
        } else {
            // columns of U beyond the rank span the orthogonal complement
            let padded = Matrix::hstack(m, &[&b, &Matrix::zeros(m, m.saturating_sub(sum))])?;
            let svd = Svd::new(&padded.to_faer());
            Matrix::from_fn(m, m - sum, |i, j| F::from_f64(svd.u[(i, sum + j)]))
        };
        Ok(Matrix::hstack(m, &[&b, &extra])?)
    }
}

pub fn extend_to_invertible<F: Field>(
    spaces: &[Subspace<F>],
    m: usize,
) -> Result<Matrix<F>, LinalgError> {
    extend_to_invertible_tol(spaces, m, DEFAULT_TAU_RANK)
}

/// Invertible `A` mapping the `l`-th space onto the span of the next `dim_l`
/// canonical vectors: the inverse of [`basis_completion`].
pub fn extend_to_invertible_tol<F: Field>(
    spaces: &[Subspace<F>],
    m: usize,
    tol: f64,
) -> Result<Matrix<F>, LinalgError> {
    inverse_tol(&basis_completion(spaces, m, tol)?, tol)
}
