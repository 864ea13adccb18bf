//! Elimination kernels shared by both field realizations.
//!
//! Exact scalars use fraction-free (Bareiss) elimination, which keeps every
//! intermediate entry a minor of the input and therefore keeps integer inputs
//! integral. Floats use ordinary elimination with partial pivoting and a
//! relative zero threshold.

use crate::scalar::{Field, UniPoly};

use super::{LinalgError, Matrix};

/// Pivot structure of a row-echelon reduction.
#[derive(Debug, Clone)]
pub(crate) struct Pivots<F> {
    /// Original row index of each pivot, in elimination order.
    pub rows: Vec<usize>,
    /// Pivot column of each pivot, increasing.
    pub cols: Vec<usize>,
    /// Determinant when the input is square; zero when it is singular.
    pub det: F,
}

impl<F> Pivots<F> {
    pub fn rank(&self) -> usize {
        self.cols.len()
    }
}

fn zero_threshold<F: Field>(m: &Matrix<F>, tol: f64) -> f64 {
    if F::is_exact() {
        0.0
    } else {
        tol * m.max_abs()
    }
}

/// Row-echelon pivots. `limit` stops after that many pivots.
pub(crate) fn pivots<F: Field>(m: &Matrix<F>, tol: f64, limit: Option<usize>) -> Pivots<F> {
    if F::is_exact() {
        bareiss(m, limit)
    } else {
        partial_pivot(m, tol, limit)
    }
}

fn bareiss<F: Field>(m: &Matrix<F>, limit: Option<usize>) -> Pivots<F> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut prev = F::one();
    let mut negate = false;
    let mut out = Pivots {
        rows: Vec::new(),
        cols: Vec::new(),
        det: F::zero(),
    };
    let max = limit.unwrap_or(usize::MAX);
    let mut r = 0;
    for c in 0..cols {
        if r == rows || out.rank() == max {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            swap_rows(&mut a, p, r);
            perm.swap(p, r);
            negate = !negate;
        }
        let pivot = a[(r, c)].clone();
        for i in r + 1..rows {
            let factor = a[(i, c)].clone();
            for j in c + 1..cols {
                let v = pivot.clone() * a[(i, j)].clone() - factor.clone() * a[(r, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
            a[(i, c)] = F::zero();
        }
        prev = pivot;
        out.rows.push(perm[r]);
        out.cols.push(c);
        r += 1;
    }
    if rows == cols && out.rank() == rows {
        out.det = if negate { -prev } else { prev };
    }
    out
}

fn partial_pivot<F: Field>(m: &Matrix<F>, tol: f64, limit: Option<usize>) -> Pivots<F> {
    let (rows, cols) = m.shape();
    let thresh = zero_threshold(m, tol);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut det = F::one();
    let mut out = Pivots {
        rows: Vec::new(),
        cols: Vec::new(),
        det: F::zero(),
    };
    let max = limit.unwrap_or(usize::MAX);
    let mut r = 0;
    for c in 0..cols {
        if r == rows || out.rank() == max {
            break;
        }
        let p = (r..rows)
            .max_by(|&x, &y| a[(x, c)].magnitude().total_cmp(&a[(y, c)].magnitude()))
            .expect("nonempty range");
        if a[(p, c)].magnitude() <= thresh {
            continue;
        }
        if p != r {
            swap_rows(&mut a, p, r);
            perm.swap(p, r);
            det = -det;
        }
        let pivot = a[(r, c)].clone();
        det = det * pivot.clone();
        for i in r + 1..rows {
            let factor = a[(i, c)].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for j in c + 1..cols {
                a[(i, j)] = a[(i, j)].clone() - factor.clone() * a[(r, j)].clone();
            }
            a[(i, c)] = F::zero();
        }
        out.rows.push(perm[r]);
        out.cols.push(c);
        r += 1;
    }
    if rows == cols && out.rank() == rows {
        out.det = det;
    }
    out
}

fn swap_rows<F: Field>(a: &mut Matrix<F>, i: usize, j: usize) {
    for c in 0..a.cols() {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
}

/// Reduced row-echelon form and its pivot columns.
pub(crate) fn rref<F: Field>(m: &Matrix<F>, tol: f64) -> (Matrix<F>, Vec<usize>) {
    let (rows, cols) = m.shape();
    let thresh = zero_threshold(m, tol);
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = if F::is_exact() {
            (r..rows).find(|&i| !a[(i, c)].is_zero())
        } else {
            (r..rows)
                .max_by(|&x, &y| a[(x, c)].magnitude().total_cmp(&a[(y, c)].magnitude()))
                .filter(|&p| a[(p, c)].magnitude() > thresh)
        };
        let Some(p) = p else {
            continue;
        };
        swap_rows(&mut a, p, r);
        let inv = F::one() / a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..cols {
                a[(i, j)] = a[(i, j)].clone() - factor.clone() * a[(r, j)].clone();
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    (a, pivot_cols)
}

/// Determinant by fraction-free elimination (partial pivoting for floats).
pub fn determinant<F: Field>(m: &Matrix<F>) -> Result<F, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    if m.rows() == 0 {
        return Ok(F::one());
    }
    Ok(pivots(m, 0.0, None).det)
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Result<Matrix<F>, LinalgError> {
    inverse_tol(m, super::DEFAULT_TAU_RANK)
}

/// Gauss-Jordan inverse.
pub fn inverse_tol<F: Field>(m: &Matrix<F>, tol: f64) -> Result<Matrix<F>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    let n = m.rows();
    let aug = Matrix::hstack(n, &[m, &Matrix::identity(n)])?;
    let (red, piv) = rref(&aug, tol);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(LinalgError::Singular);
    }
    Ok(Matrix::from_fn(n, n, |i, j| red[(i, n + j)].clone()))
}

/// Row and column indices of an `r x r` nonsingular submatrix, taken from the
/// first `r` pivots of Gaussian elimination. Both index lists are sorted.
pub fn full_rank_submatrix<F: Field>(
    m: &Matrix<F>,
    r: usize,
) -> Result<(Vec<usize>, Vec<usize>), LinalgError> {
    full_rank_submatrix_tol(m, r, super::DEFAULT_TAU_RANK)
}

pub fn full_rank_submatrix_tol<F: Field>(
    m: &Matrix<F>,
    r: usize,
    tol: f64,
) -> Result<(Vec<usize>, Vec<usize>), LinalgError> {
    let p = pivots(m, tol, Some(r));
    if p.rank() < r {
        return Err(LinalgError::RankDeficient {
            required: r,
            rank: p.rank(),
        });
    }
    let mut rows = p.rows;
    rows.sort_unstable();
    Ok((rows, p.cols))
}

/// `det(Ma - x Mb)` as a polynomial in `x`, by exact evaluation at
/// `x = 0, 1, ..., r` followed by interpolation.
pub fn pencil_det_poly<F: Field>(ma: &Matrix<F>, mb: &Matrix<F>) -> Result<UniPoly<F>, LinalgError> {
    if !ma.is_square() {
        return Err(LinalgError::NotSquare(ma.shape()));
    }
    if ma.shape() != mb.shape() {
        return Err(LinalgError::SizeMismatch {
            expected: ma.shape(),
            found: mb.shape(),
        });
    }
    let r = ma.rows();
    let points = (0..=r as i64)
        .map(|x| {
            let x = F::from_i64(x);
            let shifted = ma.axpy(&-x.clone(), mb)?;
            Ok((x, determinant(&shifted)?))
        })
        .collect::<Result<Vec<_>, LinalgError>>()?;
    Ok(UniPoly::interpolate(&points).expect("abscissas 0..=r are distinct"))
}
