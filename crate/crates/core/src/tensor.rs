//! Order-3 tensors stored as their 3-slices, and the decompositions built
//! from them.

use std::cmp::Ordering;

use thiserror::Error;

use crate::linalg::{rank_tol, LinalgError, Matrix, DEFAULT_TAU_RANK};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("index {index} out of range for {len} slices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("no slices given")]
    EmptyInput,
    #[error("term {0} has a zero matrix or a zero vector")]
    ZeroTerm(usize),
    #[error("vectors of terms {0} and {1} are colinear")]
    ColinearVectors(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn mismatch(expected: impl std::fmt::Debug, found: impl std::fmt::Debug) -> TensorError {
    TensorError::DimensionMismatch {
        expected: format!("{expected:?}"),
        found: format!("{found:?}"),
    }
}

/// Dense tensor in `K^{m x n x p}` with entry `(i, j, k)` stored in slice `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<F> {
    m: usize,
    n: usize,
    slices: Vec<Matrix<F>>,
}

impl<F: Field> Tensor3<F> {
    pub fn zeros(m: usize, n: usize, p: usize) -> Self {
        Self {
            m,
            n,
            slices: vec![Matrix::zeros(m, n); p],
        }
    }

    /// Tensor whose `k`-th slice is `slices[k]`.
    pub fn from_slices(slices: Vec<Matrix<F>>) -> Result<Self, TensorError> {
        let first = slices.first().ok_or(TensorError::EmptyInput)?;
        let (m, n) = first.shape();
        if let Some(bad) = slices.iter().find(|s| s.shape() != (m, n)) {
            return Err(mismatch((m, n), bad.shape()));
        }
        Ok(Self { m, n, slices })
    }

    pub fn from_fn(
        m: usize,
        n: usize,
        p: usize,
        mut f: impl FnMut(usize, usize, usize) -> F,
    ) -> Self {
        let slices = (0..p)
            .map(|k| Matrix::from_fn(m, n, |i, j| f(i, j, k)))
            .collect();
        Self { m, n, slices }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.slices.len())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &F {
        &self.slices[k][(i, j)]
    }

    pub fn slice(&self, k: usize) -> Result<&Matrix<F>, TensorError> {
        self.slices.get(k).ok_or(TensorError::IndexOutOfRange {
            index: k,
            len: self.slices.len(),
        })
    }

    pub fn slices(&self) -> &[Matrix<F>] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<Matrix<F>> {
        self.slices
    }

    /// `T_c = sum_k c_k Z_k`.
    pub fn slice_combination(&self, c: &[F]) -> Result<Matrix<F>, TensorError> {
        if c.len() != self.slices.len() {
            return Err(mismatch(self.slices.len(), c.len()));
        }
        let mut acc = Matrix::zeros(self.m, self.n);
        for (ck, z) in c.iter().zip(&self.slices) {
            if !ck.is_zero() {
                acc = acc.axpy(ck, z)?;
            }
        }
        Ok(acc)
    }

    /// Tensor with slices `a * Z_k`.
    pub fn left_multiply(&self, a: &Matrix<F>) -> Result<Self, TensorError> {
        let slices = self
            .slices
            .iter()
            .map(|z| a.mul(z))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            m: a.rows(),
            n: self.n,
            slices,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(Matrix::is_zero)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        if self.dims() != other.dims() {
            return Err(mismatch(self.dims(), other.dims()));
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            m: self.m,
            n: self.n,
            slices,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `|self - other|_F / |self|_F`, or the absolute error when `self = 0`.
    pub fn relative_residual(&self, other: &Self) -> Result<f64, TensorError> {
        let diff = self.sub(other)?.frobenius_norm();
        let norm = self.frobenius_norm();
        Ok(if norm == 0.0 { diff } else { diff / norm })
    }

    pub fn to_f64(&self) -> Tensor3<f64> {
        Tensor3 {
            m: self.m,
            n: self.n,
            slices: self.slices.iter().map(Matrix::to_f64).collect(),
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Tensor3<G> {
        Tensor3 {
            m: self.m,
            n: self.n,
            slices: self.slices.iter().map(|s| s.map(&f)).collect(),
        }
    }
}

/// One term `M ⊗ w`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVectorTerm<F> {
    pub matrix: Matrix<F>,
    pub w: Vec<F>,
}

impl<F: Field> MatrixVectorTerm<F> {
    pub fn new(matrix: Matrix<F>, w: Vec<F>) -> Self {
        Self { matrix, w }
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_tol(&self.matrix, tol)
    }
}

/// `T = sum_l M_l ⊗ w_l` with nonzero terms and pairwise non-colinear `w_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVectorDecomposition<F> {
    terms: Vec<MatrixVectorTerm<F>>,
    ranks: Vec<usize>,
}

impl<F: Field> MatrixVectorDecomposition<F> {
    pub fn empty() -> Self {
        Self {
            terms: Vec::new(),
            ranks: Vec::new(),
        }
    }

    pub fn new(terms: Vec<MatrixVectorTerm<F>>) -> Result<Self, TensorError> {
        Self::with_tol(terms, DEFAULT_TAU_RANK)
    }

    /// Validates shapes, nonzero terms and pairwise independence of the `w`.
    pub fn with_tol(terms: Vec<MatrixVectorTerm<F>>, tol: f64) -> Result<Self, TensorError> {
        if let Some(first) = terms.first() {
            let shape = (first.matrix.shape(), first.w.len());
            if let Some(bad) = terms.iter().find(|t| (t.matrix.shape(), t.w.len()) != shape) {
                return Err(mismatch(shape, (bad.matrix.shape(), bad.w.len())));
            }
        }
        let ranks: Vec<usize> = terms.iter().map(|t| t.rank(tol)).collect();
        for (l, t) in terms.iter().enumerate() {
            let w = Matrix::column_vector(&t.w);
            if ranks[l] == 0 || rank_tol(&w, tol) == 0 {
                return Err(TensorError::ZeroTerm(l));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                let pair = Matrix::from_columns(terms[i].w.len(), &[terms[i].w.clone(), terms[j].w.clone()]);
                if rank_tol(&pair, tol) < 2 {
                    return Err(TensorError::ColinearVectors(i, j));
                }
            }
        }
        Ok(Self { terms, ranks })
    }

    pub fn terms(&self) -> &[MatrixVectorTerm<F>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<MatrixVectorTerm<F>> {
        self.terms
    }

    /// Number of terms `q`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `rank(M_l)` per term.
    pub fn term_ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `sum_l rank(M_l)`.
    pub fn rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn to_f64(&self) -> MatrixVectorDecomposition<f64> {
        MatrixVectorDecomposition {
            terms: self
                .terms
                .iter()
                .map(|t| MatrixVectorTerm::new(t.matrix.to_f64(), t.w.iter().map(F::to_f64).collect()))
                .collect(),
            ranks: self.ranks.clone(),
        }
    }
}

/// `T_{ijk} = sum_l (M_l)_{ij} (w_l)_k`.
pub fn reconstruct<F: Field>(
    d: &MatrixVectorDecomposition<F>,
    m: usize,
    n: usize,
    p: usize,
) -> Result<Tensor3<F>, TensorError> {
    reconstruct_terms(d.terms(), m, n, p)
}

/// [`reconstruct`] for terms that have not been validated.
pub fn reconstruct_terms<F: Field>(
    terms: &[MatrixVectorTerm<F>],
    m: usize,
    n: usize,
    p: usize,
) -> Result<Tensor3<F>, TensorError> {
    for t in terms {
        if (t.matrix.shape(), t.w.len()) != ((m, n), p) {
            return Err(mismatch((m, n, p), (t.matrix.rows(), t.matrix.cols(), t.w.len())));
        }
    }
    let slices = (0..p)
        .map(|k| {
            terms
                .iter()
                .filter(|t| !t.w[k].is_zero())
                .try_fold(Matrix::zeros(m, n), |acc, t| acc.axpy(&t.w[k], &t.matrix))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Tensor3 { m, n, slices })
}

/// Factor matrices of `T = sum_i u_i ⊗ v_i ⊗ w_i`, one column per term.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneDecomposition<F> {
    pub u: Matrix<F>,
    pub v: Matrix<F>,
    pub w: Matrix<F>,
}

impl<F: Field> RankOneDecomposition<F> {
    pub fn new(u: Matrix<F>, v: Matrix<F>, w: Matrix<F>) -> Result<Self, TensorError> {
        if u.cols() != v.cols() || u.cols() != w.cols() {
            return Err(mismatch(u.cols(), (v.cols(), w.cols())));
        }
        Ok(Self { u, v, w })
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }
}

pub fn reconstruct_rank_one<F: Field>(d: &RankOneDecomposition<F>) -> Tensor3<F> {
    let (m, n, p) = (d.u.rows(), d.v.rows(), d.w.rows());
    let mut slices = vec![Matrix::zeros(m, n); p];
    for i in 0..d.rank() {
        let uv = Matrix::outer(&d.u.column(i), &d.v.column(i));
        for (k, slice) in slices.iter_mut().enumerate() {
            let wk = &d.w[(k, i)];
            if !wk.is_zero() {
                *slice = slice.axpy(wk, &uv).expect("shapes agree");
            }
        }
    }
    Tensor3 { m, n, slices }
}

fn lex_cmp<F: Field>(a: &[F], b: &[F]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Normal form up to scaling and permutation: each `w_l` is scaled so its
/// first nonzero entry is 1 (the matrix absorbs the inverse factor), then
/// terms are sorted by `(rank M_l, w_l, M_l)` lexicographically.
pub fn canonicalize<F: Field>(d: &MatrixVectorDecomposition<F>) -> MatrixVectorDecomposition<F> {
    let mut terms: Vec<(usize, MatrixVectorTerm<F>)> = d
        .terms
        .iter()
        .zip(&d.ranks)
        .map(|(t, &r)| {
            let scale = t.w.iter().fold(0.0f64, |acc, x| acc.max(x.magnitude()));
            let pivot = t
                .w
                .iter()
                .find(|x| !x.is_negligible(DEFAULT_TAU_RANK * scale))
                .cloned()
                .unwrap_or_else(F::one);
            let inv = F::one() / pivot.clone();
            let w = t.w.iter().map(|x| x.clone() * inv.clone()).collect();
            (r, MatrixVectorTerm::new(t.matrix.scale(&pivot), w))
        })
        .collect();
    terms.sort_by(|(ra, a), (rb, b)| {
        ra.cmp(rb)
            .then_with(|| lex_cmp(&a.w, &b.w))
            .then_with(|| lex_cmp(a.matrix.as_slice(), b.matrix.as_slice()))
    });
    let (ranks, terms) = terms.into_iter().unzip();
    MatrixVectorDecomposition { terms, ranks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Matrix<Rational>;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn sample() -> MatrixVectorDecomposition<Rational> {
        MatrixVectorDecomposition::new(vec![
            MatrixVectorTerm::new(Q::from_i64_rows(&[&[1, 2], &[2, 4], &[0, 0]]), qv(&[0, 2, 4])),
            MatrixVectorTerm::new(Q::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]), qv(&[1, 1, 0])),
        ])
        .unwrap()
    }

    #[test]
    fn slices_of_rank_one() {
        let u = qv(&[1, 2]);
        let v = qv(&[3, 0, -1]);
        let w = qv(&[2, -1]);
        let d = RankOneDecomposition::new(
            Q::column_vector(&u),
            Q::column_vector(&v),
            Q::column_vector(&w),
        )
        .unwrap();
        let t = reconstruct_rank_one(&d);
        assert_eq!(t.dims(), (2, 3, 2));
        let uv = Q::outer(&u, &v);
        assert_eq!(t.slice(0).unwrap(), &uv.scale(&q(2)));
        assert_eq!(t.slice(1).unwrap(), &uv.scale(&q(-1)));
        assert_eq!(
            t.slice(2),
            Err(TensorError::IndexOutOfRange { index: 2, len: 2 })
        );
        assert!(Tensor3::<Rational>::zeros(2, 2, 2).slice(1).unwrap().is_zero());
    }

    #[test]
    fn from_slices_examples() {
        let t = Tensor3::from_slices(vec![Q::from_i64_rows(&[&[4]]), Q::from_i64_rows(&[&[7]])]).unwrap();
        assert_eq!(t.dims(), (1, 1, 2));
        assert_eq!((t.get(0, 0, 0), t.get(0, 0, 1)), (&q(4), &q(7)));
        assert_eq!(Tensor3::<Rational>::from_slices(vec![]), Err(TensorError::EmptyInput));
        assert!(matches!(
            Tensor3::from_slices(vec![Q::zeros(1, 2), Q::zeros(2, 1)]),
            Err(TensorError::DimensionMismatch { .. })
        ));
        assert_eq!(Tensor3::from_slices(vec![Q::identity(2)]).unwrap().dims(), (2, 2, 1));
    }

    #[test]
    fn slice_combination_examples() {
        let t = reconstruct(&sample(), 3, 2, 3).unwrap();
        assert_eq!(&t.slice_combination(&qv(&[0, 1, 0])).unwrap(), t.slice(1).unwrap());
        assert!(t.slice_combination(&qv(&[0, 0, 0])).unwrap().is_zero());
        // T_c = sum <c, w_l> M_l
        let c = qv(&[3, -1, 2]);
        let expected = sample().terms().iter().fold(Q::zeros(3, 2), |acc, t| {
            acc.axpy(&crate::linalg::dot(&c, &t.w), &t.matrix).unwrap()
        });
        assert_eq!(t.slice_combination(&c).unwrap(), expected);
        assert!(t.slice_combination(&qv(&[1])).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        assert!(reconstruct(&MatrixVectorDecomposition::<Rational>::empty(), 2, 3, 4)
            .unwrap()
            .is_zero());
        assert!(reconstruct(&sample(), 3, 2, 2).is_err());
        assert_eq!(sample().rank(), 3);
        assert_eq!(sample().term_ranks(), &[1, 2]);
    }

    #[test]
    fn validation() {
        let m = Q::identity(2);
        assert_eq!(
            MatrixVectorDecomposition::new(vec![
                MatrixVectorTerm::new(m.clone(), qv(&[1, 2])),
                MatrixVectorTerm::new(m.clone(), qv(&[-2, -4])),
            ]),
            Err(TensorError::ColinearVectors(0, 1))
        );
        assert_eq!(
            MatrixVectorDecomposition::new(vec![MatrixVectorTerm::new(Q::zeros(2, 2), qv(&[1]))]),
            Err(TensorError::ZeroTerm(0))
        );
    }

    #[test]
    fn canonicalize_examples() {
        let m = Q::from_i64_rows(&[&[1, 0], &[0, 0]]);
        let d = MatrixVectorDecomposition::new(vec![MatrixVectorTerm::new(
            m.scale(&q(2)),
            vec![q(0), Rational::new(1.into(), 2.into()), q(3)],
        )])
        .unwrap();
        let c = canonicalize(&d);
        assert_eq!(c.terms()[0].matrix, m);
        assert_eq!(c.terms()[0].w, qv(&[0, 1, 6]));
        assert_eq!(canonicalize(&c), c);
        let s = canonicalize(&sample());
        assert_eq!(s.term_ranks(), &[1, 2]);
        assert_eq!(canonicalize(&s), s);
    }

    fn small_decomposition() -> impl Strategy<Value = MatrixVectorDecomposition<Rational>> {
        let term = (
            proptest::collection::vec(-2i64..=2, 9),
            proptest::collection::vec(-3i64..=3, 3),
        );
        proptest::collection::vec(term, 1..4).prop_filter_map("invalid", |raw| {
            let terms = raw
                .into_iter()
                .map(|(m, w)| {
                    MatrixVectorTerm::new(Q::from_fn(3, 3, |i, j| q(m[3 * i + j])), qv(&w))
                })
                .collect();
            MatrixVectorDecomposition::new(terms).ok()
        })
    }

    proptest! {
        #[test]
        fn slices_round_trip(d in small_decomposition()) {
            let t = reconstruct(&d, 3, 3, 3).unwrap();
            let back = Tensor3::from_slices(t.slices().to_vec()).unwrap();
            prop_assert_eq!(&back, &t);
            for k in 0..3 {
                prop_assert_eq!(back.slice(k).unwrap(), t.slice(k).unwrap());
            }
        }

        #[test]
        fn canonicalize_preserves_tensor(d in small_decomposition()) {
            let c = canonicalize(&d);
            prop_assert_eq!(reconstruct(&c, 3, 3, 3).unwrap(), reconstruct(&d, 3, 3, 3).unwrap());
            prop_assert_eq!(canonicalize(&c), c);
        }

        #[test]
        fn slice_rank_bounded_by_decomposition_rank(
            d in small_decomposition(),
            c in proptest::collection::vec(-5i64..=5, 3),
        ) {
            let t = reconstruct(&d, 3, 3, 3).unwrap();
            prop_assert!(rank(&t.slice_combination(&qv(&c)).unwrap()) <= d.rank());
        }

        #[test]
        fn independent_w_means_equal_spans(d in small_decomposition()) {
            let ws: Vec<Vec<Rational>> = d.terms().iter().map(|t| t.w.clone()).collect();
            prop_assume!(rank(&Q::from_columns(3, &ws)) == d.len());
            let t = reconstruct(&d, 3, 3, 3).unwrap();
            let zs: Vec<Vec<Rational>> = t.slices().iter().map(Matrix::vectorize).collect();
            let ms: Vec<Vec<Rational>> = d.terms().iter().map(|t| t.matrix.vectorize()).collect();
            let z = Q::from_columns(9, &zs);
            let m = Q::from_columns(9, &ms);
            let both = Q::hstack(9, &[&z, &m]).unwrap();
            prop_assert_eq!(rank(&z), rank(&both));
            prop_assert_eq!(rank(&m), rank(&both));
        }
    }
}
