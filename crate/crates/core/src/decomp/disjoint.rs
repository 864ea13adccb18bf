use crate::linalg::{dot, Matrix, Tolerances};
use crate::scalar::Field;
use crate::tensor::{MatrixVectorDecomposition, MatrixVectorTerm, Tensor3};

use super::DecompError;

/// Decomposes a tensor whose `l`-th term lives in rows
/// `block_ranks[..l].sum() .. block_ranks[..=l].sum()`.
///
/// For each block, a slice with a nonzero block is chosen as `M'_l` with
/// `w_lk = 1` (the first such slice in exact mode, the one of largest norm in
/// float mode); the other `w_lj` are proportionality coefficients, which are
/// verified. Rows below the last block must vanish.
pub fn disjoint_rows_decompose<F: Field>(
    t: &Tensor3<F>,
    block_ranks: &[usize],
    tol: &Tolerances,
) -> Result<MatrixVectorDecomposition<F>, DecompError> {
    let (m, n, _) = t.dims();
    let sum: usize = block_ranks.iter().sum();
    if sum > m {
        return Err(DecompError::BlockRankMismatch { sum, rows: m });
    }
    let scale = t.frobenius_norm();
    let bottom = t
        .slices()
        .iter()
        .map(|z| z.row_block(sum, m - sum))
        .collect::<Vec<_>>();
    if bottom.iter().any(|b| !is_zero(b, tol.prop * scale)) {
        return Err(DecompError::NotDisjointRows(format!(
            "rows {sum}..{m} are not zero"
        )));
    }

    let mut terms = Vec::with_capacity(block_ranks.len());
    let mut start = 0;
    for (l, &d) in block_ranks.iter().enumerate() {
        let blocks: Vec<Matrix<F>> = t.slices().iter().map(|z| z.row_block(start, d)).collect();
        let k = pick_slice(&blocks, tol.prop * scale).ok_or_else(|| {
            DecompError::NotDisjointRows(format!("block {l} is zero in every slice"))
        })?;
        let reference = &blocks[k];
        let w = blocks
            .iter()
            .enumerate()
            .map(|(j, b)| {
                if j == k {
                    Ok(F::one())
                } else {
                    proportionality(b, reference, tol).ok_or_else(|| {
                        DecompError::NotDisjointRows(format!(
                            "block {l} of slice {j} is not a multiple of slice {k}"
                        ))
                    })
                }
            })
            .collect::<Result<Vec<F>, _>>()?;
        let padded = Matrix::from_fn(m, n, |i, c| {
            if i >= start && i < start + d {
                reference[(i - start, c)].clone()
            } else {
                F::zero()
            }
        });
        terms.push(MatrixVectorTerm::new(padded, w));
        start += d;
    }
    let rank_tol = if F::is_exact() { 0.0 } else { tol.rank };
    Ok(MatrixVectorDecomposition::with_tol(terms, rank_tol)?)
}

fn is_zero<F: Field>(m: &Matrix<F>, abs_tol: f64) -> bool {
    if F::is_exact() {
        m.is_zero()
    } else {
        m.frobenius_norm() <= abs_tol
    }
}

fn pick_slice<F: Field>(blocks: &[Matrix<F>], abs_tol: f64) -> Option<usize> {
    if F::is_exact() {
        return blocks.iter().position(|b| !b.is_zero());
    }
    let (k, norm) = blocks
        .iter()
        .map(Matrix::frobenius_norm)
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    (norm > abs_tol).then_some(k)
}

/// `c` with `block = c * reference`, if it exists.
fn proportionality<F: Field>(block: &Matrix<F>, reference: &Matrix<F>, tol: &Tolerances) -> Option<F> {
    if F::is_exact() {
        let pivot = reference.as_slice().iter().position(|x| !x.is_zero())?;
        let c = block.as_slice()[pivot].clone() / reference.as_slice()[pivot].clone();
        (*block == reference.scale(&c)).then_some(c)
    } else {
        // least-squares coefficient, then a relative residual check
        let r = reference.as_slice();
        let c = dot(block.as_slice(), r) / dot(r, r);
        let residual = block.sub(&reference.scale(&c)).ok()?.frobenius_norm();
        (residual <= tol.prop * reference.frobenius_norm()).then_some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::tensor::reconstruct;

    type Q = Matrix<Rational>;

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn single_block_identity_case() {
        let z = Q::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let t = Tensor3::from_slices(vec![z.clone()]).unwrap();
        let d = disjoint_rows_decompose(&t, &[2], &Tolerances::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms()[0].matrix, z);
        assert_eq!(d.terms()[0].w, qv(&[1]));
    }

    fn two_blocks() -> (Tensor3<Rational>, Vec<Vec<Rational>>) {
        let m1 = Q::from_i64_rows(&[&[0, 2, 1], &[0, 0, 0], &[0, 0, 0]]);
        let m2 = Q::from_i64_rows(&[&[0, 0, 0], &[1, -1, 4], &[0, 0, 0]]);
        let w1 = qv(&[0, 3, -1]);
        let w2 = qv(&[5, 1, 2]);
        let d = MatrixVectorDecomposition::new(vec![
            MatrixVectorTerm::new(m1, w1.clone()),
            MatrixVectorTerm::new(m2, w2.clone()),
        ])
        .unwrap();
        (reconstruct(&d, 3, 3, 3).unwrap(), vec![w1, w2])
    }

    #[test]
    fn recovers_proportionality_vectors() {
        let (t, ws) = two_blocks();
        let d = disjoint_rows_decompose(&t, &[1, 1], &Tolerances::default()).unwrap();
        assert_eq!(reconstruct(&d, 3, 3, 3).unwrap(), t);
        // w_1 is normalized at its first nonzero slice (k = 1), w_2 at k = 0
        let third = Rational::new(1.into(), 3.into());
        let w1: Vec<Rational> = ws[0].iter().map(|x| x * &third).collect();
        assert_eq!(d.terms()[0].w, w1);
        let fifth = Rational::new(1.into(), 5.into());
        let w2: Vec<Rational> = ws[1].iter().map(|x| x * &fifth).collect();
        assert_eq!(d.terms()[1].w, w2);

        let tf = t.to_f64();
        let df = disjoint_rows_decompose(&tf, &[1, 1], &Tolerances::default()).unwrap();
        assert!(tf.relative_residual(&reconstruct(&df, 3, 3, 3).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn perturbation_breaks_proportionality() {
        let (t, _) = two_blocks();
        let mut slices = t.into_slices();
        slices[2][(1, 2)] = slices[2][(1, 2)].clone() + Rational::from_i64(1);
        let bad = Tensor3::from_slices(slices).unwrap();
        assert!(matches!(
            disjoint_rows_decompose(&bad, &[1, 1], &Tolerances::default()),
            Err(DecompError::NotDisjointRows(_))
        ));
        assert!(matches!(
            disjoint_rows_decompose(&bad.to_f64(), &[1, 1], &Tolerances::default()),
            Err(DecompError::NotDisjointRows(_))
        ));
    }

    #[test]
    fn block_errors() {
        let (t, _) = two_blocks();
        assert_eq!(
            disjoint_rows_decompose(&t, &[2, 2], &Tolerances::default()),
            Err(DecompError::BlockRankMismatch { sum: 4, rows: 3 })
        );
        // the second block is not in the first row alone
        assert!(matches!(
            disjoint_rows_decompose(&t, &[1], &Tolerances::default()),
            Err(DecompError::NotDisjointRows(_))
        ));
    }
}
