//! Simultaneous diagonalization for rank-one decompositions (float mode).

use crate::linalg::{eigendecompose, pseudoinverse, rank_tol, Eigenspace, Matrix};
use crate::scalar::{Field, ScalarError};
use crate::tensor::{reconstruct_rank_one, RankOneDecomposition, Tensor3};

use super::{draw_coefficients, rng, Attempt, DecompConfig, DecompError};

#[derive(Debug, Clone)]
pub struct JennrichOutput<F> {
    pub decomposition: RankOneDecomposition<F>,
    /// Relative Frobenius reconstruction residual.
    pub residual: f64,
    /// `max_i |lambda_i mu_i - 1|` over the paired eigenvalues.
    pub pairing_residual: f64,
}

/// Rank-one decomposition by simultaneous diagonalization: eigenvectors of
/// `T_a T_b^+` give the `u_i`, eigenvectors of `(T_a^+ T_b)^T` give the
/// `v_i`, the two are paired by reciprocal eigenvalues and the `w_i` are the
/// least-squares solution of `T = sum_i u_i ⊗ v_i ⊗ w_i`.
pub fn jennrich_decompose<F: Field>(
    t: &Tensor3<F>,
    seed: u64,
    config: &DecompConfig,
) -> Result<JennrichOutput<F>, DecompError> {
    if F::is_exact() {
        return Err(ScalarError::NotFloatMode.into());
    }
    let mut rng = rng(seed);
    let mut state = Attempt::default();
    loop {
        let (_, _, p) = t.dims();
        let a: Vec<F> = draw_coefficients(p, config.bound, &mut rng);
        let b: Vec<F> = draw_coefficients(p, config.bound, &mut rng);
        match attempt(t, &a, &b, config, &mut state) {
            Ok(out) => return Ok(out),
            Err(e) => state.fail(e, config)?,
        }
    }
}

fn attempt<F: Field>(
    t: &Tensor3<F>,
    a: &[F],
    b: &[F],
    config: &DecompConfig,
    state: &mut Attempt,
) -> Result<JennrichOutput<F>, DecompError> {
    let (m, n, p) = t.dims();
    let tol = &config.tol;
    let ta = t.slice_combination(a)?;
    let tb = t.slice_combination(b)?;
    let r = rank_tol(&ta, tol.rank);
    if r < state.r_max {
        return Err(DecompError::HypothesisViolation(format!(
            "rank(T_a) = {r} below the rank {} seen on an earlier draw",
            state.r_max
        )));
    }
    state.r_max = r;

    let x = ta.mul(&pseudoinverse(&tb, tol.rank)?)?;
    let y = pseudoinverse(&ta, tol.rank)?.mul(&tb)?.transpose();
    let left = simple_nonzero(eigendecompose(&x, tol)?, r, "T_a T_b^+")?;
    let right = simple_nonzero(eigendecompose(&y, tol)?, r, "(T_a^+ T_b)^T")?;

    let mut used = vec![false; r];
    let mut pairs = Vec::with_capacity(r);
    let mut pairing_residual = 0.0f64;
    for (i, (lambda, _)) in left.iter().enumerate() {
        let best = right
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, (mu, _))| (j, (lambda * mu - 1.0).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, res)) if res < tol.eig => {
                used[j] = true;
                pairs.push((i, j));
                pairing_residual = pairing_residual.max(res);
            }
            _ => {
                return Err(DecompError::PairingFailure(format!(
                    "no reciprocal partner for eigenvalue {lambda}"
                )))
            }
        }
    }

    let u = Matrix::from_fn(m, r, |row, c| F::from_f64(left[pairs[c].0].1[row]));
    let v = Matrix::from_fn(n, r, |row, c| F::from_f64(right[pairs[c].1].1[row]));
    // vec(Z_k) = K w^(k) with K = [vec(u_i v_i^T)]
    let k_cols: Vec<Vec<F>> = (0..r)
        .map(|i| Matrix::outer(&u.column(i), &v.column(i)).vectorize())
        .collect();
    let k = Matrix::from_columns(m * n, &k_cols);
    let z_cols: Vec<Vec<F>> = t.slices().iter().map(Matrix::vectorize).collect();
    let z = Matrix::from_columns(m * n, &z_cols);
    let w = pseudoinverse(&k, tol.rank)?.mul(&z)?.transpose();
    debug_assert_eq!(w.shape(), (p, r));

    let decomposition = RankOneDecomposition::new(u, v, w)?;
    let residual = t.relative_residual(&reconstruct_rank_one(&decomposition))?;
    if residual >= tol.resid {
        return Err(DecompError::HypothesisViolation(format!(
            "reconstruction residual {residual:e} exceeds {:e}",
            tol.resid
        )));
    }
    Ok(JennrichOutput {
        decomposition,
        residual,
        pairing_residual,
    })
}

/// The nonzero eigenvalues with unit eigenvectors; each must be simple and
/// there must be exactly `r` of them.
fn simple_nonzero<F: Field>(
    spaces: Vec<Eigenspace<F>>,
    r: usize,
    what: &str,
) -> Result<Vec<(f64, Vec<f64>)>, DecompError> {
    let mut out = Vec::with_capacity(r);
    for e in spaces {
        if e.value.is_zero() {
            continue;
        }
        if e.space.dim() != 1 {
            return Err(DecompError::DegenerateSpectrum(format!(
                "eigenvalue {} of {what} has a {}-dimensional eigenspace",
                e.value,
                e.space.dim()
            )));
        }
        let col = e.space.basis().column(0);
        out.push((e.value.to_f64(), col.iter().map(F::to_f64).collect()));
    }
    if out.len() != r {
        return Err(DecompError::DegenerateSpectrum(format!(
            "{what} has {} nonzero eigenvalues, expected {r}",
            out.len()
        )));
    }
    Ok(out)
}
