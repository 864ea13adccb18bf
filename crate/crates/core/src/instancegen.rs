//! Seeded random instances with known ground truth.
//!
//! All entries are integers drawn from `[-entry_bound, entry_bound]`, so the
//! same spec produces the same values in both modes. Hidden terms are
//! `M_l = X_l Y_l^T` where the `X_l` (resp. `Y_l`) are disjoint column blocks
//! of one invertible matrix; this makes both families of images direct sums.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{determinant, rank, Matrix};
use crate::scalar::{Field, Mode, Rational};
use crate::tensor::{
    canonicalize, reconstruct, MatrixVectorDecomposition, MatrixVectorTerm, Tensor3, TensorError,
};

pub const DEFAULT_ENTRY_BOUND: i64 = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("invalid instance spec: {0}")]
    SpecInvalid(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn default_entry_bound() -> i64 {
    DEFAULT_ENTRY_BOUND
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    /// `rank(M_l)` for each hidden term.
    pub ranks: Vec<usize>,
    pub seed: u64,
    pub mode: Mode,
    #[serde(default = "default_entry_bound")]
    pub entry_bound: i64,
}

impl InstanceSpec {
    pub fn new(m: usize, n: usize, p: usize, ranks: Vec<usize>, seed: u64, mode: Mode) -> Self {
        Self {
            m,
            n,
            p,
            ranks,
            seed,
            mode,
            entry_bound: DEFAULT_ENTRY_BOUND,
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let invalid = |msg: String| Err(InstanceError::SpecInvalid(msg));
        if self.m == 0 || self.n == 0 || self.p == 0 {
            return invalid(format!("dimensions must be positive, got {:?}", (self.m, self.n, self.p)));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return invalid("ranks must be a nonempty list of positive counts".into());
        }
        let r: usize = self.ranks.iter().sum();
        if r > self.m.min(self.n) {
            return invalid(format!("sum of ranks {r} exceeds min(m, n) = {}", self.m.min(self.n)));
        }
        if self.ranks.len() > 1 && self.p < 2 {
            return invalid("pairwise independent vectors need p >= 2".into());
        }
        if self.entry_bound < 1 {
            return invalid(format!("entry bound must be at least 1, got {}", self.entry_bound));
        }
        Ok(())
    }

    fn check_mode<F: Field>(&self) -> Result<(), InstanceError> {
        if self.mode != F::MODE {
            return Err(InstanceError::SpecInvalid(format!(
                "spec mode {} does not match the requested scalar type ({})",
                self.mode,
                F::MODE
            )));
        }
        Ok(())
    }
}

type IntMatrix = Vec<Vec<i64>>;

struct Gen {
    rng: ChaCha8Rng,
    bound: i64,
}

impl Gen {
    fn new(seed: u64, bound: i64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }

    fn entry(&mut self) -> i64 {
        self.rng.random_range(-self.bound..=self.bound)
    }

    fn vector(&mut self, len: usize) -> Vec<i64> {
        (0..len).map(|_| self.entry()).collect()
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> IntMatrix {
        (0..rows).map(|_| self.vector(cols)).collect()
    }

    fn invertible(&mut self, n: usize) -> IntMatrix {
        loop {
            let m = self.matrix(n, n);
            if !determinant(&to_rational(&m)).expect("square").is_zero() {
                return m;
            }
        }
    }

    /// `count` nonzero vectors of length `p`, pairwise non-colinear.
    fn pairwise_independent(&mut self, count: usize, p: usize) -> Vec<Vec<i64>> {
        loop {
            let ws: Vec<Vec<i64>> = (0..count).map(|_| self.vector(p)).collect();
            let nonzero = ws.iter().all(|w| w.iter().any(|&x| x != 0));
            let independent = (0..count).all(|i| (i + 1..count).all(|j| !colinear(&ws[i], &ws[j])));
            if nonzero && independent {
                return ws;
            }
        }
    }
}

fn colinear(a: &[i64], b: &[i64]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
}

fn to_rational(m: &IntMatrix) -> Matrix<Rational> {
    to_field(m)
}

fn to_field<F: Field>(m: &IntMatrix) -> Matrix<F> {
    Matrix::from_fn(m.len(), m.first().map_or(0, Vec::len), |i, j| F::from_i64(m[i][j]))
}

fn field_vec<F: Field>(v: &[i64]) -> Vec<F> {
    v.iter().map(|&x| F::from_i64(x)).collect()
}

/// `X[:, cols] Y[:, cols]^T` in integers.
fn block_product(x: &IntMatrix, y: &IntMatrix, cols: std::ops::Range<usize>) -> IntMatrix {
    x.iter()
        .map(|xr| {
            y.iter()
                .map(|yr| cols.clone().map(|c| xr[c] * yr[c]).sum())
                .collect()
        })
        .collect()
}

/// Hidden matrices `M_l` with the requested ranks.
fn hidden_matrices(g: &mut Gen, spec: &InstanceSpec) -> Vec<IntMatrix> {
    loop {
        let x = g.invertible(spec.m);
        let y = g.invertible(spec.n);
        let mut start = 0;
        let ms: Vec<IntMatrix> = spec
            .ranks
            .iter()
            .map(|&r| {
                let m = block_product(&x, &y, start..start + r);
                start += r;
                m
            })
            .collect();
        // disjoint blocks of invertible matrices always give full rank;
        // the check only guards the construction
        if ms
            .iter()
            .zip(&spec.ranks)
            .all(|(m, &r)| rank(&to_rational(m)) == r)
        {
            return ms;
        }
    }
}

/// A tensor with a hidden minimum-rank decomposition satisfying both
/// direct-sum conditions.
pub fn gen_instance<F: Field>(
    spec: &InstanceSpec,
) -> Result<(Tensor3<F>, MatrixVectorDecomposition<F>), InstanceError> {
    spec.validate()?;
    spec.check_mode::<F>()?;
    let mut g = Gen::new(spec.seed, spec.entry_bound);
    let ms = hidden_matrices(&mut g, spec);
    let ws = g.pairwise_independent(ms.len(), spec.p);
    let terms = ms
        .iter()
        .zip(&ws)
        .map(|(m, w)| MatrixVectorTerm::new(to_field(m), field_vec(w)))
        .collect();
    let hidden = MatrixVectorDecomposition::with_tol(terms, 0.0)?;
    let t = reconstruct(&hidden, spec.m, spec.n, spec.p)?;
    Ok((t, hidden))
}

/// A mixed basis and the hidden basis it was built from.
pub type BasisPair<F> = (Vec<Matrix<F>>, Vec<Matrix<F>>);

/// A basis of a subspace with a known hidden basis: the hidden matrices
/// mixed by a random invertible `p x p` change of basis. Needs
/// `ranks.len() == p`.
pub fn gen_minrank_basis<F: Field>(
    spec: &InstanceSpec,
) -> Result<BasisPair<F>, InstanceError> {
    spec.validate()?;
    spec.check_mode::<F>()?;
    if spec.ranks.len() != spec.p {
        return Err(InstanceError::SpecInvalid(format!(
            "a hidden basis needs one matrix per basis element ({} ranks, p = {})",
            spec.ranks.len(),
            spec.p
        )));
    }
    let mut g = Gen::new(spec.seed, spec.entry_bound);
    let ms = hidden_matrices(&mut g, spec);
    let w = g.invertible(spec.p);
    Ok(mix(&ms, &w))
}

/// `Z_k = sum_l W[l][k] M_l`, returned with the hidden `M_l`.
fn mix<F: Field>(ms: &[IntMatrix], w: &IntMatrix) -> (Vec<Matrix<F>>, Vec<Matrix<F>>) {
    let (rows, cols) = (ms[0].len(), ms[0][0].len());
    let basis = (0..w[0].len())
        .map(|k| {
            Matrix::from_fn(rows, cols, |i, j| {
                F::from_i64(ms.iter().zip(w).map(|(m, wl)| wl[k] * m[i][j]).sum())
            })
        })
        .collect();
    (basis, ms.iter().map(to_field).collect())
}

/// Basis `{u_1 v^T, u_2 v^T}`: images in direct sum, transpose images equal.
pub fn shared_right_factor_basis<F: Field>(m: usize, n: usize, seed: u64) -> Vec<Matrix<F>> {
    assert!(m >= 2 && n >= 1, "need m >= 2");
    let mut g = Gen::new(seed, DEFAULT_ENTRY_BOUND);
    let x = g.invertible(m);
    let v = loop {
        let v = g.vector(n);
        if v.iter().any(|&e| e != 0) {
            break v;
        }
    };
    (0..2)
        .map(|c| Matrix::from_fn(m, n, |i, j| F::from_i64(x[i][c] * v[j])))
        .collect()
}

/// `sum_i u_i ⊗ v_i ⊗ w_i` with independent `u_i`, `v_i` but `w_2 = 2 w_1`.
pub fn colinear_w_tensor<F: Field>(m: usize, n: usize, p: usize, seed: u64) -> Tensor3<F> {
    assert!(m >= 2 && n >= 2 && p >= 1, "need m, n >= 2");
    let mut g = Gen::new(seed, DEFAULT_ENTRY_BOUND);
    let x = g.invertible(m);
    let y = g.invertible(n);
    let w = loop {
        let w = g.vector(p);
        if w.iter().any(|&e| e != 0) {
            break w;
        }
    };
    Tensor3::from_fn(m, n, p, |i, j, k| {
        F::from_i64((x[i][0] * y[j][0] + 2 * x[i][1] * y[j][1]) * w[k])
    })
}

/// A tensor with the disjoint rows property for `block_ranks`, with one
/// entry of one block perturbed so that proportionality fails. Returns the
/// tensor and the block ranks.
pub fn perturbed_disjoint_rows<F: Field>(
    block_ranks: &[usize],
    n: usize,
    p: usize,
    seed: u64,
) -> (Tensor3<F>, Vec<usize>) {
    let m: usize = block_ranks.iter().sum::<usize>() + 1;
    assert!(p >= 2 && n >= 2 && !block_ranks.is_empty(), "need p, n >= 2");
    let mut g = Gen::new(seed, DEFAULT_ENTRY_BOUND);
    // blocks with at least two nonzero entries and w without zeros, so a
    // single-entry change can never stay proportional
    let blocks: Vec<IntMatrix> = block_ranks
        .iter()
        .map(|&d| loop {
            let b = g.matrix(d, n);
            if b.iter().flatten().filter(|&&x| x != 0).count() >= 2 {
                break b;
            }
        })
        .collect();
    let ws: Vec<Vec<i64>> = loop {
        let ws = g.pairwise_independent(block_ranks.len(), p);
        if ws.iter().flatten().all(|&x| x != 0) {
            break ws;
        }
    };
    let mut row_owner = Vec::new();
    for (l, &d) in block_ranks.iter().enumerate() {
        row_owner.extend((0..d).map(|r| Some((l, r))));
    }
    row_owner.push(None);
    let target_block = g.rng.random_range(0..block_ranks.len());
    let target_slice = g.rng.random_range(0..p);
    let target_row = g.rng.random_range(0..block_ranks[target_block]);
    let target_col = g.rng.random_range(0..n);
    let t = Tensor3::from_fn(m, n, p, |i, j, k| {
        let base = match row_owner[i] {
            Some((l, r)) => blocks[l][r][j] * ws[l][k],
            None => 0,
        };
        let bump = row_owner[i] == Some((target_block, target_row)) && j == target_col && k == target_slice;
        F::from_i64(base + i64::from(bump))
    });
    (t, block_ranks.to_vec())
}

/// Equality up to scaling and permutation of terms. Exact mode compares
/// canonical forms entry by entry and ignores `tol`; float mode matches
/// terms greedily by `|cos(w, w')|` and requires
/// `|M ⊗ w - M' ⊗ w'|_F <= tol |M ⊗ w|_F` for every matched pair.
pub fn equivalent<F: Field>(
    d1: &MatrixVectorDecomposition<F>,
    d2: &MatrixVectorDecomposition<F>,
    tol: f64,
) -> Result<bool, TensorError> {
    let shape = |d: &MatrixVectorDecomposition<F>| d.terms().first().map(|t| (t.matrix.shape(), t.w.len()));
    if let (Some(a), Some(b)) = (shape(d1), shape(d2)) {
        if a != b {
            return Err(TensorError::DimensionMismatch {
                expected: format!("{a:?}"),
                found: format!("{b:?}"),
            });
        }
    }
    if d1.len() != d2.len() {
        return Ok(false);
    }
    if F::is_exact() {
        return Ok(canonicalize(d1) == canonicalize(d2));
    }
    let f1 = d1.to_f64();
    let f2 = d2.to_f64();
    let mut used = vec![false; f2.len()];
    for t in f1.terms() {
        let best = f2
            .terms()
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, s)| (j, cosine(&t.w, &s.w)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = best else {
            return Ok(false);
        };
        used[j] = true;
        let s = &f2.terms()[j];
        let mut diff = 0.0;
        let mut norm = 0.0;
        for (a, b) in t.matrix.as_slice().iter().zip(s.matrix.as_slice()) {
            for (x, y) in t.w.iter().zip(&s.w) {
                diff += (a * x - b * y).powi(2);
                norm += (a * x).powi(2);
            }
        }
        if diff.sqrt() > tol * norm.sqrt() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).abs()
    }
}
