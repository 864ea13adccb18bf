//! Fixed instances shared by the benchmarks in `benches/`.

use mvdecomp::instancegen::{gen_instance, gen_minrank_basis, InstanceSpec};
use mvdecomp::linalg::Matrix;
use mvdecomp::{Field, Mode, Tensor3};

/// A square `m x m x p` tensor with hidden terms of the given ranks.
pub fn tensor<F: Field>(m: usize, p: usize, ranks: &[usize], mode: Mode) -> Tensor3<F> {
    let spec = InstanceSpec::new(m, m, p, ranks.to_vec(), 7, mode);
    gen_instance(&spec).expect("valid instance spec").0
}

pub fn basis<F: Field>(m: usize, ranks: &[usize], mode: Mode) -> Vec<Matrix<F>> {
    let spec = InstanceSpec::new(m, m, ranks.len(), ranks.to_vec(), 7, mode);
    gen_minrank_basis(&spec).expect("valid instance spec").0
}
