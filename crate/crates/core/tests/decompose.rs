use mvdecomp::decomp::{
    compute_images, compute_images_float, decompose, decompose_detailed, disjoint_rows_decompose,
    DecompConfig, DecompError,
};
use mvdecomp::instancegen::{equivalent, gen_instance, perturbed_disjoint_rows, InstanceSpec};
use mvdecomp::linalg::{dot, image, principal_angle, rank, Matrix, Subspace, Tolerances};
use mvdecomp::scalar::{Field, Mode, Rational};
use mvdecomp::tensor::{canonicalize, reconstruct, MatrixVectorDecomposition, MatrixVectorTerm, Tensor3};

fn spec(m: usize, n: usize, p: usize, ranks: &[usize], seed: u64, mode: Mode) -> InstanceSpec {
    InstanceSpec::new(m, n, p, ranks.to_vec(), seed, mode)
}

fn qv(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_i64(x)).collect()
}

#[test]
fn zero_tensor_has_empty_decomposition() {
    let t = Tensor3::<Rational>::zeros(3, 2, 2);
    let d = decompose(&t, 0, &DecompConfig::default()).unwrap();
    assert!(d.is_empty());
    assert_eq!(d.rank(), 0);
}

#[test]
fn rank_one_tensor() {
    let u = qv(&[1, -2, 3]);
    let v = qv(&[2, 0, 1, 1]);
    let w = qv(&[1, 4]);
    let uv = Matrix::outer(&u, &v);
    let hidden = MatrixVectorDecomposition::new(vec![MatrixVectorTerm::new(uv.clone(), w)]).unwrap();
    let t = reconstruct(&hidden, 3, 4, 2).unwrap();
    let rec = compute_images(&t, 5, &DecompConfig::default()).unwrap();
    assert_eq!(rec.spectrum.images.len(), 1);
    assert!(rec.spectrum.images[0].same_as(&Subspace::span(&Matrix::column_vector(&u)), 0.0));

    let d = decompose(&t, 5, &DecompConfig::default()).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(rank(&d.terms()[0].matrix), 1);
    assert_eq!(canonicalize(&d), canonicalize(&hidden));
}

#[test]
fn two_term_images_match_hidden() {
    let (t, hidden) = gen_instance::<Rational>(&spec(5, 5, 3, &[1, 2], 21, Mode::Exact)).unwrap();
    let rec = compute_images(&t, 1, &DecompConfig::default()).unwrap();
    assert_eq!(rec.r(), 3);
    let mut dims = rec.image_dims();
    dims.sort();
    assert_eq!(dims, vec![1, 2]);
    for (lambda, img) in rec.spectrum.eigenvalues.iter().zip(&rec.spectrum.images) {
        let owner = hidden
            .terms()
            .iter()
            .find(|h| image(&h.matrix).same_as(img, 0.0))
            .expect("image matches a hidden image");
        let quotient = dot(&rec.pencil.a, &owner.w) / dot(&rec.pencil.b, &owner.w);
        assert_eq!(lambda, &quotient);
    }
}

#[test]
fn exact_pipeline_recovers_hidden_decomposition() {
    let config = DecompConfig::default();
    for seed in 0..20 {
        let ranks: &[usize] = [&[1, 2][..], &[2, 2, 1], &[1, 1, 1, 1], &[3, 1]][seed as usize % 4];
        let (t, hidden) = gen_instance::<Rational>(&spec(7, 8, 4, ranks, seed, Mode::Exact)).unwrap();
        let d = decompose(&t, 100 + seed, &config).unwrap();
        let (m, n, p) = t.dims();
        assert_eq!(reconstruct(&d, m, n, p).unwrap(), t);
        assert!(equivalent(&d, &hidden, 0.0).unwrap());
        assert_eq!(d.rank(), hidden.rank());
    }
}

#[test]
fn seeds_give_identical_canonical_forms() {
    let (t, _) = gen_instance::<Rational>(&spec(6, 6, 3, &[2, 1, 1], 8, Mode::Exact)).unwrap();
    let config = DecompConfig::default();
    let forms: Vec<_> = [1u64, 2, 3]
        .iter()
        .map(|&s| canonicalize(&decompose(&t, s, &config).unwrap()))
        .collect();
    assert_eq!(forms[0], forms[1]);
    assert_eq!(forms[1], forms[2]);
}

#[test]
fn float_pipeline() {
    let config = DecompConfig::default();
    for seed in 0..10 {
        let (t, hidden) = gen_instance::<f64>(&spec(8, 7, 4, &[2, 1, 3], seed, Mode::Float)).unwrap();
        let rec = compute_images_float(&t, seed, &config).unwrap();
        for img in &rec.spectrum.images {
            let best = hidden
                .terms()
                .iter()
                .map(|h| principal_angle(&image(&h.matrix), img, 1e-9))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "angle {best}");
        }
        let d = decompose(&t, seed, &config).unwrap();
        let (m, n, p) = t.dims();
        assert!(t.relative_residual(&reconstruct(&d, m, n, p).unwrap()).unwrap() < 1e-6);
        assert!(equivalent(&d, &hidden, 1e-6).unwrap());
    }
}

#[test]
fn float_route_rejects_exact_scalars() {
    let t = Tensor3::<Rational>::zeros(2, 2, 2);
    assert!(compute_images_float(&t, 0, &DecompConfig::default()).is_err());
}

#[test]
fn eigenspace_dimension_law() {
    let (t, hidden) = gen_instance::<Rational>(&spec(6, 7, 3, &[2, 1, 2], 4, Mode::Exact)).unwrap();
    let out = decompose_detailed(&t, 9, &DecompConfig::default()).unwrap();
    let rec = out.recovery.unwrap();
    let (_, n, _) = t.dims();
    assert_eq!(rec.spectrum.eigenvalues.len(), hidden.len());
    for (v, img) in rec.spectrum.eigenspaces.iter().zip(&rec.spectrum.images) {
        assert_eq!(v.dim(), n - rec.r() + img.dim());
    }
}

#[test]
fn perturbed_disjoint_rows_are_rejected() {
    for seed in 0..10 {
        let (t, blocks) = perturbed_disjoint_rows::<Rational>(&[1, 2], 4, 3, seed);
        assert!(matches!(
            disjoint_rows_decompose(&t, &blocks, &Tolerances::default()),
            Err(DecompError::NotDisjointRows(_))
        ));
    }
}

#[test]
fn rank_two_split_is_not_unique() {
    // M = u1 v1^T + u2 v2^T = u1 (v1 + v2)^T + (u2 - u1) v2^T
    let u1 = qv(&[1, 0, 2]);
    let u2 = qv(&[0, 1, -1]);
    let v1 = qv(&[3, 1]);
    let v2 = qv(&[-1, 2]);
    let m = Matrix::outer(&u1, &v1).add(&Matrix::outer(&u2, &v2)).unwrap();
    let v12: Vec<Rational> = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
    let u21: Vec<Rational> = u2.iter().zip(&u1).map(|(a, b)| a - b).collect();
    let alt = Matrix::outer(&u1, &v12).add(&Matrix::outer(&u21, &v2)).unwrap();
    assert_eq!(alt, m);
    let _ = Field::to_f64(&m[(0, 0)]);
}
