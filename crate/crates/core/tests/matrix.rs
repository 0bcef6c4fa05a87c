use nalgebra::DMatrix;
use proptest::prelude::*;
use rieszlab_core::matrix::{
    affine_normalize, antisymmetric_canonical_form, convex_decompose_symmetric, submatrix, symmetric_eigensystem,
    tensor_power, Classification, NamedMatrix, TransformMatrix,
};
use rieszlab_core::rng;

fn to_na(a: &TransformMatrix) -> DMatrix<f64> {
    let d = a.dim();
    DMatrix::from_row_slice(d, d, a.entries())
}

fn sorted_eigenvalues(a: &TransformMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

fn random_symmetric(d: usize, seed: u64) -> TransformMatrix {
    TransformMatrix::random_symmetric(d, &mut rng::stream(seed, 0))
}

#[test]
fn named_matrices() {
    let a_s = TransformMatrix::named(NamedMatrix::As).unwrap();
    assert_eq!(a_s.rows(), vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
    let j = TransformMatrix::named(NamedMatrix::J).unwrap();
    assert_eq!(j.rows(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
    assert_eq!(j.classification(), Classification::Antisymmetric);
    assert_eq!(a_s.classification(), Classification::Symmetric);
    let a3 = TransformMatrix::named(NamedMatrix::AsD(3)).unwrap();
    assert_eq!(a3.entries(), &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]);
    assert!(j.matmul(&j).max_abs_diff(&TransformMatrix::identity(2).scaled(-1.0)) == 0.0);
}

#[test]
fn eigenvalues_agree_with_an_independent_solver() {
    for d in 2..=6 {
        for seed in 0..10 {
            let a = random_symmetric(d, 100 * d as u64 + seed);
            let eig = symmetric_eigensystem(&a).unwrap();
            let oracle = sorted_eigenvalues(&a);
            for (x, y) in eig.values.iter().zip(&oracle) {
                assert!((x - y).abs() < 1e-12, "d={d}: {x} vs {y}");
            }
            // columns are eigenvectors
            for (k, &mu) in eig.values.iter().enumerate() {
                let u = eig.u.column(k);
                let au = a.apply(&u);
                assert!(au.iter().zip(&u).all(|(x, y)| (x - mu * y).abs() < 1e-11));
            }
        }
    }
}

#[test]
fn principal_submatrices_interlace() {
    let a = random_symmetric(5, 7);
    let full = sorted_eigenvalues(&a);
    let sub = submatrix(&a, &[0, 1, 3, 4]).unwrap();
    let part = symmetric_eigensystem(&sub).unwrap().values;
    for (k, mu) in part.iter().enumerate() {
        assert!(full[k + 1] - 1e-12 <= *mu && *mu <= full[k] + 1e-12);
    }
}

#[test]
fn submatrix_rejects_bad_indices() {
    let a = TransformMatrix::identity(3);
    assert!(submatrix(&a, &[]).is_err());
    assert!(submatrix(&a, &[0, 1, 2]).is_err());
    assert!(submatrix(&a, &[1, 0]).is_err());
    assert!(submatrix(&a, &[0, 3]).is_err());
}

#[test]
fn affine_normalization_of_a_diagonal() {
    let a = TransformMatrix::diag(&[3.0, 1.0, 2.0]);
    let n = affine_normalize(&a).unwrap();
    assert!((n.alpha - 1.0).abs() < 1e-15 && (n.beta + 2.0).abs() < 1e-15);
    assert!(n.b.max_abs_diff(&TransformMatrix::diag(&[1.0, -1.0, 0.0])) < 1e-15);
    assert!(affine_normalize(&TransformMatrix::identity(3).scaled(2.0)).is_err());
}

#[test]
fn tensor_power_is_block_diagonal() {
    let j = TransformMatrix::named(NamedMatrix::J).unwrap();
    let t = tensor_power(&j, 3).unwrap();
    assert_eq!(t.dim(), 6);
    for b in 0..3 {
        assert!(submatrix(&t, &[2 * b, 2 * b + 1]).unwrap().max_abs_diff(&j) == 0.0);
    }
    assert_eq!(t.get(0, 2), 0.0);
    assert!(tensor_power(&j, 0).is_err());
}

#[test]
fn canonical_form_of_a_known_antisymmetric_matrix() {
    // eigenvalues ±5i and 0
    let a = TransformMatrix::from_rows(&[[0.0, -3.0, 0.0], [3.0, 0.0, -4.0], [0.0, 4.0, 0.0]]).unwrap();
    let form = antisymmetric_canonical_form(&a).unwrap();
    assert!((form.blocks[0] - 5.0).abs() < 1e-13);
    assert!(form.zero_tail);
    let conj = form.u.transpose().matmul(&a).matmul(&form.u);
    assert!(conj.max_abs_diff(&form.block_matrix()) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn convex_weights_reconstruct_the_spectrum(seed in any::<u64>(), d in 2usize..=6) {
        let a = random_symmetric(d, seed);
        let b = affine_normalize(&a).unwrap().b;
        let dec = convex_decompose_symmetric(&b, -1.0, 1.0).unwrap();
        let total: f64 = dec.terms.iter().map(|(w, _)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(dec.terms.iter().all(|(w, s)| *w >= 0.0 && s.diagonal.iter().all(|x| x.abs() == 1.0)));
        let rebuilt = dec.u.matmul(&dec.combination()).matmul(&dec.u.transpose());
        prop_assert!(rebuilt.max_abs_diff(&b) < 1e-12);
        prop_assert!(dec.u.is_orthogonal(1e-12));
    }

    #[test]
    fn canonical_form_is_orthogonal_and_block_diagonal(seed in any::<u64>(), d in 2usize..=7) {
        let a = TransformMatrix::random_antisymmetric(d, &mut rng::stream(seed, 0));
        let form = antisymmetric_canonical_form(&a).unwrap();
        prop_assert!(form.u.is_orthogonal(1e-12));
        let conj = form.u.transpose().matmul(&a).matmul(&form.u);
        prop_assert!(conj.max_abs_diff(&form.block_matrix()) < 1e-10);
        prop_assert_eq!(form.zero_tail, d % 2 == 1);
        prop_assert!(form.blocks.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        // block scales are the singular values, each appearing twice
        let sv: Vec<f64> = to_na(&a).singular_values().iter().copied().collect();
        let mut sv = sv;
        sv.sort_by(|x, y| y.total_cmp(x));
        for (k, c) in form.blocks.iter().enumerate() {
            prop_assert!((c - sv[2 * k]).abs() < 1e-10);
        }
    }

    #[test]
    fn affine_normalization_hits_plus_minus_one(seed in any::<u64>(), d in 2usize..=6) {
        let a = random_symmetric(d, seed);
        let n = affine_normalize(&a).unwrap();
        let ev = sorted_eigenvalues(&n.b);
        prop_assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[d - 1] + 1.0).abs() < 1e-12);
        prop_assert!(n.alpha > 0.0);
    }

    #[test]
    fn inverse_and_determinant(seed in any::<u64>(), d in 1usize..=5) {
        let mut r = rng::stream(seed, 1);
        let q = TransformMatrix::random_orthogonal(d, &mut r);
        prop_assert!(q.is_orthogonal(1e-12));
        prop_assert!((q.det().abs() - 1.0).abs() < 1e-12);
        let a = q.plus(&TransformMatrix::identity(d).scaled(3.0));
        let det = to_na(&a).determinant();
        prop_assert!((a.det() - det).abs() < 1e-10 * det.abs().max(1.0));
        let prod = a.matmul(&a.inverse().unwrap());
        prop_assert!(prod.max_abs_diff(&TransformMatrix::identity(d)) < 1e-12);
    }
}
