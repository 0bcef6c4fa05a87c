use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use rieszlab_core::martingale::{
    clt_block_average, gaussian_block_ratio, summation_operator, umd_lower_bound_search, verify_extreme_point,
    wp_transform_ratio, GaussEval, GaussianBlockInstance, Poly, SearchConfig, SearchStrategy, TransformCoefficients,
    WalshPaleyInstance,
};
use rieszlab_core::matrix::{NamedMatrix, TransformMatrix};
use rieszlab_core::multiplier::p_star;
use rieszlab_core::{rng, Exec};

/// Walks every sign sequence directly: f_n = Σ ε_k d_k(ε_1..ε_{k−1}).
fn oracle_ratio(flat: &[f64], depth: usize, alpha: &[f64], p: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for atom in 0..1usize << depth {
        let eps = |k: usize| if atom >> k & 1 == 1 { 1.0 } else { -1.0 };
        let (mut f, mut g) = (0.0, 0.0);
        for k in 0..depth {
            let mut prefix = 0;
            for i in 0..k {
                if eps(i) > 0.0 {
                    prefix |= 1 << i;
                }
            }
            let d = flat[(1 << k) - 1 + prefix];
            f += eps(k) * d;
            g += alpha[k] * eps(k) * d;
        }
        num += g.abs().powf(p);
        den += f.abs().powf(p);
    }
    (num / den).powf(1.0 / p)
}

fn random_flat(depth: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 0);
    (0..(1 << depth) - 1).map(|_| r.gen_range(-2.0..2.0)).collect()
}

#[test]
fn enumeration_matches_a_direct_walk() {
    for seed in 0..20 {
        let depth = 1 + (seed as usize % 5);
        let flat = random_flat(depth, seed);
        let mut r = rng::stream(seed, 1);
        let alpha: Vec<f64> = (0..depth).map(|_| r.gen_range(-1.0..1.0)).collect();
        let inst = WalshPaleyInstance::from_flat_scalar(depth, &flat).unwrap();
        for p in [1.5, 3.0] {
            let got = wp_transform_ratio(&inst, &TransformCoefficients::new(alpha.clone()).unwrap(), p, None, Exec::Sequential)
                .unwrap()
                .ratio;
            let want = oracle_ratio(&flat, depth, &alpha, p);
            assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
        }
    }
}

#[test]
fn coefficients_outside_the_unit_interval_are_rejected() {
    assert!(TransformCoefficients::new(vec![0.5, 1.5]).is_err());
    assert!(TransformCoefficients::new(vec![f64::NAN]).is_err());
}

#[test]
fn instances_validate_their_shape() {
    assert!(WalshPaleyInstance::scalar(vec![vec![1.0], vec![1.0]]).is_err());
    assert!(WalshPaleyInstance::scalar(vec![vec![0.0], vec![0.0, 0.0]]).is_err());
    assert!(WalshPaleyInstance::from_flat_scalar(2, &[1.0, 2.0]).is_err());
    let inst: WalshPaleyInstance = serde_json::from_str(r#"{"value_dim": 1, "tables": [[[1.0]], [[0.5], [-0.5]]]}"#).unwrap();
    assert_eq!(inst.depth(), 2);
}

#[test]
fn depth_one_search_is_trivial() {
    let report = umd_lower_bound_search(&SearchConfig::new(1, 4.0, SearchStrategy::ExhaustiveSmall), Exec::Sequential).unwrap();
    assert!((report.best_ratio - 1.0).abs() < 1e-12);
}

#[test]
fn searches_respect_the_cap_and_grow_with_depth() {
    let mut prev = 0.0;
    for depth in 1..=3 {
        let cfg = SearchConfig::new(depth, 4.0, SearchStrategy::ExhaustiveSmall);
        let r = umd_lower_bound_search(&cfg, Exec::Parallel).unwrap();
        assert!(r.best_ratio >= prev - 1e-12 && r.best_ratio <= p_star(4.0) - 1.0 + 1e-9);
        prev = r.best_ratio;
    }
    for strategy in [SearchStrategy::RandomRestart, SearchStrategy::GreedyCoordinate] {
        let mut cfg = SearchConfig::new(4, 3.0, strategy);
        cfg.budget = 2000;
        cfg.seed = 5;
        let r = umd_lower_bound_search(&cfg, Exec::Sequential).unwrap();
        assert!(r.best_ratio >= 1.0 - 1e-12 && r.best_ratio <= 2.0 + 1e-9, "{strategy:?}: {}", r.best_ratio);
        assert!(r.trace.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn extreme_points_dominate_the_interior() {
    let inst = WalshPaleyInstance::from_flat_scalar(3, &random_flat(3, 9)).unwrap();
    let check = verify_extreme_point(&inst, 3.0, 5, Exec::Sequential).unwrap();
    assert!(check.holds && check.grid_max <= check.vertex_max + 1e-12);
}

#[test]
fn summation_operator_from_l1() {
    for n in [1, 4, 16] {
        let s = summation_operator(n).unwrap();
        assert_eq!(s.norm_from_l1().unwrap(), 1.0);
        let x: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        let partial = s.apply(&x);
        assert_eq!(partial[n - 1], (n * (n + 1) / 2) as f64);
    }
    assert!(summation_operator(0).is_err());
}

#[test]
fn block_sums_look_gaussian() {
    let r = clt_block_average(64, 20_000, 3, Exec::Parallel).unwrap();
    assert!(r.distance_from_identity < 0.05, "{}", r.distance_from_identity);
    assert!((r.kurtosis_s - 3.0).abs() < 0.15, "{}", r.kurtosis_s);
}

#[test]
fn polynomial_json_and_arithmetic() {
    let p: Poly = serde_json::from_str(r#"[{"coeff": 2.0, "exponents": [[0, 1], [2, 2]]}, {"coeff": -1.0}]"#).unwrap();
    assert_eq!(p.degree(), 3);
    assert_eq!(p.variables(), vec![0, 2]);
    assert_eq!(p.eval(&[3.0, 9.0, 2.0]), 23.0);
    let back: Poly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
    let sq = p.mul(&p);
    assert_eq!(sq.eval(&[3.0, 9.0, 2.0]), 529.0);
    assert_eq!(p.pow(2), sq);
    assert!(p.add(&p.scale(-1.0)).is_zero());
    assert!(serde_json::from_str::<Poly>(r#"[{"coeff": 1e999}]"#).is_err());
}

#[test]
fn gaussian_coefficients_must_be_predictable() {
    // the first block's coefficients may not depend on φ_0
    let bad = GaussianBlockInstance::new(2, 2, 1, vec![vec![Poly::var(0)], vec![Poly::zero()], vec![Poly::zero()], vec![Poly::zero()]]);
    assert!(bad.is_err());
}

#[test]
fn gaussian_quadrature_against_sampling() {
    // independent sampling of the fixture at p = 4 with A = J
    let inst = GaussianBlockInstance::fixture();
    let j = TransformMatrix::named(NamedMatrix::J).unwrap();
    let exact = gaussian_block_ratio(&inst, &j, 4.0, GaussEval::Quadrature { nodes_per_axis: None }, None, Exec::Sequential)
        .unwrap()
        .best_ratio;
    let mut r = rng::stream(17, 0);
    let (mut num, mut den) = (0.0, 0.0);
    let n = 400_000;
    for _ in 0..n {
        let phi: Vec<f64> = (0..4).map(|_| r.sample(StandardNormal)).collect();
        let d: Vec<f64> = inst.coeffs().iter().map(|c| c[0].eval(&phi)).collect();
        let plain: f64 = d.iter().zip(&phi).map(|(a, b)| a * b).sum();
        // J φ_b = (−φ_{b,2}, φ_{b,1})
        let turned = d[0] * -phi[1] + d[1] * phi[0] + d[2] * -phi[3] + d[3] * phi[2];
        num += turned.powi(4);
        den += plain.powi(4);
    }
    let sampled = (num / den).powf(0.25);
    assert!((exact - sampled).abs() < 0.03 * exact, "{exact} vs {sampled}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sign_transforms_are_isometries_at_two(seed in any::<u64>(), depth in 1usize..=6, bits in any::<usize>()) {
        let inst = WalshPaleyInstance::from_flat_scalar(depth, &random_flat(depth, seed)).unwrap();
        let alpha = TransformCoefficients::vertex(depth, bits % (1 << depth));
        let r = wp_transform_ratio(&inst, &alpha, 2.0, None, Exec::Sequential).unwrap();
        prop_assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratios_stay_below_the_cap(seed in any::<u64>(), depth in 1usize..=6, p in 1.2f64..6.0, bits in any::<usize>()) {
        let inst = WalshPaleyInstance::from_flat_scalar(depth, &random_flat(depth, seed)).unwrap();
        let alpha = TransformCoefficients::vertex(depth, bits % (1 << depth));
        let r = wp_transform_ratio(&inst, &alpha, p, None, Exec::Sequential).unwrap();
        prop_assert!(r.ratio <= p_star(p) - 1.0 + 1e-9);
    }

    #[test]
    fn a_trailing_zero_level_changes_nothing(seed in any::<u64>(), depth in 1usize..=5, p in 1.2f64..6.0) {
        let inst = WalshPaleyInstance::from_flat_scalar(depth, &random_flat(depth, seed)).unwrap();
        let mut r = rng::stream(seed, 3);
        let alpha: Vec<f64> = (0..depth).map(|_| r.gen_range(-1.0..1.0)).collect();
        let a = wp_transform_ratio(&inst, &TransformCoefficients::new(alpha.clone()).unwrap(), p, None, Exec::Sequential).unwrap();
        let mut longer = alpha;
        longer.push(1.0);
        let b = wp_transform_ratio(&inst.extended().unwrap(), &TransformCoefficients::new(longer).unwrap(), p, None, Exec::Sequential).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_block_maps_preserve_the_second_moment(angle in -3.0f64..3.0) {
        let inst = GaussianBlockInstance::fixture();
        let q = TransformMatrix::rotation(angle);
        let r = gaussian_block_ratio(&inst, &q, 2.0, GaussEval::Quadrature { nodes_per_axis: None }, None, Exec::Sequential).unwrap();
        prop_assert!((r.best_ratio - 1.0).abs() < 1e-12);
    }
}
