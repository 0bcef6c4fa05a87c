//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one line per criterion. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test -p rieszlab-core --test acceptance -- 1 5 8`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rieszlab_core::config::{mc_pairs, tags};
use rieszlab_core::estimate::{
    grid_stability, headline_experiment, rotation_equality, sigma_n_experiment, HeadlineConfig, SigmaNConfig,
};
use rieszlab_core::martingale::{
    blockwise_rotation_covariance, gaussian_block_ratio, lemma_ii_transport, lemma_iii_embed, lemma_iv_augment,
    umd_lower_bound_search, wp_transform_ratio, GaussEval, GaussianBlockInstance, SearchConfig, SearchStrategy,
    TransformCoefficients, WalshPaleyInstance,
};
use rieszlab_core::matrix::{
    affine_normalize, antisymmetric_canonical_form, convex_decompose_symmetric, submatrix, tensor_power, NamedMatrix,
    TransformMatrix,
};
use rieszlab_core::multiplier::{GridFunction, Multiplier, NamedMultiplier};
use rieszlab_core::spectral::{
    even_decompose, even_reconstruct_pointwise, lambda_k, rotations_decompose_odd_2d, rotations_reconstruct,
    CircleFunction, EvenQuadrature, RotationRule,
};
use rieszlab_core::stochastic::{deterministic_bilinear, mc_bilinear_pairs, u_a_operator, BilinearMode, MCConfig};
use rieszlab_core::{rng, Exec, Result};

const SEED: u64 = 0;

/// Best ratio of the exhaustive depth-3 quantized search at p = 4, recorded
/// from a reference run. It equals √2 to the last bit.
const UMD_DEPTH3_P4_BITS: u64 = 0x3ff6_a09e_667f_3bcd;

struct Outcome {
    pass: bool,
    summary: String,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
        }
    }
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Result<Outcome>,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn multiplier(which: NamedMultiplier) -> Multiplier {
    Multiplier::named(&which).expect("named multiplier")
}

fn matrix(which: NamedMatrix) -> TransformMatrix {
    TransformMatrix::named(which).expect("named matrix")
}

/// Mean of f·conj(g) over the grid (normalized measure).
fn inner(f: &GridFunction, g: &GridFunction) -> f64 {
    let s: Complex64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).sum();
    s.re / f.points() as f64
}

fn c1_identities() -> Result<Outcome> {
    let n = 64;
    let hilbert = multiplier(NamedMultiplier::Hilbert1d);
    let mut worst_h: f64 = 0.0;
    for k in 1..n / 2 {
        let kf = k as f64;
        let f = GridFunction::from_fn(1, n, |t| (kf * t[0]).sin())?;
        let expect = GridFunction::from_fn(1, n, |t| -(kf * t[0]).cos())?;
        worst_h = worst_h.max(hilbert.apply(&f)?.max_abs_diff(&expect));
    }
    let one = GridFunction::from_fn(1, n, |_| 1.0)?;
    let h_one = hilbert.apply(&one)?.values().iter().map(|v| v.norm()).fold(0.0, f64::max);

    let re_ba = multiplier(NamedMultiplier::BaReal);
    let r1 = multiplier(NamedMultiplier::Riesz { k: 1, d: 2 });
    let r2 = multiplier(NamedMultiplier::Riesz { k: 2, d: 2 });
    let mut r = rng::stream(SEED, 1);
    let mut worst_ba: f64 = 0.0;
    let mut worst_riesz: f64 = 0.0;
    for _ in 0..10 {
        // both sides agree off the zero mode, where Re(BA) takes its
        // sphere average 0 and −Id keeps the mean
        let f = GridFunction::random_trig(2, n, 20, true, &mut r)?;
        let lhs = re_ba.apply(&f)?;
        // −f − 2R₁²f
        let mut rhs = r1.apply(&r1.apply(&f)?)?;
        rhs.scale(-2.0);
        rhs.axpy(-1.0, &f)?;
        worst_ba = worst_ba.max(lhs.max_abs_diff(&rhs));

        let g = GridFunction::random_trig(2, n, 20, true, &mut r)?;
        let mut sum = r1.apply(&r1.apply(&g)?)?;
        sum.axpy(1.0, &r2.apply(&r2.apply(&g)?)?)?;
        sum.scale(-1.0);
        worst_riesz = worst_riesz.max(sum.max_abs_diff(&g));
    }
    let tol = 1e-12;
    let pass = worst_h <= tol && h_one <= tol && worst_ba <= tol && worst_riesz <= tol;
    Ok(Outcome::new(
        pass,
        format!(
            "H sin = -cos {worst_h:.1e}, H1 {h_one:.1e}, Re(BA) = -Id-2R1^2 {worst_ba:.1e}, -R1^2-R2^2 = Id {worst_riesz:.1e} (tol 1e-12)"
        ),
    ))
}

fn c2_rotation_equality() -> Result<Outcome> {
    let seed = rng::derive_seed(SEED, tags::ROTATION);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [2.0, 4.0] {
        let eq = rotation_equality(p, 64, 50, 300, seed, Exec::default())?;
        pass &= eq.difference <= 1e-3;
        parts.push(format!(
            "p={p}: Re {:.6} Im {:.6} diff {:.1e} (direct {:.6}/{:.6})",
            eq.re_estimate, eq.im_estimate, eq.difference, eq.re_direct, eq.im_direct
        ));
    }
    Ok(Outcome::new(pass, format!("{} (tol 1e-3)", parts.join("; "))))
}

fn c3_headline() -> Result<Outcome> {
    let cfg = HeadlineConfig {
        ps: vec![2.0, 3.0, 4.0],
        ns: vec![64],
        restarts: 50,
        iters: 300,
        seed: rng::derive_seed(SEED, tags::HEADLINE),
        duality: true,
    };
    let table = headline_experiment(&cfg, Exec::default())?;
    let capped = table.rows.iter().all(|r| r.within_cap);
    let p2 = table.row(2.0, 64).map_or(f64::NAN, |r| r.ratio);
    let p3 = table.row(3.0, 64).map_or(f64::NAN, |r| r.ratio);
    let p4 = table.row(4.0, 64).map_or(f64::NAN, |r| r.ratio);
    let pass = capped && (p2 - 1.0).abs() <= 1e-6 && p4 > 1.2;
    let duality: Vec<String> = table
        .duality
        .iter()
        .map(|d| format!("p={}/p'={:.4}: diff {:.3}", d.p, d.p_dual, d.difference))
        .collect();
    Ok(Outcome::new(
        pass,
        format!(
            "N=64: p=2 {p2:.9}, p=3 {p3:.6} (cap 2), p=4 {p4:.6} (cap 3, need > 1.2); all within cap: {capped}; duality finding {}",
            duality.join(", ")
        ),
    ))
}

fn c4_bilinear_chain() -> Result<Outcome> {
    let pairs = mc_pairs(SEED, 3, 8, 1)?;
    let mats = [
        ("I", TransformMatrix::identity(2)),
        ("A_s", matrix(NamedMatrix::As)),
        ("J", matrix(NamedMatrix::J)),
    ];
    let mut exact_err: f64 = 0.0;
    let mut quad_err: f64 = 0.0;
    let mut exact = vec![vec![0.0; mats.len()]; pairs.len()];
    for (q, (f, g)) in pairs.iter().enumerate() {
        let scale = inner(f, f).sqrt() * inner(g, g).sqrt();
        for (j, (_, a)) in mats.iter().enumerate() {
            let s = deterministic_bilinear(a, f, g, BilinearMode::SpectralExact)?;
            let direct = inner(&u_a_operator(a, f)?, g);
            exact_err = exact_err.max((s - direct).abs() / scale);
            let t = deterministic_bilinear(a, f, g, BilinearMode::TimeQuadrature { t_cut: 40.0, nodes: 20 })?;
            quad_err = quad_err.max((t - s).abs() / s.abs().max(scale));
            exact[q][j] = s;
        }
    }
    let cfg = MCConfig::new(200_000, 1e-3, 20.0, rng::derive_seed(SEED, tags::MC))?;
    let refs: Vec<(&GridFunction, &GridFunction)> = pairs.iter().map(|(f, g)| (f, g)).collect();
    let matrices: Vec<TransformMatrix> = mats.iter().map(|(_, a)| a.clone()).collect();
    let est = mc_bilinear_pairs(&matrices, &refs, &cfg, Exec::default())?;
    let mut mc_ok = true;
    let mut worst_z: f64 = 0.0;
    let mut lines = Vec::new();
    for (q, row) in est.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let det = exact[q][j];
            let diff = (e.estimate - det).abs();
            let ok = diff <= (3.0 * e.stderr).max(0.02 * det.abs());
            mc_ok &= ok;
            worst_z = worst_z.max(diff / e.stderr);
            if !ok {
                lines.push(format!("pair {q} {}: {:.5} vs {:.5} ± {:.1e}", mats[j].0, e.estimate, det, e.stderr));
            }
        }
    }
    let pass = exact_err <= 1e-12 && quad_err <= 1e-8 && mc_ok;
    let mut summary = format!(
        "spectral vs <U_A f,g> {exact_err:.1e} (tol 1e-12), time quadrature {quad_err:.1e} (tol 1e-8), \
         MC 9 cells within max(3 se, 2%): {mc_ok}, worst |z| {worst_z:.2}"
    );
    if !lines.is_empty() {
        summary.push_str(&format!("; misses: {}", lines.join(", ")));
    }
    Ok(Outcome::new(pass, summary))
}

fn random_scalar_instance<R: Rng>(depth: usize, r: &mut R) -> Result<WalshPaleyInstance> {
    let tables = (0..depth)
        .map(|k| (0..1usize << k).map(|_| r.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    WalshPaleyInstance::scalar(tables)
}

fn c5_martingale_exactness() -> Result<Outcome> {
    let mut r = rng::stream(SEED, 5);
    let mut rigid: f64 = 0.0;
    for _ in 0..100 {
        let inst = random_scalar_instance(2, &mut r)?;
        for bits in 0..4 {
            for p in [1.5, 3.0, 4.0] {
                let t = wp_transform_ratio(&inst, &TransformCoefficients::vertex(2, bits), p, None, Exec::Sequential)?;
                rigid = rigid.max((t.ratio - 1.0).abs());
            }
        }
    }
    let mut iso: f64 = 0.0;
    for depth in 1..=6 {
        for _ in 0..20 {
            let inst = random_scalar_instance(depth, &mut r)?;
            for bits in 0..1usize << depth {
                let t = wp_transform_ratio(&inst, &TransformCoefficients::vertex(depth, bits), 2.0, None, Exec::Sequential)?;
                iso = iso.max((t.ratio - 1.0).abs());
            }
        }
    }
    let tol = 1e-12;
    Ok(Outcome::new(
        rigid <= tol && iso <= tol,
        format!("depth-2 rigidity max |ratio-1| {rigid:.1e}, p=2 isometry (depth 1..6) {iso:.1e} (tol 1e-12)"),
    ))
}

fn c6_umd_regression() -> Result<Outcome> {
    let mut cfg = SearchConfig::new(3, 4.0, SearchStrategy::ExhaustiveSmall);
    cfg.seed = rng::derive_seed(SEED, tags::UMD);
    let par = umd_lower_bound_search(&cfg, Exec::Parallel)?;
    let seq = umd_lower_bound_search(&cfg, Exec::Sequential)?;
    let best = par.best_ratio;
    let pass = best > 1.0
        && best <= 3.0
        && best.to_bits() == UMD_DEPTH3_P4_BITS
        && seq.best_ratio.to_bits() == best.to_bits();
    Ok(Outcome::new(
        pass,
        format!(
            "best {best:.16} ({:#x}, recorded {UMD_DEPTH3_P4_BITS:#x}), sequential {:#x}",
            best.to_bits(),
            seq.best_ratio.to_bits()
        ),
    ))
}

fn fixtures() -> Result<Vec<GaussianBlockInstance>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let mut out = vec![GaussianBlockInstance::fixture()];
    for name in ["gaussian_vector.json", "gaussian_scalar_deep.json"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}"))?;
        out.push(serde_json::from_str(&text)?);
    }
    Ok(out)
}

fn c7_gaussian_transports() -> Result<Outcome> {
    let quad = GaussEval::Quadrature { nodes_per_axis: None };
    let ratio = |inst: &GaussianBlockInstance, a: &TransformMatrix, p: f64| -> Result<f64> {
        Ok(gaussian_block_ratio(inst, a, p, quad, None, Exec::default())?.best_ratio)
    };
    let mut r = rng::stream(SEED, 7);
    let mut worst: f64 = 0.0;
    for inst in fixtures()? {
        let matrices = [
            matrix(NamedMatrix::As),
            matrix(NamedMatrix::J),
            TransformMatrix::random_symmetric(2, &mut r),
        ];
        for a in &matrices {
            // even p: tensor Gauss–Hermite is exact, so any change is the
            // transport's, not the rule's
            for p in [2.0, 4.0, 6.0] {
                let u = TransformMatrix::random_orthogonal(2, &mut r);
                let moved = lemma_ii_transport(&inst, &u)?;
                let conj = u.transpose().matmul(a).matmul(&u);
                worst = worst.max((ratio(&moved, a, p)? - ratio(&inst, &conj, p)?).abs());

                let embedded = lemma_iii_embed(&inst, 2)?;
                worst = worst.max((ratio(&embedded, &tensor_power(a, 2)?, p)? - ratio(&inst, a, p)?).abs());

                // C on three coordinates with B on {0, 2}; rows 0 and 2 vanish
                // in column 1.
                let c = TransformMatrix::from_rows(&[
                    [a.get(0, 0), 0.0, a.get(0, 1)],
                    [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)],
                    [a.get(1, 0), 0.0, a.get(1, 1)],
                ])?;
                let b = submatrix(&c, &[0, 2])?;
                let lifted = lemma_iv_augment(&inst, &b, &c, &[0, 2])?;
                worst = worst.max((ratio(&lifted, &c, p)? - ratio(&inst, &b, p)?).abs());
            }
        }
    }
    let u = TransformMatrix::random_orthogonal(2, &mut r);
    let cov = blockwise_rotation_covariance(&u, 2, 100_000, rng::derive_seed(SEED, 7))?;
    let pass = worst <= 1e-10 && cov.within_three_stderr;
    Ok(Outcome::new(
        pass,
        format!(
            "orthogonal, tensor and submatrix transports max ratio change {worst:.1e} (tol 1e-10), rotated covariance max |z| {:.2} at 1e5 samples (tol 3)",
            cov.max_z
        ),
    ))
}

/// Power sums tr((AᵀA)^j) = 2Σ c_k^{2j} determine the block scales.
fn power_sum_mismatch(a: &TransformMatrix, blocks: &[f64]) -> f64 {
    let ata = a.transpose().matmul(a);
    let mut pow = TransformMatrix::identity(a.dim());
    let mut worst: f64 = 0.0;
    for j in 1..=a.dim().div_ceil(2) {
        pow = pow.matmul(&ata);
        let trace: f64 = (0..a.dim()).map(|i| pow.get(i, i)).sum();
        let from_blocks: f64 = 2.0 * blocks.iter().map(|c| c.powi(2 * j as i32)).sum::<f64>();
        worst = worst.max((trace - from_blocks).abs() / trace.abs().max(1.0));
    }
    worst
}

fn c8_matrix_decompositions() -> Result<Outcome> {
    let mut r = rng::stream(SEED, 8);
    let mut convex: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut block: f64 = 0.0;
    let mut spectrum: f64 = 0.0;
    let mut tails_ok = true;
    for i in 0..100 {
        let d = 2 + i % 5;
        let b = affine_normalize(&TransformMatrix::random_symmetric(d, &mut r))?.b;
        let dec = convex_decompose_symmetric(&b, -1.0, 1.0)?;
        let back = dec.u.matmul(&dec.combination()).matmul(&dec.u.transpose());
        convex = convex.max(back.max_abs_diff(&b));
        let wsum: f64 = dec.terms.iter().map(|(w, _)| w).sum();
        convex = convex.max((wsum - 1.0).abs());

        let a = TransformMatrix::random_antisymmetric(d, &mut r);
        let form = antisymmetric_canonical_form(&a)?;
        let ut = form.u.transpose();
        orth = orth.max(ut.matmul(&form.u).max_abs_diff(&TransformMatrix::identity(d)));
        block = block.max(ut.matmul(&a).matmul(&form.u).max_abs_diff(&form.block_matrix()));
        spectrum = spectrum.max(power_sum_mismatch(&a, &form.blocks));
        tails_ok &= form.zero_tail == (d % 2 == 1);
    }
    let pass = convex <= 1e-12 && orth <= 1e-12 && block <= 1e-10 && spectrum <= 1e-10 && tails_ok;
    Ok(Outcome::new(
        pass,
        format!(
            "convex reconstruction {convex:.1e} (tol 1e-12), U orthogonality {orth:.1e}, block residual {block:.1e}, \
             spectrum {spectrum:.1e} (tol 1e-10), odd-d zero tails {tails_ok}"
        ),
    ))
}

/// λ_k k^{1+2ε} → c₀ 2^{−1−ε} Γ(1+2ε) in the plane, since near r = 1 the
/// integrand behaves like 2^{−1−ε}(1−r)^{2ε} r^k.
fn lambda_limit(eps: f64) -> f64 {
    // c₀ = 4π in the plane
    4.0 * PI * 2f64.powf(-1.0 - eps) * gamma(1.0 + 2.0 * eps)
}

fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

fn c9_even_round_trip() -> Result<Outcome> {
    let m0 = multiplier(NamedMultiplier::M0 { d: 2 });
    let mut r = rng::stream(SEED, 9);
    let mut worst: f64 = 0.0;
    let mut window = (f64::INFINITY, 0.0f64);
    for eps in [0.25, 0.5, 1.0] {
        let dec = even_decompose(&m0, eps, 8)?;
        for _ in 0..32 {
            let phi = r.gen_range(-PI..PI);
            let scale = r.gen_range(0.1..10.0);
            let xi = [scale * phi.cos(), scale * phi.sin()];
            let got = even_reconstruct_pointwise(&dec, &xi, EvenQuadrature::default())?;
            worst = worst.max((got - m0.eval(&xi).re).abs());
        }
        let limit = lambda_limit(eps);
        for k in (8..=64).step_by(2) {
            let v = lambda_k(k, eps, 2)? * (k as f64).powf(1.0 + 2.0 * eps) / limit;
            window = (window.0.min(v), window.1.max(v));
        }
    }
    let pass = worst <= 1e-3 && window.0 >= 0.5 && window.1 <= 2.0;
    Ok(Outcome::new(
        pass,
        format!(
            "max pointwise error {worst:.1e} over 3x32 directions (tol 1e-3); lambda_k k^(1+2e) / limit in [{:.3}, {:.3}] for k in 8..64 (window [0.5, 2])",
            window.0, window.1
        ),
    ))
}

fn random_odd_symbol<R: Rng>(degree: usize, r: &mut R) -> Result<Multiplier> {
    let mut c = CircleFunction::zero(degree);
    for n in (1..=degree as i64).step_by(2) {
        // m = i·h with h real and odd: c_{−n} = −conj(c_n).
        let v = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) / n as f64;
        c.set_coeff(n, v)?;
        c.set_coeff(-n, -v.conj())?;
    }
    c.to_multiplier("random_odd")
}

fn c10_rotations_round_trip() -> Result<Outcome> {
    let mut r = rng::stream(SEED, 10);
    let mut symbols = vec![("R1".to_string(), multiplier(NamedMultiplier::Riesz { k: 1, d: 2 }))];
    for (i, degree) in [3, 5, 7].into_iter().enumerate() {
        symbols.push((format!("odd{i}(deg {degree})"), random_odd_symbol(degree, &mut r)?));
    }
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, m) in &symbols {
        let omega = rotations_decompose_odd_2d(m, 15)?;
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let f = GridFunction::random_trig(2, 64, 24, true, &mut r)?;
            let got = rotations_reconstruct(&omega, &f, 512, RotationRule::ProductTrapezoid)?;
            worst = worst.max(got.max_abs_diff(&m.apply(&f)?));
        }
        pass &= worst <= 1e-6;
        parts.push(format!("{name} {worst:.1e}"));
    }
    Ok(Outcome::new(pass, format!("{} (tol 1e-6, N=64, 512 directions)", parts.join(", "))))
}

fn c11_grid_stability() -> Result<Outcome> {
    let cfg = HeadlineConfig {
        ps: vec![2.0, 3.0, 4.0],
        ns: vec![32, 64, 128],
        restarts: 50,
        iters: 300,
        seed: rng::derive_seed(SEED, tags::HEADLINE),
        duality: false,
    };
    let table = headline_experiment(&cfg, Exec::default())?;
    let stab = grid_stability(&table, 0.02);
    let pass = stab.iter().all(|s| s.nondecreasing);
    let parts: Vec<String> = stab
        .iter()
        .map(|s| {
            let ratios: Vec<String> = s.ratios.iter().map(|x| format!("{x:.4}")).collect();
            format!("p={}: {}", s.p, ratios.join(" -> "))
        })
        .collect();
    Ok(Outcome::new(pass, format!("N=32,64,128: {} (band 0.02)", parts.join("; "))))
}

fn c12_sigma_n() -> Result<Outcome> {
    let cfg = SigmaNConfig {
        seed: rng::derive_seed(SEED, tags::SIGMA_N),
        ..SigmaNConfig::default()
    };
    let table = match sigma_n_experiment(&cfg, Exec::default()) {
        Ok(t) => t,
        Err(rieszlab_core::Error::Assertion(msg)) => return Ok(Outcome::new(false, msg)),
        Err(e) => return Err(e),
    };
    let ratios: Vec<String> = table.rows.iter().map(|r| format!("{}:{:.4}", r.n, r.ratio)).collect();
    let nondecreasing = table.rows.windows(2).all(|w| w[1].ratio >= w[0].ratio - 1e-9);
    Ok(Outcome::new(
        nondecreasing,
        format!(
            "{}; log fit a={:.4} b={:.4} r^2={:.3}",
            ratios.join(" "),
            table.fit.a,
            table.fit.b,
            table.fit.r_squared
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "multiplier identities", budget: secs(5), run: c1_identities },
        Criterion { id: 2, name: "rotation equality", budget: mins(5), run: c2_rotation_equality },
        Criterion { id: 3, name: "headline one-sided", budget: mins(15), run: c3_headline },
        Criterion { id: 4, name: "bilinear chain", budget: mins(20), run: c4_bilinear_chain },
        Criterion { id: 5, name: "martingale exactness", budget: mins(1), run: c5_martingale_exactness },
        Criterion { id: 6, name: "UMD regression", budget: mins(10), run: c6_umd_regression },
        Criterion { id: 7, name: "Gaussian transports", budget: mins(5), run: c7_gaussian_transports },
        Criterion { id: 8, name: "matrix decompositions", budget: mins(1), run: c8_matrix_decompositions },
        Criterion { id: 9, name: "even round trip", budget: mins(2), run: c9_even_round_trip },
        Criterion { id: 10, name: "rotations round trip", budget: mins(2), run: c10_rotations_round_trip },
        Criterion { id: 11, name: "grid stability", budget: mins(10), run: c11_grid_stability },
        Criterion { id: 12, name: "sigma_n growth", budget: mins(15), run: c12_sigma_n },
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    let mut ran = 0;
    for c in criteria.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let started = Instant::now();
        let result = (c.run)();
        let elapsed = started.elapsed();
        let in_time = elapsed <= c.budget;
        let (pass, summary) = match result {
            Ok(o) => (o.pass && in_time, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        ran += 1;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} [{:.1}s of {}s] {}",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            summary
        );
    }
    println!("acceptance: {}/{} passed", ran - failures, ran);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
