//! Gaussian block martingales and their A-transforms.
//!
//! Variables φ_0, φ_1, … are independent standard normals grouped into N
//! blocks of `order` consecutive variables. Coefficient j (zero-based) lives
//! in block j / order and may depend only on the variables of earlier blocks.
//! For a matrix A the transform pairs the coefficients of block b with Aφ_b
//! instead of φ_b.

use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::operator::OperatorMatrix;
use super::poly::Poly;
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::matrix::{submatrix, TransformMatrix};
use crate::multiplier::PointNorm;
use crate::quadrature;
use crate::report::EstimateReport;
use crate::rng;

pub const DEFAULT_MAX_DEGREE: u32 = 3;
/// Largest number of active variables evaluated by tensor quadrature.
pub const MAX_QUADRATURE_VARIABLES: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct GaussianBlockInstance {
    blocks: usize,
    order: usize,
    value_dim: usize,
    max_degree: u32,
    /// coeffs[j][c]: component c of coefficient j.
    coeffs: Vec<Vec<Poly>>,
}

#[derive(Deserialize)]
struct RawInstance {
    blocks: usize,
    order: usize,
    value_dim: usize,
    #[serde(default = "default_degree")]
    max_degree: u32,
    coeffs: Vec<Vec<Poly>>,
}

fn default_degree() -> u32 {
    DEFAULT_MAX_DEGREE
}

impl TryFrom<RawInstance> for GaussianBlockInstance {
    type Error = Error;

    fn try_from(r: RawInstance) -> Result<Self> {
        Self::with_degree_cap(r.blocks, r.order, r.value_dim, r.coeffs, r.max_degree)
    }
}

impl GaussianBlockInstance {
    pub fn new(blocks: usize, order: usize, value_dim: usize, coeffs: Vec<Vec<Poly>>) -> Result<Self> {
        Self::with_degree_cap(blocks, order, value_dim, coeffs, DEFAULT_MAX_DEGREE)
    }

    pub fn with_degree_cap(
        blocks: usize,
        order: usize,
        value_dim: usize,
        coeffs: Vec<Vec<Poly>>,
        max_degree: u32,
    ) -> Result<Self> {
        if blocks == 0 || order == 0 || value_dim == 0 {
            return Err(domain("instance", "blocks, order and value_dim must be positive"));
        }
        if coeffs.len() != blocks * order {
            return Err(Error::DimensionMismatch {
                expected: blocks * order,
                found: coeffs.len(),
            });
        }
        for (j, c) in coeffs.iter().enumerate() {
            if c.len() != value_dim {
                return Err(Error::DimensionMismatch {
                    expected: value_dim,
                    found: c.len(),
                });
            }
            let limit = (j / order) * order;
            for p in c {
                p.check_finite()?;
                if p.degree() > max_degree {
                    return Err(domain(
                        "coeffs",
                        format!("coefficient {j} has degree {} above the cap {max_degree}", p.degree()),
                    ));
                }
                if let Some(&v) = p.variables().iter().find(|&&v| v >= limit) {
                    return Err(domain(
                        "coeffs",
                        format!("coefficient {j} depends on φ_{v}, which is not from an earlier block"),
                    ));
                }
            }
        }
        Ok(Self {
            blocks,
            order,
            value_dim,
            max_degree,
            coeffs,
        })
    }

    /// Two blocks of order two with scalar polynomial coefficients; the
    /// repository's reference fixture.
    pub fn fixture() -> Self {
        let x = Poly::var;
        let coeffs = vec![
            vec![Poly::constant(1.0)],
            vec![Poly::constant(0.5)],
            vec![x(0).add(&x(1).pow(2).scale(0.5))],
            vec![Poly::constant(1.0).add(&x(0).mul(&x(1)).scale(-1.0))],
        ];
        Self::new(2, 2, 1, coeffs).expect("fixture is valid")
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn variables(&self) -> usize {
        self.blocks * self.order
    }

    pub fn coeffs(&self) -> &[Vec<Poly>] {
        &self.coeffs
    }

    fn check_matrix(&self, a: &TransformMatrix) -> Result<()> {
        if a.dim() != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// (transformed, plain) values at one Gaussian draw φ.
    pub fn pathwise(
        &self,
        a: &TransformMatrix,
        s: Option<&OperatorMatrix>,
        phi: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let d = self.order;
        let m = self.value_dim;
        let m_out = s.map_or(m, |op| op.rows);
        let mut num = vec![0.0; m_out];
        let mut den = vec![0.0; m];
        let mut dv = vec![0.0; m];
        let mut aphi = vec![0.0; d];
        let mut sd = vec![0.0; m_out];
        for b in 0..self.blocks {
            let block = &phi[b * d..(b + 1) * d];
            a.apply_into(block, &mut aphi);
            for l in 0..d {
                let j = b * d + l;
                for (c, v) in dv.iter_mut().enumerate() {
                    *v = self.coeffs[j][c].eval(phi);
                }
                for c in 0..m {
                    den[c] += dv[c] * block[l];
                }
                match s {
                    Some(op) => op.apply_into(&dv, &mut sd),
                    None => sd.copy_from_slice(&dv),
                }
                for c in 0..m_out {
                    num[c] += sd[c] * aphi[l];
                }
            }
        }
        (num, den)
    }

    /// Variables that can influence the transformed or plain sums.
    fn active_variables(&self, a: &TransformMatrix) -> Vec<usize> {
        let d = self.order;
        let mut active = vec![false; self.variables()];
        for (j, comps) in self.coeffs.iter().enumerate() {
            let nonzero = comps.iter().any(|p| !p.is_zero());
            for p in comps {
                for v in p.variables() {
                    active[v] = true;
                }
            }
            if nonzero {
                let (b, l) = (j / d, j % d);
                active[j] = true;
                for i in 0..d {
                    if a.get(l, i) != 0.0 {
                        active[b * d + i] = true;
                    }
                }
            }
        }
        (0..active.len()).filter(|&v| active[v]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GaussEval {
    /// Tensor Gauss–Hermite over the active variables. Without an explicit
    /// node count, even integer p uses the exact count for the polynomial
    /// degree and other p use 40 nodes (reduced to keep ≤ 2·10⁷ points).
    Quadrature { nodes_per_axis: Option<usize> },
    MonteCarlo { samples: usize, seed: u64 },
}

fn norm_pow(norm: PointNorm, v: &[f64], p: f64) -> f64 {
    if v.len() == 1 {
        v[0].abs().powf(p)
    } else {
        norm.eval(v).powf(p)
    }
}

/// ‖Σ S d_j ⟨Aφ_b, e_l⟩‖_p / ‖Σ d_j φ_j‖_p.
pub fn gaussian_block_ratio(
    inst: &GaussianBlockInstance,
    a: &TransformMatrix,
    p: f64,
    eval: GaussEval,
    s: Option<&OperatorMatrix>,
    exec: Exec,
) -> Result<EstimateReport> {
    let started = Instant::now();
    inst.check_matrix(a)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("p", format!("exponent {p} must lie in (1, ∞)")));
    }
    if let Some(op) = s {
        if op.cols != inst.value_dim {
            return Err(Error::DimensionMismatch {
                expected: inst.value_dim,
                found: op.cols,
            });
        }
    }
    let (in_norm, out_norm) = s.map_or((PointNorm::L2, PointNorm::L2), |op| (op.input_norm, op.output_norm));
    let vars = inst.variables();
    let mut report = EstimateReport::new("gaussian block transform ratio", p, 0);
    let (num, den, stderr, detail) = match eval {
        GaussEval::Quadrature { nodes_per_axis } => {
            let active = inst.active_variables(a);
            let k = active.len();
            if k > MAX_QUADRATURE_VARIABLES {
                return Err(domain(
                    "eval",
                    format!("{k} active Gaussian variables; quadrature supports at most {MAX_QUADRATURE_VARIABLES}"),
                ));
            }
            let degree = inst
                .coeffs
                .iter()
                .flatten()
                .map(Poly::degree)
                .max()
                .unwrap_or(0)
                + 1;
            let nodes = nodes_per_axis.unwrap_or_else(|| {
                let even_int = p.fract() == 0.0 && (p as u64) % 2 == 0;
                if even_int {
                    (p as usize * degree as usize) / 2 + 1
                } else {
                    let mut n = 40usize;
                    while k > 0 && (n as f64).powi(k as i32) > 2e7 {
                        n -= 1;
                    }
                    n
                }
            });
            let rule = quadrature::gauss_hermite(nodes.max(1));
            let outer = if k == 0 { 1 } else { rule.len() };
            let parts = exec.map(outer, |first| {
                let mut phi = vec![0.0; vars];
                let mut digits = vec![0usize; k];
                let mut acc = (0.0, 0.0);
                let inner = if k == 0 { 1 } else { rule.len().pow(k as u32 - 1) };
                for mut idx in 0..inner {
                    let mut w = 1.0;
                    if k > 0 {
                        digits[0] = first;
                        for dgt in digits.iter_mut().skip(1) {
                            *dgt = idx % rule.len();
                            idx /= rule.len();
                        }
                        for (t, &v) in active.iter().enumerate() {
                            phi[v] = rule.nodes[digits[t]];
                            w *= rule.weights[digits[t]];
                        }
                    }
                    let (nv, dv) = inst.pathwise(a, s, &phi);
                    acc.0 += w * norm_pow(out_norm, &nv, p);
                    acc.1 += w * norm_pow(in_norm, &dv, p);
                }
                acc
            });
            let (n, d) = parts.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
            (n, d, None, serde_json::json!({"mode": "quadrature", "nodes_per_axis": nodes, "active_variables": k}))
        }
        GaussEval::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(domain("samples", "need at least 2 samples"));
            }
            report.seed = seed;
            let batches = samples.min(64);
            let per = samples / batches;
            let extra = samples % batches;
            let parts = exec.map(batches, |b| {
                let mut r = rng::stream(seed, b as u64);
                let mut phi = vec![0.0; vars];
                let count = per + usize::from(b < extra);
                let mut acc = (0.0, 0.0);
                for _ in 0..count {
                    for x in phi.iter_mut() {
                        *x = StandardNormal.sample(&mut r);
                    }
                    let (nv, dv) = inst.pathwise(a, s, &phi);
                    acc.0 += norm_pow(out_norm, &nv, p);
                    acc.1 += norm_pow(in_norm, &dv, p);
                }
                (acc.0 / count as f64, acc.1 / count as f64)
            });
            let (n, d) = parts.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
            let (n, d) = (n / batches as f64, d / batches as f64);
            let ratios: Vec<f64> = parts
                .iter()
                .filter(|(_, dd)| *dd > 0.0)
                .map(|(nn, dd)| (nn / dd).powf(1.0 / p))
                .collect();
            let stderr = if ratios.len() >= 2 {
                let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
                let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64;
                Some((var / ratios.len() as f64).sqrt())
            } else {
                None
            };
            (n, d, stderr, serde_json::json!({"mode": "monte_carlo", "samples": samples, "batches": batches}))
        }
    };
    if !(den > 0.0) {
        return Err(Error::Degenerate("denominator is zero".into()));
    }
    let numerator = num.powf(1.0 / p);
    let denominator = den.powf(1.0 / p);
    report.best_ratio = numerator / denominator;
    report.trace.push(report.best_ratio);
    report.stderr = stderr;
    report.details = serde_json::json!({
        "numerator": numerator,
        "denominator": denominator,
        "eval": detail,
    });
    Ok(report.finish(started))
}

/// ψ_b = U φ_b for every block b.
pub fn blockwise_rotate(u: &TransformMatrix, phi: &[f64]) -> Vec<f64> {
    let d = u.dim();
    let mut out = vec![0.0; phi.len()];
    for (src, dst) in phi.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
        u.apply_into(src, dst);
    }
    out
}

/// Instance whose A-transform at ψ = Uφ (blockwise) reproduces the
/// UᵀAU-transform of `inst` at φ, for every draw φ.
pub fn lemma_ii_transport(inst: &GaussianBlockInstance, u: &TransformMatrix) -> Result<GaussianBlockInstance> {
    inst.check_matrix(u)?;
    if !u.is_orthogonal(1e-12) {
        return Err(domain("matrix", "U is not orthogonal"));
    }
    let d = inst.order;
    // φ_{b·d+i} = Σ_j U_{ji} ψ_{b·d+j}
    let sub = |v: usize| {
        let (b, i) = (v / d, v % d);
        Poly::linear(&(0..d).map(|j| (b * d + j, u.get(j, i))).collect::<Vec<_>>())
    };
    let substituted: Vec<Vec<Poly>> = inst
        .coeffs
        .iter()
        .map(|comps| comps.iter().map(|p| p.substitute(sub)).collect())
        .collect();
    let mut coeffs = Vec::with_capacity(substituted.len());
    for b in 0..inst.blocks {
        for l in 0..d {
            let comps = (0..inst.value_dim)
                .map(|c| {
                    (0..d).fold(Poly::zero(), |acc, i| {
                        acc.add(&substituted[b * d + i][c].scale(u.get(l, i)))
                    })
                })
                .collect();
            coeffs.push(comps);
        }
    }
    GaussianBlockInstance::with_degree_cap(inst.blocks, d, inst.value_dim, coeffs, inst.max_degree)
}

/// Embeds an order-d instance into order dM: block b keeps its variables in
/// the first d slots and the remaining coefficients are zero, so the
/// transform under the M-fold block-diagonal matrix is unchanged.
pub fn lemma_iii_embed(inst: &GaussianBlockInstance, m: usize) -> Result<GaussianBlockInstance> {
    if m == 0 {
        return Err(domain("m", "must be at least 1"));
    }
    let (d, big) = (inst.order, inst.order * m);
    let remap = |v: usize| (v / d) * big + v % d;
    let zero = vec![Poly::zero(); inst.value_dim];
    let mut coeffs = Vec::with_capacity(inst.blocks * big);
    for b in 0..inst.blocks {
        for l in 0..big {
            if l < d {
                coeffs.push(inst.coeffs[b * d + l].iter().map(|p| p.reindex(remap)).collect());
            } else {
                coeffs.push(zero.clone());
            }
        }
    }
    GaussianBlockInstance::with_degree_cap(inst.blocks, big, inst.value_dim, coeffs, inst.max_degree)
}

/// Lifts an instance for B = C restricted to `indices` (zero-based, strictly
/// ascending) to an instance for C by adding Gaussian variables with zero
/// coefficients. Requires C's rows in `indices` to vanish outside them.
pub fn lemma_iv_augment(
    inst: &GaussianBlockInstance,
    b: &TransformMatrix,
    c: &TransformMatrix,
    indices: &[usize],
) -> Result<GaussianBlockInstance> {
    inst.check_matrix(b)?;
    let dc = c.dim();
    let restricted = if indices.len() == dc && indices.iter().enumerate().all(|(i, &v)| i == v) {
        c.clone()
    } else {
        submatrix(c, indices)?
    };
    if restricted.max_abs_diff(b) > 1e-12 {
        return Err(domain("matrix", "B is not the principal submatrix of C on the given indices"));
    }
    for &l in indices {
        for j in (0..dc).filter(|j| !indices.contains(j)) {
            if c.get(l, j) != 0.0 {
                return Err(domain(
                    "matrix",
                    format!("C[{l}][{j}] = {} must vanish (row in I, column outside I)", c.get(l, j)),
                ));
            }
        }
    }
    let db = inst.order;
    let remap = |v: usize| (v / db) * dc + indices[v % db];
    let zero = vec![Poly::zero(); inst.value_dim];
    let mut coeffs = vec![zero; inst.blocks * dc];
    for blk in 0..inst.blocks {
        for (r, &slot) in indices.iter().enumerate() {
            coeffs[blk * dc + slot] = inst.coeffs[blk * db + r].iter().map(|p| p.reindex(remap)).collect();
        }
    }
    GaussianBlockInstance::with_degree_cap(inst.blocks, dc, inst.value_dim, coeffs, inst.max_degree)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceCheck {
    pub samples: usize,
    pub covariance: Vec<Vec<f64>>,
    /// Largest |cov − δ| in units of its standard error.
    pub max_z: f64,
    pub within_three_stderr: bool,
}

/// Empirical covariance of blockwise rotated standard Gaussians.
pub fn blockwise_rotation_covariance(
    u: &TransformMatrix,
    blocks: usize,
    samples: usize,
    seed: u64,
) -> Result<CovarianceCheck> {
    if samples < 2 {
        return Err(domain("samples", "need at least 2 samples"));
    }
    let n = u.dim() * blocks;
    let mut r = rng::stream(seed, 0);
    let mut sum = vec![0.0; n * n];
    let mut sum_sq = vec![0.0; n * n];
    let mut phi = vec![0.0; n];
    for _ in 0..samples {
        for x in phi.iter_mut() {
            *x = StandardNormal.sample(&mut r);
        }
        let psi = blockwise_rotate(u, &phi);
        for i in 0..n {
            for j in 0..n {
                let v = psi[i] * psi[j];
                sum[i * n + j] += v;
                sum_sq[i * n + j] += v * v;
            }
        }
    }
    let s = samples as f64;
    let mut max_z: f64 = 0.0;
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mean = sum[i * n + j] / s;
            let var = (sum_sq[i * n + j] / s - mean * mean).max(0.0);
            let se = (var / s).sqrt();
            let target = if i == j { 1.0 } else { 0.0 };
            cov[i][j] = mean;
            if se > 0.0 {
                max_z = max_z.max((mean - target).abs() / se);
            }
        }
    }
    Ok(CovarianceCheck {
        samples,
        covariance: cov,
        max_z,
        within_three_stderr: max_z <= 3.0,
    })
}
