//! Heat extensions, Itô sums along Brownian paths, and the bilinear
//! identity E[∫∇u·d(AW) · ∫∇v·dW] = ⟨U_A f, g⟩ on the torus.
//!
//! Brownian motion starts from the uniform distribution on the torus, so
//! W_t is uniform for every t and the expectation becomes a plain spatial
//! average. With u(x, s) = Σ f̂(k) e^{-s|k|²/2} e^{i⟨k,x⟩} and evaluation at
//! time T − t, the identity holds up to the tail e^{-T·min|k|²}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::fft;
use crate::matrix::TransformMatrix;
use crate::multiplier::GridFunction;
use crate::quadrature;
use crate::rng;

/// Steps coarser than this are flagged in Monte-Carlo reports.
pub const COARSE_STEP: f64 = 1e-2;
/// Shortest horizon accepted by [`mc_bilinear`].
pub const MIN_HORIZON: f64 = 20.0;

/// Nonzero Fourier modes of a scalar grid function.
#[derive(Debug, Clone)]
pub struct HeatExtension {
    dim: usize,
    modes: Vec<(Vec<i64>, Complex64)>,
}

impl HeatExtension {
    pub fn new(f: &GridFunction) -> Result<Self> {
        if f.value_dim() != 1 {
            return Err(domain("f", "heat extensions are scalar"));
        }
        let coeffs = f.coefficients();
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut idx = vec![0usize; f.dim()];
        let modes = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-15 * scale)
            .map(|(flat, &c)| {
                fft::unravel(flat, f.dim(), f.n(), &mut idx);
                (idx.iter().map(|&i| fft::freq(i, f.n())).collect(), c)
            })
            .collect();
        Ok(Self { dim: f.dim(), modes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[(Vec<i64>, Complex64)] {
        &self.modes
    }

    /// (u(x, t), ∇u(x, t)) by direct summation over the modes.
    pub fn eval(&self, x: &[f64], t: f64) -> (Complex64, Vec<Complex64>) {
        let mut value = Complex64::default();
        let mut grad = vec![Complex64::default(); self.dim];
        for (k, c) in &self.modes {
            let k2: i64 = k.iter().map(|v| v * v).sum();
            let phase: f64 = k.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
            let term = c * (-t * k2 as f64 / 2.0).exp() * Complex64::from_polar(1.0, phase);
            value += term;
            for (g, &ka) in grad.iter_mut().zip(k) {
                *g += term * Complex64::new(0.0, ka as f64);
            }
        }
        (value, grad)
    }
}

/// Heat extension of `f` evaluated off-grid: (u(x, t), ∇u(x, t)).
pub fn heat_extension_eval(f: &GridFunction, x: &[f64], t: f64) -> Result<(Complex64, Vec<Complex64>)> {
    if !(t >= 0.0) {
        return Err(domain("t", format!("time {t} must be non-negative")));
    }
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    Ok(HeatExtension::new(f)?.eval(x, t))
}

fn quadratic_symbol(a: &TransformMatrix, k: &[i64]) -> f64 {
    let xi: Vec<f64> = k.iter().map(|&v| v as f64).collect();
    let k2: f64 = xi.iter().map(|v| v * v).sum();
    if k2 == 0.0 {
        0.0
    } else {
        a.quadratic_form(&xi) / k2
    }
}

/// U_A f: coefficient-wise product with ⟨k, Ak⟩/|k|², zero mode removed.
pub fn u_a_operator(a: &TransformMatrix, f: &GridFunction) -> Result<GridFunction> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.dim(),
        });
    }
    let mut g = f.clone();
    g.spectral_map(|k, _| Complex64::new(quadratic_symbol(a, k), 0.0));
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BilinearMode {
    SpectralExact,
    /// Gauss–Legendre in time on dyadically graded panels of [0, t_cut],
    /// `nodes` per panel, with exact grid sums in space.
    TimeQuadrature { t_cut: f64, nodes: usize },
}

fn check_pair(a: &TransformMatrix, f: &GridFunction, g: &GridFunction) -> Result<()> {
    f.check_compatible(g)?;
    if f.value_dim() != 1 {
        return Err(domain("f", "bilinear form needs scalar functions"));
    }
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.dim(),
        });
    }
    for (name, h) in [("f", f), ("g", g)] {
        let scale = h.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        if h.mean()[0].norm() > 1e-12 * scale {
            return Err(domain(name, "must have mean zero"));
        }
    }
    Ok(())
}

/// ⟨U_A f, g⟩ under the normalised measure, either directly in frequency or
/// through the time integral of ∫⟨Aᵀ∇u, ∇v⟩ dx.
pub fn deterministic_bilinear(
    a: &TransformMatrix,
    f: &GridFunction,
    g: &GridFunction,
    mode: BilinearMode,
) -> Result<f64> {
    check_pair(a, f, g)?;
    let (dim, n) = (f.dim(), f.n());
    let fc = f.coefficients();
    let gc = g.coefficients();
    let mut idx = vec![0usize; dim];
    let mut k = vec![0i64; dim];
    match mode {
        BilinearMode::SpectralExact => {
            let mut s = Complex64::default();
            for flat in 0..fc.len() {
                fft::unravel(flat, dim, n, &mut idx);
                for ax in 0..dim {
                    k[ax] = fft::freq(idx[ax], n);
                }
                s += fc[flat] * gc[flat].conj() * quadratic_symbol(a, &k);
            }
            Ok(s.re)
        }
        BilinearMode::TimeQuadrature { t_cut, nodes } => {
            if !(t_cut > 0.0) || nodes == 0 {
                return Err(domain("mode", "time quadrature needs t_cut > 0 and nodes ≥ 1"));
            }
            let rule = quadrature::gauss_legendre(nodes);
            let mut panels = Vec::new();
            let mut hi = t_cut;
            while hi > 1e-6 * t_cut.min(1.0) {
                let lo = hi / 2.0;
                panels.push((lo, hi));
                hi = lo;
            }
            panels.push((0.0, hi));
            let mut total = 0.0;
            for (lo, hi) in panels {
                let r = rule.on(lo, hi);
                for (&t, &w) in r.nodes.iter().zip(&r.weights) {
                    total += w * spatial_gradient_pairing(a, &fc, &gc, dim, n, t);
                }
            }
            Ok(total)
        }
    }
}

/// ∫_T ⟨Aᵀ∇u(x, t), ∇v(x, t)⟩ dx with u, v carried to time t/2·2 = t in
/// the e^{-t|k|²/2} convention for each factor, evaluated as a grid sum.
fn spatial_gradient_pairing(
    a: &TransformMatrix,
    fc: &[Complex64],
    gc: &[Complex64],
    dim: usize,
    n: usize,
    t: f64,
) -> f64 {
    let points = fc.len();
    let mut idx = vec![0usize; dim];
    let mut grads_u = vec![vec![Complex64::default(); points]; dim];
    let mut grads_v = vec![vec![Complex64::default(); points]; dim];
    for flat in 0..points {
        fft::unravel(flat, dim, n, &mut idx);
        let k: Vec<f64> = idx.iter().map(|&i| fft::freq(i, n) as f64).collect();
        let k2: f64 = k.iter().map(|v| v * v).sum();
        let decay = (-t * k2 / 2.0).exp();
        // the grid starts at −π, hence the alternating sign
        let sign = if idx.iter().map(|&i| fft::freq(i, n)).sum::<i64>().rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        for ax in 0..dim {
            let ik = Complex64::new(0.0, k[ax]) * decay * sign * points as f64;
            grads_u[ax][flat] = fc[flat] * ik;
            grads_v[ax][flat] = gc[flat] * ik;
        }
    }
    for ax in 0..dim {
        fft::inverse(&mut grads_u[ax], dim, n);
        fft::inverse(&mut grads_v[ax], dim, n);
    }
    let mut s = 0.0;
    for x in 0..points {
        for i in 0..dim {
            // (Aᵀ∇u)_i = Σ_j A_{ji} ∂_j u
            let atu: f64 = (0..dim).map(|j| a.get(j, i) * grads_u[j][x].re).sum();
            s += atu * grads_v[i][x].re;
        }
    }
    s / points as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPoint {
    Origin,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub paths: usize,
    pub step: f64,
    pub horizon: f64,
    pub start: StartPoint,
    pub seed: u64,
}

impl MCConfig {
    pub fn new(paths: usize, step: f64, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            paths,
            step,
            horizon,
            start: StartPoint::Uniform,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(domain("paths", "must be at least 1"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(domain("step", format!("{} must be positive", self.step)));
        }
        if !(self.horizon >= self.step && self.horizon.is_finite()) {
            return Err(domain("horizon", format!("{} must be at least the step", self.horizon)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round().max(1.0) as usize
    }
}

/// One sampled Brownian path on the torus.
#[derive(Debug, Clone)]
pub struct BrownianPath {
    pub dim: usize,
    pub step: f64,
    pub horizon: f64,
    pub seed: u64,
    pub start: Vec<f64>,
    /// Row j holds ΔW_j = W_{t_{j+1}} − W_{t_j}.
    pub increments: Vec<Vec<f64>>,
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

impl BrownianPath {
    /// Path `index` of the stream identified by `cfg.seed`.
    pub fn sample(dim: usize, cfg: &MCConfig, index: u64) -> Result<Self> {
        cfg.validate()?;
        let mut r = rng::stream(cfg.seed, index);
        let start = match cfg.start {
            StartPoint::Origin => vec![0.0; dim],
            StartPoint::Uniform => (0..dim).map(|_| r.gen_range(-PI..PI)).collect(),
        };
        let sd = cfg.step.sqrt();
        let increments = (0..cfg.steps())
            .map(|_| (0..dim).map(|_| sd * r.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        Ok(Self {
            dim,
            step: cfg.step,
            horizon: cfg.horizon,
            seed: cfg.seed,
            start,
            increments,
        })
    }

    /// Positions W_{t_0}, …, W_{t_n}, wrapped to [−π, π).
    pub fn positions(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.increments.len() + 1);
        let mut x = self.start.clone();
        out.push(x.iter().map(|&v| wrap(v)).collect());
        for dw in &self.increments {
            for (xi, d) in x.iter_mut().zip(dw) {
                *xi += d;
            }
            out.push(x.iter().map(|&v| wrap(v)).collect());
        }
        out
    }

    /// Endpoint W_T without wrapping (start plus the sum of increments).
    pub fn unwrapped_end(&self) -> Vec<f64> {
        let mut x = self.start.clone();
        for dw in &self.increments {
            for (xi, d) in x.iter_mut().zip(dw) {
                *xi += d;
            }
        }
        x
    }
}

/// Left-endpoint Itô sums (Σ⟨U(t_j, W_j), AΔW_j⟩, Σ⟨U(t_j, W_j), ΔW_j⟩).
pub fn ito_transform_pathwise(
    integrand: impl Fn(f64, &[f64]) -> Vec<f64>,
    a: &TransformMatrix,
    path: &BrownianPath,
) -> Result<(f64, f64)> {
    if a.dim() != path.dim {
        return Err(Error::DimensionMismatch {
            expected: path.dim,
            found: a.dim(),
        });
    }
    let positions = path.positions();
    let mut transformed = 0.0;
    let mut plain = 0.0;
    let mut adw = vec![0.0; path.dim];
    for (j, dw) in path.increments.iter().enumerate() {
        let u = integrand(j as f64 * path.step, &positions[j]);
        a.apply_into(dw, &mut adw);
        transformed += u.iter().zip(&adw).map(|(x, y)| x * y).sum::<f64>();
        plain += u.iter().zip(dw).map(|(x, y)| x * y).sum::<f64>();
    }
    Ok((transformed, plain))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Step above [`COARSE_STEP`].
    pub coarse_step: bool,
}

/// Monte-Carlo estimate of E[∫∇u(W_t, T−t)·d(AW)_t · ∫∇v(W_t, T−t)·dW_t].
pub fn mc_bilinear(
    a: &TransformMatrix,
    f: &GridFunction,
    g: &GridFunction,
    cfg: &MCConfig,
    exec: Exec,
) -> Result<MCEstimate> {
    Ok(mc_bilinear_multi(std::slice::from_ref(a), f, g, cfg, exec)?[0])
}

/// One mode of a real pair (f, g) in a half space; f contributes
/// 2·Re(f̂(k)e^{i⟨k,x⟩}), whose gradient is −2k·Im(f̂(k)e^{i⟨k,x⟩}).
struct PairMode<const D: usize> {
    pair: usize,
    k: [f64; D],
    /// Offsets of k_i into the per-axis power tables.
    slot: [usize; D],
    decay: usize,
    cf: Complex64,
    cg: Complex64,
}

fn in_half_space(k: &[i64]) -> bool {
    match k.iter().find(|&&v| v != 0) {
        Some(&v) => v > 0,
        None => false,
    }
}

/// [`mc_bilinear`] for several matrices over the same paths.
pub fn mc_bilinear_multi(
    matrices: &[TransformMatrix],
    f: &GridFunction,
    g: &GridFunction,
    cfg: &MCConfig,
    exec: Exec,
) -> Result<Vec<MCEstimate>> {
    Ok(mc_bilinear_pairs(matrices, &[(f, g)], cfg, exec)?.remove(0))
}

/// Estimates for every pair and matrix from one set of paths; entry
/// `[i][j]` belongs to pair i and matrix j. Each estimate is the same as a
/// separate run with the same seed.
pub fn mc_bilinear_pairs(
    matrices: &[TransformMatrix],
    pairs: &[(&GridFunction, &GridFunction)],
    cfg: &MCConfig,
    exec: Exec,
) -> Result<Vec<Vec<MCEstimate>>> {
    cfg.validate()?;
    if matrices.is_empty() || pairs.is_empty() {
        return Err(domain("matrices", "need at least one matrix and one pair"));
    }
    let dim = pairs[0].0.dim();
    for &(f, g) in pairs {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        for a in matrices {
            check_pair(a, f, g)?;
        }
        if !f.is_real() || !g.is_real() {
            return Err(domain("f", "Monte-Carlo pairing needs real functions"));
        }
    }
    if cfg.start != StartPoint::Uniform {
        return Err(domain("start", "the torus identity needs a uniform starting point"));
    }
    if cfg.horizon < MIN_HORIZON {
        return Err(domain("horizon", format!("{} is below the minimum {MIN_HORIZON}", cfg.horizon)));
    }
    match dim {
        1 => mc_kernel::<1>(matrices, pairs, cfg, exec),
        2 => mc_kernel::<2>(matrices, pairs, cfg, exec),
        _ => mc_kernel::<3>(matrices, pairs, cfg, exec),
    }
}

fn mc_kernel<const D: usize>(
    matrices: &[TransformMatrix],
    pairs: &[(&GridFunction, &GridFunction)],
    cfg: &MCConfig,
    exec: Exec,
) -> Result<Vec<Vec<MCEstimate>>> {
    let mut idx = vec![0usize; D];
    let mut k2_values: Vec<i64> = Vec::new();
    let mut raw = Vec::new();
    for (pair, &(f, g)) in pairs.iter().enumerate() {
        let (n, fc, gc) = (f.n(), f.coefficients(), g.coefficients());
        let scale = fc.iter().chain(&gc).map(|c| c.norm()).fold(0.0, f64::max);
        for flat in 0..fc.len() {
            if fc[flat].norm() <= 1e-15 * scale && gc[flat].norm() <= 1e-15 * scale {
                continue;
            }
            fft::unravel(flat, D, n, &mut idx);
            let k: Vec<i64> = idx.iter().map(|&i| fft::freq(i, n)).collect();
            if in_half_space(&k) {
                raw.push((pair, k, fc[flat], gc[flat]));
            }
        }
    }
    let band = raw.iter().flat_map(|(_, k, _, _)| k.iter().map(|v| v.unsigned_abs() as usize)).max().unwrap_or(0);
    let modes: Vec<PairMode<D>> = raw
        .into_iter()
        .map(|(pair, k, cf, cg)| {
            let k2: i64 = k.iter().map(|v| v * v).sum();
            let decay = k2_values.iter().position(|&v| v == k2).unwrap_or_else(|| {
                k2_values.push(k2);
                k2_values.len() - 1
            });
            PairMode {
                pair,
                k: std::array::from_fn(|a| k[a] as f64),
                slot: std::array::from_fn(|a| (k[a] + band as i64) as usize),
                decay,
                cf: -2.0 * cf,
                cg: -2.0 * cg,
            }
        })
        .collect();
    // modes are grouped by pair in increasing order
    let ranges: Vec<std::ops::Range<usize>> = (0..pairs.len())
        .map(|q| {
            let lo = modes.partition_point(|m| m.pair < q);
            let hi = modes.partition_point(|m| m.pair <= q);
            lo..hi
        })
        .collect();
    let steps = cfg.steps();
    let h = cfg.step;
    let kinds = k2_values.len().max(1);
    // row j holds e^{-(T - t_j)|k|²/2} for each distinct |k|²
    let mut decay = vec![0.0; steps * kinds];
    for j in 0..steps {
        for (s, &k2) in k2_values.iter().enumerate() {
            decay[j * kinds + s] = (-(cfg.horizon - j as f64 * h) * k2 as f64 / 2.0).exp();
        }
    }
    let mats: Vec<[[f64; D]; D]> = matrices
        .iter()
        .map(|a| std::array::from_fn(|i| std::array::from_fn(|j| a.get(i, j))))
        .collect();
    let (n_pairs, n_mats) = (pairs.len(), matrices.len());
    let batches = cfg.paths.min(128);
    let sqrt_h = h.sqrt();
    let width = 2 * band + 1;
    let per_batch = exec.map(batches, |b| {
        let count = cfg.paths / batches + usize::from(b < cfg.paths % batches);
        let first = b * (cfg.paths / batches) + b.min(cfg.paths % batches);
        let mut sums = vec![0.0; n_pairs * n_mats];
        let mut x = [0.0; D];
        let mut rotor = [Complex64::default(); D];
        let mut powers = vec![Complex64::new(1.0, 0.0); D * width];
        let mut gu = vec![[0.0; D]; n_pairs];
        let mut gv = vec![[0.0; D]; n_pairs];
        let mut x_acc = vec![0.0; n_pairs * n_mats];
        let mut y_acc = vec![0.0; n_pairs];
        for path in first..first + count {
            let mut r = rng::stream(cfg.seed, path as u64);
            for ax in 0..D {
                x[ax] = r.gen_range(-PI..PI);
                rotor[ax] = Complex64::from_polar(1.0, x[ax]);
            }
            x_acc.iter_mut().for_each(|v| *v = 0.0);
            y_acc.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..steps {
                for ax in 0..D {
                    let pw = &mut powers[ax * width..(ax + 1) * width];
                    for e in 1..=band {
                        let v = pw[band + e - 1] * rotor[ax];
                        pw[band + e] = v;
                        pw[band - e] = v.conj();
                    }
                }
                let row = &decay[j * kinds..(j + 1) * kinds];
                for (q, range) in ranges.iter().enumerate() {
                    let mut u = [0.0; D];
                    let mut v = [0.0; D];
                    for m in &modes[range.clone()] {
                        let mut z = powers[m.slot[0]];
                        for ax in 1..D {
                            z *= powers[ax * width + m.slot[ax]];
                        }
                        let dcy = row[m.decay];
                        let wf = (m.cf.re * z.im + m.cf.im * z.re) * dcy;
                        let wg = (m.cg.re * z.im + m.cg.im * z.re) * dcy;
                        for ax in 0..D {
                            u[ax] += m.k[ax] * wf;
                            v[ax] += m.k[ax] * wg;
                        }
                    }
                    gu[q] = u;
                    gv[q] = v;
                }
                let dw: [f64; D] = std::array::from_fn(|_| sqrt_h * r.sample::<f64, _>(StandardNormal));
                for q in 0..n_pairs {
                    for (acc, a) in x_acc[q * n_mats..(q + 1) * n_mats].iter_mut().zip(&mats) {
                        // ⟨∇u, AΔW⟩
                        let mut s = 0.0;
                        for i in 0..D {
                            let mut adw = 0.0;
                            for jj in 0..D {
                                adw += a[i][jj] * dw[jj];
                            }
                            s += gu[q][i] * adw;
                        }
                        *acc += s;
                    }
                    for ax in 0..D {
                        y_acc[q] += gv[q][ax] * dw[ax];
                    }
                }
                for ax in 0..D {
                    x[ax] += dw[ax];
                    rotor[ax] *= unit_rotor(dw[ax]);
                }
                if j % 1024 == 1023 {
                    for ax in 0..D {
                        x[ax] = wrap(x[ax]);
                        rotor[ax] = Complex64::from_polar(1.0, x[ax]);
                    }
                }
            }
            for q in 0..n_pairs {
                for i in 0..n_mats {
                    sums[q * n_mats + i] += x_acc[q * n_mats + i] * y_acc[q];
                }
            }
        }
        sums.iter().map(|s| s / count as f64).collect::<Vec<f64>>()
    });
    let weights: Vec<f64> = (0..batches)
        .map(|b| (cfg.paths / batches + usize::from(b < cfg.paths % batches)) as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let coarse = h > COARSE_STEP;
    Ok((0..n_pairs)
        .map(|q| {
            (0..n_mats)
                .map(|i| {
                    let means: Vec<f64> = per_batch.iter().map(|b| b[q * n_mats + i]).collect();
                    let estimate = means.iter().zip(&weights).map(|(m, w)| m * w).sum::<f64>() / total;
                    let stderr = if batches > 1 {
                        let var = means.iter().map(|m| (m - estimate).powi(2)).sum::<f64>() / (batches - 1) as f64;
                        (var / batches as f64).sqrt()
                    } else {
                        f64::NAN
                    };
                    MCEstimate {
                        estimate,
                        stderr,
                        coarse_step: coarse,
                    }
                })
                .collect()
        })
        .collect())
}

/// e^{iδ} by a truncated Taylor series; |δ| is a Brownian increment, so a
/// handful of terms reach double precision.
#[inline]
fn unit_rotor(d: f64) -> Complex64 {
    if d.abs() > 0.25 {
        return Complex64::from_polar(1.0, d);
    }
    // split evaluation keeps the dependency chains short
    let d2 = d * d;
    let d4 = d2 * d2;
    let d8 = d4 * d4;
    let c = (1.0 - d2 / 2.0)
        + d4 * ((1.0 / 24.0 - d2 / 720.0) + d4 * (1.0 / 40320.0 - d2 / 3628800.0))
        + d8 * d4 / 479001600.0;
    let s = d
        * ((1.0 - d2 / 6.0)
            + d4 * ((1.0 / 120.0 - d2 / 5040.0) + d4 * (1.0 / 362880.0 - d2 / 39916800.0))
            + d8 * d4 / 6227020800.0);
    Complex64::new(c, s)
}
