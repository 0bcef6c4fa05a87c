//! Walsh–Paley martingale transforms evaluated by exact enumeration of the
//! 2^n sign atoms.
//!
//! Table entry `j` of level k (1-based) is the coefficient d_k on the atoms
//! whose first k−1 signs encode `j`: bit i of `j` is set when ε_{i+1} = +1.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operator::OperatorMatrix;
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::multiplier::{p_star, PointNorm};
use crate::report::{flags, EstimateReport};
use crate::rng;

/// Largest depth evaluated by enumeration.
pub const MAX_ENUMERATION_DEPTH: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct WalshPaleyInstance {
    value_dim: usize,
    /// tables[k][j] is d_{k+1} on prefix j, a vector of length `value_dim`.
    tables: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawInstance {
    value_dim: usize,
    tables: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawInstance> for WalshPaleyInstance {
    type Error = Error;

    fn try_from(r: RawInstance) -> Result<Self> {
        Self::new(r.value_dim, r.tables)
    }
}

impl WalshPaleyInstance {
    pub fn new(value_dim: usize, tables: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if value_dim == 0 {
            return Err(domain("value_dim", "must be at least 1"));
        }
        if tables.is_empty() || tables.len() > MAX_ENUMERATION_DEPTH {
            return Err(domain(
                "depth",
                format!("depth {} not in 1..={MAX_ENUMERATION_DEPTH}", tables.len()),
            ));
        }
        let mut any_nonzero = false;
        for (k, level) in tables.iter().enumerate() {
            if level.len() != 1 << k {
                return Err(domain(
                    "tables",
                    format!("level {} has {} entries, expected {}", k + 1, level.len(), 1usize << k),
                ));
            }
            for v in level {
                if v.len() != value_dim {
                    return Err(domain("tables", format!("entry of length {} in a {value_dim}-valued instance", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(domain("tables", "entries must be finite"));
                }
                any_nonzero |= v.iter().any(|&x| x != 0.0);
            }
        }
        if !any_nonzero {
            return Err(domain("tables", "all martingale differences are zero"));
        }
        Ok(Self { value_dim, tables })
    }

    /// Scalar instance from per-level tables.
    pub fn scalar(tables: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(1, tables.into_iter().map(|l| l.into_iter().map(|x| vec![x]).collect()).collect())
    }

    /// Scalar instance from the concatenation of all levels (2^n − 1 values).
    pub fn from_flat_scalar(depth: usize, values: &[f64]) -> Result<Self> {
        if values.len() != (1 << depth) - 1 {
            return Err(domain("tables", format!("{} values for depth {depth}", values.len())));
        }
        let tables = (0..depth)
            .map(|k| values[(1 << k) - 1..(1 << (k + 1)) - 1].to_vec())
            .collect();
        Self::scalar(tables)
    }

    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn tables(&self) -> &[Vec<Vec<f64>>] {
        &self.tables
    }

    /// The same instance with a final zero level appended.
    pub fn extended(&self) -> Result<Self> {
        let mut tables = self.tables.clone();
        tables.push(vec![vec![0.0; self.value_dim]; 1 << self.depth()]);
        Self::new(self.value_dim, tables)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TransformCoefficients {
    alpha: Vec<f64>,
}

impl TryFrom<Vec<f64>> for TransformCoefficients {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TransformCoefficients> for Vec<f64> {
    fn from(t: TransformCoefficients) -> Self {
        t.alpha
    }
}

impl TransformCoefficients {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if let Some(a) = alpha.iter().find(|a| !(a.abs() <= 1.0)) {
            return Err(domain("alpha", format!("|α| = {} exceeds 1", a.abs())));
        }
        Ok(Self { alpha })
    }

    /// Vertex pattern `bits` of {−1, 1}^n (bit k set ⇒ α_{k+1} = +1).
    pub fn vertex(n: usize, bits: usize) -> Self {
        Self {
            alpha: (0..n).map(|k| if bits >> k & 1 == 1 { 1.0 } else { -1.0 }).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformRatio {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// ‖Σ α_k ε_k S d_k‖_p / ‖Σ ε_k d_k‖_p by enumeration of all atoms.
pub fn wp_transform_ratio(
    inst: &WalshPaleyInstance,
    alpha: &TransformCoefficients,
    p: f64,
    s: Option<&OperatorMatrix>,
    exec: Exec,
) -> Result<TransformRatio> {
    let n = inst.depth();
    if alpha.alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.alpha.len(),
        });
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("p", format!("exponent {p} must lie in (1, ∞)")));
    }
    let m = inst.value_dim;
    let (m_out, in_norm, out_norm) = match s {
        Some(op) => {
            if op.cols != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: op.cols,
                });
            }
            (op.rows, op.input_norm, op.output_norm)
        }
        None => (m, PointNorm::L2, PointNorm::L2),
    };
    // α_k S d_k, precomputed per table entry.
    let transformed: Vec<Vec<Vec<f64>>> = inst
        .tables
        .iter()
        .zip(&alpha.alpha)
        .map(|(level, &a)| {
            level
                .iter()
                .map(|d| {
                    let sd = match s {
                        Some(op) => op.apply(d),
                        None => d.clone(),
                    };
                    sd.into_iter().map(|x| a * x).collect()
                })
                .collect()
        })
        .collect();
    let split = n.min(8);
    let partial = exec.map(1 << split, |prefix| {
        let mut f = vec![vec![0.0; m]; n + 1];
        let mut g = vec![vec![0.0; m_out]; n + 1];
        for k in 0..split {
            let sign = if prefix >> k & 1 == 1 { 1.0 } else { -1.0 };
            let j = prefix & ((1 << k) - 1);
            for c in 0..m {
                f[k + 1][c] = f[k][c] + sign * inst.tables[k][j][c];
            }
            for c in 0..m_out {
                g[k + 1][c] = g[k][c] + sign * transformed[k][j][c];
            }
        }
        let mut acc = (0.0, 0.0);
        descend(inst, &transformed, split, prefix, &mut f, &mut g, p, in_norm, out_norm, &mut acc);
        acc
    });
    let (num, den) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let atoms = (1u64 << n) as f64;
    let numerator = (num / atoms).powf(1.0 / p);
    let denominator = (den / atoms).powf(1.0 / p);
    if denominator <= 0.0 {
        return Err(Error::Degenerate("denominator is zero".into()));
    }
    Ok(TransformRatio {
        numerator,
        denominator,
        ratio: numerator / denominator,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    inst: &WalshPaleyInstance,
    transformed: &[Vec<Vec<f64>>],
    k: usize,
    prefix: usize,
    f: &mut [Vec<f64>],
    g: &mut [Vec<f64>],
    p: f64,
    in_norm: PointNorm,
    out_norm: PointNorm,
    acc: &mut (f64, f64),
) {
    let n = inst.depth();
    if k == n {
        acc.0 += norm_pow(out_norm, &g[n], p);
        acc.1 += norm_pow(in_norm, &f[n], p);
        return;
    }
    let d = &inst.tables[k][prefix];
    let t = &transformed[k][prefix];
    for (bit, sign) in [(0usize, -1.0), (1, 1.0)] {
        let (lo, hi) = f.split_at_mut(k + 1);
        for (c, x) in hi[0].iter_mut().enumerate() {
            *x = lo[k][c] + sign * d[c];
        }
        let (lo, hi) = g.split_at_mut(k + 1);
        for (c, x) in hi[0].iter_mut().enumerate() {
            *x = lo[k][c] + sign * t[c];
        }
        descend(inst, transformed, k + 1, prefix | bit << k, f, g, p, in_norm, out_norm, acc);
    }
}

#[inline]
fn norm_pow(norm: PointNorm, v: &[f64], p: f64) -> f64 {
    if v.len() == 1 {
        v[0].abs().powf(p)
    } else {
        norm.eval(v).powf(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    ExhaustiveSmall,
    RandomRestart,
    GreedyCoordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub depth: usize,
    pub p: f64,
    pub strategy: SearchStrategy,
    /// Maximum number of coefficient tables evaluated (each against all 2^n
    /// sign patterns).
    pub budget: u64,
    pub seed: u64,
    /// Quantized values allowed in the coefficient tables.
    pub values: Vec<f64>,
}

impl SearchConfig {
    pub fn new(depth: usize, p: f64, strategy: SearchStrategy) -> Self {
        Self {
            depth,
            p,
            strategy,
            budget: 1_000_000,
            seed: 0,
            values: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
        }
    }
}

/// Best ratio over the 2^n vertex sign patterns for scalar tables given as
/// the flat concatenation of levels. Returns (ratio, pattern bits); `None`
/// when every difference vanishes.
fn best_vertex_ratio(depth: usize, flat: &[f64], p: f64, atoms_buf: &mut Vec<f64>) -> Option<(f64, usize)> {
    let atoms = 1usize << depth;
    atoms_buf.clear();
    atoms_buf.resize(atoms * depth, 0.0);
    let mut den = 0.0;
    for a in 0..atoms {
        let mut s = 0.0;
        for k in 0..depth {
            let sign = if a >> k & 1 == 1 { 1.0 } else { -1.0 };
            let j = a & ((1 << k) - 1);
            let t = sign * flat[(1 << k) - 1 + j];
            atoms_buf[a * depth + k] = t;
            s += t;
        }
        den += s.abs().powf(p);
    }
    if den == 0.0 {
        return None;
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for bits in 0..atoms {
        let mut num = 0.0;
        for a in 0..atoms {
            let mut s = 0.0;
            for k in 0..depth {
                let t = atoms_buf[a * depth + k];
                s += if bits >> k & 1 == 1 { t } else { -t };
            }
            num += s.abs().powf(p);
        }
        let r = (num / den).powf(1.0 / p);
        if r > best.0 {
            best = (r, bits);
        }
    }
    Some(best)
}

fn decode(mut index: u64, base: u64, out: &mut [usize]) {
    for o in out.iter_mut() {
        *o = (index % base) as usize;
        index /= base;
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    ratio: f64,
    index: u64,
    bits: usize,
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.ratio > x.ratio || (y.ratio == x.ratio && y.index < x.index) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Lower-bound search for the scalar UMD constant over quantized
/// Walsh–Paley coefficient tables.
pub fn umd_lower_bound_search(cfg: &SearchConfig, exec: Exec) -> Result<EstimateReport> {
    let started = Instant::now();
    let n = cfg.depth;
    if n == 0 || n > MAX_ENUMERATION_DEPTH {
        return Err(domain("depth", format!("{n} not in 1..={MAX_ENUMERATION_DEPTH}")));
    }
    if !(cfg.p > 1.0 && cfg.p.is_finite()) {
        return Err(domain("p", format!("exponent {} must lie in (1, ∞)", cfg.p)));
    }
    if cfg.values.is_empty() || cfg.values.iter().any(|v| !v.is_finite()) {
        return Err(domain("values", "quantized value set must be non-empty and finite"));
    }
    let entries = (1usize << n) - 1;
    let base = cfg.values.len() as u64;
    let mut report = EstimateReport::new(format!("walsh-paley umd lower bound, depth {n}"), cfg.p, cfg.seed);
    let to_flat = |digits: &[usize]| -> Vec<f64> { digits.iter().map(|&d| cfg.values[d]).collect() };

    let best: Option<Candidate>;
    let mut evaluations: u64;
    match cfg.strategy {
        SearchStrategy::ExhaustiveSmall => {
            if n > 4 {
                return Err(domain("depth", format!("exhaustive search needs depth ≤ 4, got {n}")));
            }
            let total = base.checked_pow(entries as u32).unwrap_or(u64::MAX);
            evaluations = total.min(cfg.budget);
            if evaluations < total {
                report.flag(flags::BUDGET_EXHAUSTED);
            }
            let chunk = 4096u64;
            let chunks = evaluations.div_ceil(chunk) as usize;
            let found = exec.map(chunks, |c| {
                let mut digits = vec![0usize; entries];
                let mut buf = Vec::new();
                let mut local: Option<Candidate> = None;
                let lo = c as u64 * chunk;
                for index in lo..(lo + chunk).min(evaluations) {
                    decode(index, base, &mut digits);
                    if let Some((ratio, bits)) = best_vertex_ratio(n, &to_flat(&digits), cfg.p, &mut buf) {
                        local = better(local, Some(Candidate { ratio, index, bits }));
                    }
                }
                local
            });
            let mut acc = None;
            for f in found {
                acc = better(acc, f);
                if let Some(a) = acc {
                    report.trace.push(a.ratio);
                }
            }
            report.trace.dedup();
            best = acc;
        }
        SearchStrategy::RandomRestart => {
            evaluations = cfg.budget;
            let found = exec.map(evaluations as usize, |i| {
                let mut r = rng::stream(cfg.seed, i as u64);
                let digits: Vec<usize> = (0..entries).map(|_| r.gen_range(0..base as usize)).collect();
                let mut buf = Vec::new();
                best_vertex_ratio(n, &to_flat(&digits), cfg.p, &mut buf).map(|(ratio, bits)| Candidate {
                    ratio,
                    index: i as u64,
                    bits,
                })
            });
            let mut acc = None;
            for f in found {
                let prev = acc.map(|a: Candidate| a.ratio);
                acc = better(acc, f);
                if acc.map(|a| a.ratio) != prev {
                    report.trace.push(acc.unwrap().ratio);
                }
            }
            best = acc;
        }
        SearchStrategy::GreedyCoordinate => {
            evaluations = 0;
            let mut acc: Option<Candidate> = None;
            let mut restart = 0u64;
            let mut acc_digits: Vec<usize> = Vec::new();
            let mut buf = Vec::new();
            'outer: while evaluations < cfg.budget {
                let mut r = rng::stream(cfg.seed, restart);
                let mut digits: Vec<usize> = (0..entries).map(|_| r.gen_range(0..base as usize)).collect();
                let mut current = best_vertex_ratio(n, &to_flat(&digits), cfg.p, &mut buf);
                evaluations += 1;
                loop {
                    let mut improved = false;
                    for e in 0..entries {
                        for v in 0..base as usize {
                            if v == digits[e] {
                                continue;
                            }
                            if evaluations >= cfg.budget {
                                report.flag(flags::BUDGET_EXHAUSTED);
                                if let Some((ratio, bits)) = current {
                                    let cand = Candidate { ratio, index: restart, bits };
                                    if better(acc, Some(cand)).map(|c| c.ratio) != acc.map(|c| c.ratio) {
                                        acc_digits = digits.clone();
                                    }
                                    acc = better(acc, Some(cand));
                                }
                                break 'outer;
                            }
                            let old = digits[e];
                            digits[e] = v;
                            let trial = best_vertex_ratio(n, &to_flat(&digits), cfg.p, &mut buf);
                            evaluations += 1;
                            let gain = match (trial, current) {
                                (Some(t), Some(c)) => t.0 > c.0 + 1e-15,
                                (Some(_), None) => true,
                                _ => false,
                            };
                            if gain {
                                current = trial;
                                improved = true;
                            } else {
                                digits[e] = old;
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                if let Some((ratio, bits)) = current {
                    let cand = Candidate { ratio, index: restart, bits };
                    let prev = acc.map(|c| c.ratio);
                    acc = better(acc, Some(cand));
                    if acc.map(|c| c.ratio) != prev {
                        acc_digits = digits.clone();
                        report.trace.push(ratio);
                    }
                }
                restart += 1;
            }
            // Greedy candidates are identified by their digits, not an index.
            best = acc.map(|mut c| {
                c.index = u64::MAX;
                c
            });
            if let Some(c) = best {
                let flat = to_flat(&acc_digits);
                return finish_search(cfg, report, c, &flat, evaluations, exec, started);
            }
        }
    }
    let Some(best) = best else {
        return Err(Error::Degenerate("every candidate table was zero".into()));
    };
    let digits: Vec<usize> = match cfg.strategy {
        SearchStrategy::RandomRestart => {
            let mut r = rng::stream(cfg.seed, best.index);
            (0..entries).map(|_| r.gen_range(0..base as usize)).collect()
        }
        _ => {
            let mut d = vec![0usize; entries];
            decode(best.index, base, &mut d);
            d
        }
    };
    let flat = to_flat(&digits);
    finish_search(cfg, report, best, &flat, evaluations, exec, started)
}

fn finish_search(
    cfg: &SearchConfig,
    mut report: EstimateReport,
    best: Candidate,
    flat: &[f64],
    evaluations: u64,
    exec: Exec,
    started: Instant,
) -> Result<EstimateReport> {
    let inst = WalshPaleyInstance::from_flat_scalar(cfg.depth, flat)?;
    let alpha = TransformCoefficients::vertex(cfg.depth, best.bits);
    let exact = wp_transform_ratio(&inst, &alpha, cfg.p, None, exec)?;
    let cap = p_star(cfg.p) - 1.0;
    if exact.ratio > cap + 1e-9 {
        return Err(Error::Assertion(format!(
            "ratio {} exceeds the UMD constant {cap} at p = {}",
            exact.ratio, cfg.p
        )));
    }
    report.best_ratio = exact.ratio;
    if report.trace.last() != Some(&exact.ratio) {
        report.trace.push(exact.ratio);
    }
    report.details = serde_json::json!({
        "strategy": cfg.strategy,
        "evaluations": evaluations,
        "instance": inst,
        "alpha": alpha,
        "values": cfg.values,
    });
    Ok(report.finish(started))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremePointCheck {
    pub grid_max: f64,
    pub vertex_max: f64,
    pub holds: bool,
}

/// Compares the best ratio over a uniform α-grid in [−1, 1]^n with the best
/// over the sign vertices.
pub fn verify_extreme_point(
    inst: &WalshPaleyInstance,
    p: f64,
    grid_steps: usize,
    exec: Exec,
) -> Result<ExtremePointCheck> {
    let n = inst.depth();
    if n > 12 {
        return Err(domain("depth", format!("{n} > 12")));
    }
    if grid_steps < 2 {
        return Err(domain("grid_steps", "need at least 2 steps"));
    }
    let mut vertex_max: f64 = 0.0;
    for bits in 0..1usize << n {
        let r = wp_transform_ratio(inst, &TransformCoefficients::vertex(n, bits), p, None, Exec::Sequential)?;
        vertex_max = vertex_max.max(r.ratio);
    }
    let total = grid_steps.checked_pow(n as u32).ok_or_else(|| domain("grid_steps", "grid too large"))?;
    let values = exec.map(total, |mut i| {
        let alpha: Vec<f64> = (0..n)
            .map(|_| {
                let s = i % grid_steps;
                i /= grid_steps;
                -1.0 + 2.0 * s as f64 / (grid_steps - 1) as f64
            })
            .collect();
        let alpha = TransformCoefficients::new(alpha).expect("grid lies in [-1, 1]");
        wp_transform_ratio(inst, &alpha, p, None, Exec::Sequential).map(|r| r.ratio)
    });
    let mut grid_max: f64 = 0.0;
    for v in values {
        grid_max = grid_max.max(v?);
    }
    Ok(ExtremePointCheck {
        grid_max,
        vertex_max,
        holds: grid_max <= vertex_max + 1e-9,
    })
}
