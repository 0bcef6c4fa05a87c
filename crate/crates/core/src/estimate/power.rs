//! Lower bounds for ‖T_m ⊗ S : L^p_X → L^p_Y‖ by nonlinear power iteration.
//!
//! One step maps f to J_X*(T* J_Y(Tf)), projected back onto the band, where
//! J_Y sends g to its norming functional in L^{p'}_{Y*} and J_X* goes back
//! from L^{p'}_{X*} to L^p_X. Norms are Riemann sums on a grid `oversample`
//! times finer than the witness grid.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::fft;
use crate::martingale::OperatorMatrix;
use crate::multiplier::{is_nyquist, GridFunction, Multiplier, PointNorm};
use crate::report::{flags, EstimateReport};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitFamily {
    /// Student-t(2) point values, band-projected.
    #[default]
    HeavyTailed,
    /// Standard normal point values, band-projected.
    Gaussian,
    /// One random mode per component.
    SingleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub p: f64,
    /// Witness grid; modes satisfy |k_i| < N/2.
    pub n: usize,
    pub oversample: usize,
    pub iters: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Relative gain below which a step counts as stagnant.
    pub tol: f64,
    /// Stagnant steps tolerated before stopping.
    pub patience: usize,
    pub init: InitFamily,
}

impl PowerConfig {
    pub fn new(p: f64, n: usize) -> Self {
        Self {
            p,
            n,
            oversample: 2,
            iters: 300,
            restarts: 50,
            seed: 0,
            tol: 1e-10,
            patience: 20,
            init: InitFamily::HeavyTailed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(domain("p", format!("exponent {} must lie in (1, ∞)", self.p)));
        }
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(domain("n", format!("grid size {} must be a power of two ≥ 4", self.n)));
        }
        if self.oversample == 0 || !self.oversample.is_power_of_two() {
            return Err(domain("oversample", "must be a power of two"));
        }
        if self.iters == 0 {
            return Err(domain("iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// An operator T_m ⊗ S acting on vector-valued functions.
#[derive(Debug, Clone)]
pub struct PowerTarget {
    pub m: Multiplier,
    /// Identity on scalars when absent.
    pub s: Option<OperatorMatrix>,
}

impl PowerTarget {
    pub fn scalar(m: Multiplier) -> Self {
        Self { m, s: None }
    }

    pub fn input_dim(&self) -> usize {
        self.s.as_ref().map_or(1, |s| s.cols)
    }

    pub fn output_dim(&self) -> usize {
        self.s.as_ref().map_or(1, |s| s.rows)
    }

    pub fn input_norm(&self) -> PointNorm {
        self.s.as_ref().map_or(PointNorm::L2, |s| s.input_norm)
    }

    pub fn output_norm(&self) -> PointNorm {
        self.s.as_ref().map_or(PointNorm::L2, |s| s.output_norm)
    }
}

#[derive(Debug, Clone)]
pub struct PowerEstimate {
    pub report: EstimateReport,
    /// Best function found, on the N-point grid.
    pub witness: GridFunction,
}

/// Grid buffers shared by every restart.
struct Workspace {
    dim: usize,
    fine: usize,
    points: usize,
    symbol: Vec<Complex64>,
    adjoint: Vec<Complex64>,
    band: Vec<bool>,
}

impl Workspace {
    fn new(m: &Multiplier, n: usize, oversample: usize) -> Self {
        let dim = m.dim();
        let fine = n * oversample;
        let table = m.table(fine);
        let points = table.len();
        let mut idx = vec![0usize; dim];
        let band: Vec<bool> = (0..points)
            .map(|flat| {
                fft::unravel(flat, dim, fine, &mut idx);
                !is_nyquist(&idx, fine)
                    && idx
                        .iter()
                        .all(|&i| (2 * fft::freq(i, fine).unsigned_abs() as usize) < n)
            })
            .collect();
        let symbol: Vec<Complex64> = table.iter().zip(&band).map(|(v, &b)| if b { *v } else { 0.0.into() }).collect();
        let adjoint = symbol.iter().map(|v| v.conj()).collect();
        Self {
            dim,
            fine,
            points,
            symbol,
            adjoint,
            band,
        }
    }

    /// Multiplies every component by `table` in frequency.
    fn apply(&self, table: &[Complex64], comps: &mut [Vec<Complex64>]) {
        for c in comps.iter_mut() {
            fft::forward(c, self.dim, self.fine);
            for (v, m) in c.iter_mut().zip(table) {
                *v *= m;
            }
            fft::inverse(c, self.dim, self.fine);
            c.iter_mut().for_each(|v| v.im = 0.0);
        }
    }

    fn project(&self, comps: &mut [Vec<Complex64>]) {
        for c in comps.iter_mut() {
            fft::forward(c, self.dim, self.fine);
            for (v, &b) in c.iter_mut().zip(&self.band) {
                if !b {
                    *v = Complex64::default();
                }
            }
            fft::inverse(c, self.dim, self.fine);
            c.iter_mut().for_each(|v| v.im = 0.0);
        }
    }
}

#[inline]
fn pow_abs(x: f64, e: f64) -> f64 {
    let a = x.abs();
    if e == 1.0 {
        a
    } else if e == 2.0 {
        a * a
    } else if e == 3.0 {
        a * a * a
    } else if e == 4.0 {
        (a * a) * (a * a)
    } else {
        a.powf(e)
    }
}

fn point_norm(norm: PointNorm, comps: &[Vec<Complex64>], j: usize) -> f64 {
    match norm {
        PointNorm::L1 => comps.iter().map(|c| c[j].re.abs()).sum(),
        PointNorm::L2 => comps.iter().map(|c| c[j].re * c[j].re).sum::<f64>().sqrt(),
        PointNorm::LInf => comps.iter().map(|c| c[j].re.abs()).fold(0.0, f64::max),
    }
}

fn mixed_norm(norm: PointNorm, p: f64, comps: &[Vec<Complex64>]) -> f64 {
    let points = comps[0].len();
    let s: f64 = (0..points).map(|j| pow_abs(point_norm(norm, comps, j), p)).sum();
    (s / points as f64).powf(1.0 / p)
}

fn dual_norm(norm: PointNorm) -> PointNorm {
    match norm {
        PointNorm::L1 => PointNorm::LInf,
        PointNorm::L2 => PointNorm::L2,
        PointNorm::LInf => PointNorm::L1,
    }
}

/// Pointwise v ↦ |v|^{e}·u(v), with u(v) the unit vector of the dual point
/// norm norming v. Overwrites `comps`.
fn duality_map(norm: PointNorm, e: f64, comps: &mut [Vec<Complex64>]) {
    let points = comps[0].len();
    let k = comps.len();
    for j in 0..points {
        let r = point_norm(norm, comps, j);
        if r == 0.0 {
            continue;
        }
        let w = pow_abs(r, e);
        match norm {
            PointNorm::L2 => {
                for c in comps.iter_mut() {
                    c[j].re *= w / r;
                }
            }
            // norming functional of ℓ¹ is the sign vector
            PointNorm::L1 => {
                for c in comps.iter_mut() {
                    c[j].re = w * c[j].re.signum() * f64::from(c[j].re != 0.0);
                }
            }
            // norming functional of ℓ^∞ sits on the first largest coordinate
            PointNorm::LInf => {
                let mut best = 0;
                for i in 1..k {
                    if comps[i][j].re.abs() > comps[best][j].re.abs() {
                        best = i;
                    }
                }
                let s = comps[best][j].re.signum();
                for (i, c) in comps.iter_mut().enumerate() {
                    c[j].re = if i == best { w * s } else { 0.0 };
                }
            }
        }
    }
}

fn apply_s(s: Option<&OperatorMatrix>, comps: &[Vec<Complex64>], transpose: bool) -> Vec<Vec<Complex64>> {
    let Some(s) = s else {
        return comps.to_vec();
    };
    let (rows, cols) = if transpose { (s.cols, s.rows) } else { (s.rows, s.cols) };
    let points = comps[0].len();
    let mut out = vec![vec![Complex64::default(); points]; rows];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..cols {
            let a = if transpose { s.get(j, i) } else { s.get(i, j) };
            if a != 0.0 {
                for (x, y) in o.iter_mut().zip(&comps[j]) {
                    x.re += a * y.re;
                }
            }
        }
    }
    out
}

struct Run {
    ratio: f64,
    trace: Vec<f64>,
    witness: Vec<Vec<Complex64>>,
    stagnated: bool,
}

fn ratio(ws: &Workspace, target: &PowerTarget, p: f64, f: &[Vec<Complex64>]) -> (f64, Vec<Vec<Complex64>>) {
    let mut g = apply_s(target.s.as_ref(), f, false);
    ws.apply(&ws.symbol, &mut g);
    let den = mixed_norm(target.input_norm(), p, f);
    let r = if den > 0.0 {
        mixed_norm(target.output_norm(), p, &g) / den
    } else {
        0.0
    };
    (r, g)
}

fn ascend(ws: &Workspace, target: &PowerTarget, cfg: &PowerConfig, mut f: Vec<Vec<Complex64>>) -> Run {
    let p = cfg.p;
    let q = p / (p - 1.0);
    ws.project(&mut f);
    let (mut current, mut g) = ratio(ws, target, p, &f);
    let mut trace = vec![current];
    let mut stale = 0;
    let mut stagnated = false;
    for _ in 1..cfg.iters {
        // f ← J_X*(T* J_Y(T f)), then the band projection
        duality_map(target.output_norm(), p - 1.0, &mut g);
        ws.apply(&ws.adjoint, &mut g);
        let mut h = apply_s(target.s.as_ref(), &g, true);
        duality_map(dual_norm(target.input_norm()), q - 1.0, &mut h);
        ws.project(&mut h);
        let scale = mixed_norm(target.input_norm(), p, &h);
        if !(scale > 0.0 && scale.is_finite()) {
            stagnated = true;
            break;
        }
        h.iter_mut().flatten().for_each(|v| v.re /= scale);
        let (mut r, mut gh) = ratio(ws, target, p, &h);
        if r < current {
            // damped steps towards the candidate before giving up
            let mut accepted = false;
            for t in [0.5, 0.25, 0.125] {
                let mix: Vec<Vec<Complex64>> = f
                    .iter()
                    .zip(&h)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect())
                    .collect();
                let (rm, gm) = ratio(ws, target, p, &mix);
                if rm >= current {
                    h = mix;
                    r = rm;
                    gh = gm;
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                stagnated = true;
                break;
            }
        }
        if r - current <= cfg.tol * current {
            stale += 1;
        } else {
            stale = 0;
        }
        f = h;
        g = gh;
        current = r;
        trace.push(current);
        if stale >= cfg.patience {
            stagnated = true;
            break;
        }
    }
    Run {
        ratio: current,
        trace,
        witness: f,
        stagnated,
    }
}

fn initial<R: Rng>(ws: &Workspace, family: InitFamily, n: usize, comps: usize, r: &mut R) -> Vec<Vec<Complex64>> {
    match family {
        InitFamily::HeavyTailed => {
            let t = StudentT::new(2.0).expect("two degrees of freedom");
            (0..comps)
                .map(|_| (0..ws.points).map(|_| Complex64::new(r.sample(t), 0.0)).collect())
                .collect()
        }
        InitFamily::Gaussian => (0..comps)
            .map(|_| {
                (0..ws.points)
                    .map(|_| Complex64::new(r.sample(StandardNormal), 0.0))
                    .collect()
            })
            .collect(),
        InitFamily::SingleMode => {
            let half = (n / 2) as i64;
            (0..comps)
                .map(|_| {
                    let k: Vec<i64> = (0..ws.dim).map(|_| r.gen_range(-half + 1..half)).collect();
                    let phase = r.gen_range(0.0..std::f64::consts::TAU);
                    let mut idx = vec![0usize; ws.dim];
                    (0..ws.points)
                        .map(|flat| {
                            fft::unravel(flat, ws.dim, ws.fine, &mut idx);
                            let x: f64 = idx
                                .iter()
                                .zip(&k)
                                .map(|(&i, &kk)| kk as f64 * crate::multiplier::grid_point(i, ws.fine))
                                .sum();
                            Complex64::new((x + phase).cos(), 0.0)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

/// The band mode where |m| peaks, as a real cosine on the fine grid. A single
/// mode has ratio exactly |m(k)| for every p, and at p = 2 this is the norm.
fn peak_mode(ws: &Workspace) -> Vec<Vec<Complex64>> {
    let mut best = None;
    let mut top = 0.0;
    for (flat, v) in ws.symbol.iter().enumerate() {
        if flat != 0 && v.norm() > top {
            top = v.norm();
            best = Some(flat);
        }
    }
    let mut idx = vec![0usize; ws.dim];
    let k: Vec<f64> = match best {
        Some(flat) => {
            fft::unravel(flat, ws.dim, ws.fine, &mut idx);
            idx.iter().map(|&i| fft::freq(i, ws.fine) as f64).collect()
        }
        None => vec![0.0; ws.dim],
    };
    let values = (0..ws.points)
        .map(|flat| {
            fft::unravel(flat, ws.dim, ws.fine, &mut idx);
            let x: f64 = idx
                .iter()
                .zip(&k)
                .map(|(&i, kk)| kk * crate::multiplier::grid_point(i, ws.fine))
                .sum();
            Complex64::new(x.cos(), 0.0)
        })
        .collect();
    vec![values]
}

fn to_components(f: &GridFunction, fine: usize) -> Result<Vec<Vec<Complex64>>> {
    let g = f.regrid(fine)?;
    Ok((0..g.value_dim())
        .map(|c| g.component(c).iter().map(|v| Complex64::new(v.re, 0.0)).collect())
        .collect())
}

/// Power iteration from `restarts` random starts plus any warm starts (which
/// come first in restart order). Scalar targets get one more start, the
/// single mode where |m| peaks, after the random ones. The report's trace
/// belongs to the best run and is nondecreasing.
pub fn power_iterate_lp(
    target: &PowerTarget,
    cfg: &PowerConfig,
    warm_starts: &[GridFunction],
    exec: Exec,
) -> Result<PowerEstimate> {
    let started = Instant::now();
    cfg.validate()?;
    let dim = target.m.dim();
    let comps = target.input_dim();
    for w in warm_starts {
        if w.dim() != dim || w.value_dim() != comps {
            return Err(Error::DimensionMismatch {
                expected: comps,
                found: w.value_dim(),
            });
        }
        if w.n() > cfg.n {
            return Err(domain("warm_starts", format!("grid {} exceeds N = {}", w.n(), cfg.n)));
        }
    }
    let total = warm_starts.len() + cfg.restarts;
    if total == 0 {
        return Err(domain("restarts", "need at least one start"));
    }
    let ws = Workspace::new(&target.m, cfg.n, cfg.oversample);
    let warm: Vec<Vec<Vec<Complex64>>> = warm_starts
        .iter()
        .map(|w| to_components(w, ws.fine))
        .collect::<Result<_>>()?;
    let peak = target.s.is_none() && comps == 1;
    let runs = exec.map(total + usize::from(peak), |i| {
        let start = if i < warm.len() {
            warm[i].clone()
        } else if i == total {
            peak_mode(&ws)
        } else {
            let mut r = rng::stream(cfg.seed, (i - warm.len()) as u64);
            initial(&ws, cfg.init, cfg.n, comps, &mut r)
        };
        ascend(&ws, target, cfg, start)
    });
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.ratio > runs[best].ratio {
            best = i;
        }
    }
    let run = &runs[best];
    let mut report = EstimateReport::new(target.m.name().to_string(), cfg.p, cfg.seed);
    report.grid = Some(cfg.n);
    report.best_ratio = run.ratio;
    report.trace = run.trace.clone();
    if run.stagnated {
        report.flag(flags::STAGNATED);
    }
    report.details = serde_json::json!({
        "restart_ratios": runs.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        "best_restart": best,
        "warm_starts": warm.len(),
        "peak_mode_start": peak,
        "oversample": cfg.oversample,
        "iters": cfg.iters,
        "init": cfg.init,
    });
    let values: Vec<Complex64> = run.witness.iter().flatten().copied().collect();
    let fine = GridFunction::from_values(dim, ws.fine, comps, values, true)?;
    let witness = fine.regrid(cfg.n)?;
    Ok(PowerEstimate {
        report: report.finish(started),
        witness,
    })
}
