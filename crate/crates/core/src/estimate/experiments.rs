//! Experiment drivers: the m₀ lower-bound table, the rotation equality
//! between the real and imaginary parts of the Beurling–Ahlfors symbol, and
//! the growth of the conjugation operator tensored with summation
//! operators.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::multiplier_ratio;
use super::power::{power_iterate_lp, PowerConfig, PowerEstimate, PowerTarget};
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::martingale::summation_operator;
use crate::multiplier::{dual_exponent, p_star, GridFunction, Multiplier, NamedMultiplier};

/// Slack allowed on the p* − 1 cap.
pub const CAP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadlineConfig {
    pub ps: Vec<f64>,
    pub ns: Vec<usize>,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    /// Add a duality row for every p > 2.
    pub duality: bool,
}

impl Default for HeadlineConfig {
    fn default() -> Self {
        Self {
            ps: vec![2.0, 3.0, 4.0],
            ns: vec![32, 64],
            restarts: 50,
            iters: 300,
            seed: 0,
            duality: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadlineRow {
    pub p: f64,
    pub n: usize,
    pub ratio: f64,
    pub cap: f64,
    pub within_cap: bool,
    pub stagnated: bool,
    pub wall_time_s: f64,
}

/// Compares the estimate at p with the estimate at p'. The operator is
/// self-adjoint, so both bound the same norm from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub p: f64,
    pub p_dual: f64,
    pub n: usize,
    pub ratio_p: f64,
    /// Power iteration run directly at p'.
    pub ratio_dual_direct: f64,
    /// Ratio at p' of J_p(Tf) for the best witness f at p; never below
    /// `ratio_p` up to discretisation.
    pub ratio_dual_witness: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeadlineTable {
    pub rows: Vec<HeadlineRow>,
    pub duality: Vec<DualityRow>,
    #[serde(skip)]
    pub witnesses: Vec<(f64, usize, GridFunction)>,
}

impl HeadlineTable {
    pub fn row(&self, p: f64, n: usize) -> Option<&HeadlineRow> {
        self.rows.iter().find(|r| r.p == p && r.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,n,ratio,cap,within_cap,stagnated,wall_time_s\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:.12},{},{},{},{:.3}",
                r.p, r.n, r.ratio, r.cap, r.within_cap, r.stagnated, r.wall_time_s
            );
        }
        s
    }

    pub fn duality_csv(&self) -> String {
        let mut s = String::from("p,p_dual,n,ratio_p,ratio_dual_direct,ratio_dual_witness,difference\n");
        for r in &self.duality {
            let _ = writeln!(
                s,
                "{},{:.12},{},{:.12},{:.12},{:.12},{:.12}",
                r.p, r.p_dual, r.n, r.ratio_p, r.ratio_dual_direct, r.ratio_dual_witness, r.difference
            );
        }
        s
    }
}

fn m0() -> Multiplier {
    Multiplier::named(&NamedMultiplier::M0 { d: 2 }).expect("m0 is well formed")
}

fn power_config(p: f64, n: usize, restarts: usize, iters: usize, seed: u64) -> PowerConfig {
    let mut c = PowerConfig::new(p, n);
    c.restarts = restarts;
    c.iters = iters;
    c.seed = seed;
    c
}

/// J_p(T_m f) = |T_m f|^{p−1}sgn(T_m f), sampled on a grid four times finer
/// than f's (exact for p ∈ {2, 4}).
fn dual_witness(m: &Multiplier, f: &GridFunction, p: f64) -> Result<GridFunction> {
    let fine = f.regrid(4 * f.n())?;
    let g = m.apply(&fine)?;
    let values = g
        .values()
        .iter()
        .map(|v| num_complex::Complex64::new(v.re.abs().powf(p - 1.0) * v.re.signum(), 0.0))
        .collect();
    GridFunction::from_values(2, fine.n(), 1, values, true)
}

/// Lower bounds for ‖T_{m₀}‖_p over the requested grids. Each grid is warm
/// started from the previous grid's witness, so estimates can only grow
/// with N up to discretisation.
pub fn headline_experiment(cfg: &HeadlineConfig, exec: Exec) -> Result<HeadlineTable> {
    if let Some(p) = cfg.ps.iter().find(|&&p| !(p >= 2.0 && p.is_finite())) {
        return Err(domain("p", format!("{p} < 2; use the dual exponent")));
    }
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    let m = m0();
    let target = PowerTarget::scalar(m.clone());
    let mut table = HeadlineTable {
        rows: Vec::new(),
        duality: Vec::new(),
        witnesses: Vec::new(),
    };
    for &p in &cfg.ps {
        let mut previous: Option<GridFunction> = None;
        let mut last: Option<PowerEstimate> = None;
        for &n in &ns {
            let pc = power_config(p, n, cfg.restarts, cfg.iters, cfg.seed);
            let warm: Vec<GridFunction> = previous.iter().cloned().collect();
            let est = power_iterate_lp(&target, &pc, &warm, exec)?;
            let cap = p_star(p) - 1.0;
            table.rows.push(HeadlineRow {
                p,
                n,
                ratio: est.report.best_ratio,
                cap,
                within_cap: est.report.best_ratio <= cap + CAP_SLACK,
                stagnated: est.report.has_flag(crate::report::flags::STAGNATED),
                wall_time_s: est.report.wall_time_s,
            });
            table.witnesses.push((p, n, est.witness.clone()));
            previous = Some(est.witness.clone());
            last = Some(est);
        }
        if cfg.duality && p > 2.0 {
            if let Some(est) = last {
                let n = *ns.last().expect("at least one grid");
                let q = dual_exponent(p);
                let direct = power_iterate_lp(&target, &power_config(q, n, cfg.restarts, cfg.iters, cfg.seed), &[], exec)?;
                let w = dual_witness(&m, &est.witness, p)?;
                let via = multiplier_ratio(&m, &w, None, q, 2)?;
                let best_dual = direct.report.best_ratio.max(via);
                table.duality.push(DualityRow {
                    p,
                    p_dual: q,
                    n,
                    ratio_p: est.report.best_ratio,
                    ratio_dual_direct: direct.report.best_ratio,
                    ratio_dual_witness: via,
                    difference: (best_dual - est.report.best_ratio).abs(),
                });
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStability {
    pub p: f64,
    pub ns: Vec<usize>,
    pub ratios: Vec<f64>,
    /// Consecutive ratios never drop by more than the band.
    pub nondecreasing: bool,
}

/// Per exponent, whether the estimates grow with N up to `band`.
pub fn grid_stability(table: &HeadlineTable, band: f64) -> Vec<GridStability> {
    let mut ps: Vec<f64> = Vec::new();
    for r in &table.rows {
        if !ps.contains(&r.p) {
            ps.push(r.p);
        }
    }
    ps.iter()
        .map(|&p| {
            let mut rows: Vec<&HeadlineRow> = table.rows.iter().filter(|r| r.p == p).collect();
            rows.sort_by_key(|r| r.n);
            let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
            GridStability {
                p,
                ns: rows.iter().map(|r| r.n).collect(),
                nondecreasing: ratios.windows(2).all(|w| w[1] >= w[0] - band),
                ratios,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationEquality {
    pub p: f64,
    pub n: usize,
    pub re_direct: f64,
    pub im_direct: f64,
    /// Ratio for Re(BA) of the imaginary-part witness moved by the lattice map.
    pub re_from_im: f64,
    /// Ratio for Im(BA) of the real-part witness moved by the lattice map.
    pub im_from_re: f64,
    pub re_estimate: f64,
    pub im_estimate: f64,
    pub difference: f64,
}

/// m₀∘A = Im(BA) for A = [[1, −1], [1, 1]] and Im(BA)∘A' = m₀ for
/// A' = [[1, 1], [−1, 1]]: both symbols are the same up to a π/4 rotation,
/// and these integer matrices realise the rotation (with a harmless √2
/// dilation) on the torus.
const TO_IM: [[i64; 2]; 2] = [[1, 1], [-1, 1]];
const TO_RE: [[i64; 2]; 2] = [[1, -1], [1, 1]];

fn rows(b: [[i64; 2]; 2]) -> Vec<Vec<i64>> {
    b.iter().map(|r| r.to_vec()).collect()
}

/// Estimates ‖Re(BA)‖_p and ‖Im(BA)‖_p with the same seeds, then moves each
/// witness to the other operator. If g(x) = f(Bᵀx) then
/// ‖T_m g‖_p/‖g‖_p = ‖T_{m∘Bᵀ} f‖_p/‖f‖_p, so every witness for one symbol
/// is a witness of equal ratio for the other.
pub fn rotation_equality(p: f64, n: usize, restarts: usize, iters: usize, seed: u64, exec: Exec) -> Result<RotationEquality> {
    let re = Multiplier::named(&NamedMultiplier::BaReal)?;
    let im = Multiplier::named(&NamedMultiplier::BaImag)?;
    let pc = power_config(p, n, restarts, iters, seed);
    let re_est = power_iterate_lp(&PowerTarget::scalar(re.clone()), &pc, &[], exec)?;
    let im_est = power_iterate_lp(&PowerTarget::scalar(im.clone()), &pc, &[], exec)?;
    let im_witness = re_est.witness.lattice_map(&rows(TO_IM), 2 * n)?;
    let re_witness = im_est.witness.lattice_map(&rows(TO_RE), 2 * n)?;
    let im_from_re = multiplier_ratio(&im, &im_witness, None, p, 2)?;
    let re_from_im = multiplier_ratio(&re, &re_witness, None, p, 2)?;
    let re_estimate = re_est.report.best_ratio.max(re_from_im);
    let im_estimate = im_est.report.best_ratio.max(im_from_re);
    Ok(RotationEquality {
        p,
        n,
        re_direct: re_est.report.best_ratio,
        im_direct: im_est.report.best_ratio,
        re_from_im,
        im_from_re,
        re_estimate,
        im_estimate,
        difference: (re_estimate - im_estimate).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaNConfig {
    pub ns: Vec<usize>,
    pub p: f64,
    pub grid: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SigmaNConfig {
    fn default() -> Self {
        Self {
            ns: vec![1, 2, 4, 8, 16],
            p: 2.0,
            grid: 256,
            restarts: 20,
            iters: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaNRow {
    pub n: usize,
    pub ratio: f64,
    pub log_n_plus_1: f64,
}

/// Least squares fit ratio ≈ a + b·log(n+1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaNTable {
    pub rows: Vec<SigmaNRow>,
    pub fit: LogFit,
}

impl SigmaNTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,ratio,log_n_plus_1\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{:.12},{:.12}", r.n, r.ratio, r.log_n_plus_1);
        }
        s
    }
}

fn log_fit(x: &[f64], y: &[f64]) -> LogFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r_squared = if syy > 0.0 { b * sxy / syy } else { 1.0 };
    LogFit { a, b, r_squared }
}

/// Zero components appended to a witness; σ_m(f, 0) restricted to the first
/// n outputs is σ_n f, so padded witnesses keep their ratio or improve it.
fn pad_components(f: &GridFunction, value_dim: usize) -> Result<GridFunction> {
    let points = f.points();
    let mut values = f.values().to_vec();
    values.resize(value_dim * points, num_complex::Complex64::default());
    GridFunction::from_values(f.dim(), f.n(), value_dim, values, f.is_real())
}

/// Lower bounds for ‖H̃ ⊗ σ_n : L^p(ℓ¹_n) → L^p(ℓ^∞_n)‖ on the circle.
/// Fails with an assertion error if the estimates decrease in n.
pub fn sigma_n_experiment(cfg: &SigmaNConfig, exec: Exec) -> Result<SigmaNTable> {
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || ns[0] == 0 {
        return Err(domain("ns", "sizes must be positive"));
    }
    let h = Multiplier::named(&NamedMultiplier::Hilbert1d)?;
    let mut rows = Vec::new();
    let mut previous: Option<GridFunction> = None;
    for &n in &ns {
        let target = PowerTarget {
            m: h.clone(),
            s: Some(summation_operator(n)?),
        };
        let pc = power_config(cfg.p, cfg.grid, cfg.restarts, cfg.iters, cfg.seed);
        let warm: Vec<GridFunction> = match &previous {
            Some(w) => vec![pad_components(w, n)?],
            None => Vec::new(),
        };
        let est = power_iterate_lp(&target, &pc, &warm, exec)?;
        rows.push(SigmaNRow {
            n,
            ratio: est.report.best_ratio,
            log_n_plus_1: ((n + 1) as f64).ln(),
        });
        previous = Some(est.witness);
    }
    for w in rows.windows(2) {
        if w[1].ratio < w[0].ratio - 1e-9 {
            return Err(Error::Assertion(format!(
                "estimate decreased from {} at n = {} to {} at n = {}",
                w[0].ratio, w[0].n, w[1].ratio, w[1].n
            )));
        }
    }
    let x: Vec<f64> = rows.iter().map(|r| r.log_n_plus_1).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    Ok(SigmaNTable { fit: log_fit(&x, &y), rows })
}
