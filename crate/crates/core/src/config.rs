//! Experiment configuration files (TOML) and the runner that turns one into
//! a directory of CSV, JSON and GFN1 outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    grid_stability, headline_experiment, rotation_equality, sigma_n_experiment, HeadlineConfig, SigmaNConfig,
};
use crate::exec::Exec;
use crate::martingale::{umd_lower_bound_search, SearchConfig, SearchStrategy};
use crate::matrix::{NamedMatrix, TransformMatrix};
use crate::multiplier::GridFunction;
use crate::rng;
use crate::stochastic::{deterministic_bilinear, mc_bilinear_pairs, BilinearMode, MCConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub headline: Option<HeadlineSection>,
    pub sigma_n: Option<SigmaNSection>,
    pub rotation: Option<RotationSection>,
    pub mc: Option<McSection>,
    pub umd: Option<UmdSection>,
}

/// Seed tags of the sections, so every section draws an independent stream.
pub mod tags {
    pub const HEADLINE: u64 = 1;
    pub const SIGMA_N: u64 = 2;
    pub const ROTATION: u64 = 3;
    pub const MC: u64 = 4;
    pub const UMD: u64 = 5;
    pub const MC_PAIRS: u64 = 6;
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadlineSection {
    #[serde(default = "headline_ps")]
    pub ps: Vec<f64>,
    #[serde(default = "headline_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "fifty")]
    pub restarts: usize,
    #[serde(default = "three_hundred")]
    pub iters: usize,
    #[serde(default = "yes")]
    pub duality: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaNSection {
    #[serde(default = "sigma_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "sigma_grid")]
    pub grid: usize,
    #[serde(default = "twenty")]
    pub restarts: usize,
    #[serde(default = "two_hundred")]
    pub iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSection {
    #[serde(default = "rotation_ps")]
    pub ps: Vec<f64>,
    #[serde(default = "sixty_four")]
    pub n: usize,
    #[serde(default = "fifty")]
    pub restarts: usize,
    #[serde(default = "three_hundred")]
    pub iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "three")]
    pub pairs: usize,
    #[serde(default = "one")]
    pub band: usize,
    #[serde(default = "eight")]
    pub grid: usize,
    #[serde(default = "mc_paths")]
    pub paths: usize,
    #[serde(default = "mc_step")]
    pub step: f64,
    #[serde(default = "mc_horizon")]
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UmdSection {
    #[serde(default = "three")]
    pub depth: usize,
    #[serde(default = "four")]
    pub p: f64,
    #[serde(default = "exhaustive")]
    pub strategy: SearchStrategy,
    #[serde(default = "umd_budget")]
    pub budget: u64,
}

fn headline_ps() -> Vec<f64> {
    vec![2.0, 3.0, 4.0]
}
fn headline_ns() -> Vec<usize> {
    vec![32, 64]
}
fn sigma_ns() -> Vec<usize> {
    vec![1, 2, 4, 8, 16]
}
fn rotation_ps() -> Vec<f64> {
    vec![2.0, 4.0]
}
fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}
fn two() -> f64 {
    2.0
}
fn three() -> usize {
    3
}
fn four() -> f64 {
    4.0
}
fn eight() -> usize {
    8
}
fn twenty() -> usize {
    20
}
fn fifty() -> usize {
    50
}
fn sixty_four() -> usize {
    64
}
fn two_hundred() -> usize {
    200
}
fn three_hundred() -> usize {
    300
}
fn sigma_grid() -> usize {
    256
}
fn mc_paths() -> usize {
    2000
}
fn mc_step() -> f64 {
    1e-3
}
fn mc_horizon() -> f64 {
    20.0
}
fn exhaustive() -> SearchStrategy {
    SearchStrategy::ExhaustiveSmall
}
fn umd_budget() -> u64 {
    1_000_000
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::Config {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// Random mean-zero pairs of the given band used by the Monte-Carlo section,
/// reproducible from the seed.
pub fn mc_pairs(seed: u64, count: usize, grid: usize, band: usize) -> Result<Vec<(GridFunction, GridFunction)>> {
    let mut r = rng::stream(rng::derive_seed(seed, tags::MC_PAIRS), 0);
    (0..count)
        .map(|_| {
            Ok((
                GridFunction::random_trig(2, grid, band, true, &mut r)?,
                GridFunction::random_trig(2, grid, band, true, &mut r)?,
            ))
        })
        .collect()
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Runs every configured section and writes the results to a fresh
/// timestamped directory under `out_dir` (or `out_override`), which is
/// returned.
pub fn report_bundle(config_text: &str, out_override: Option<&Path>, exec: Exec) -> Result<PathBuf> {
    let cfg = ExperimentConfig::parse(config_text)?;
    let root = out_override.unwrap_or(&cfg.out_dir);
    let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S");
    let mut dir = root.join(format!("run-{stamp}"));
    let mut suffix = 1;
    while dir.exists() {
        dir = root.join(format!("run-{stamp}-{suffix}"));
        suffix += 1;
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.toml"), config_text)?;
    let mut manifest = serde_json::json!({
        "seed": cfg.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "parallel": exec.is_parallel(),
        "sections": {},
    });

    if let Some(h) = &cfg.headline {
        let hc = HeadlineConfig {
            ps: h.ps.clone(),
            ns: h.ns.clone(),
            restarts: h.restarts,
            iters: h.iters,
            seed: rng::derive_seed(cfg.seed, tags::HEADLINE),
            duality: h.duality,
        };
        let table = headline_experiment(&hc, exec)?;
        fs::write(dir.join("headline.csv"), table.to_csv())?;
        fs::write(dir.join("headline_duality.csv"), table.duality_csv())?;
        let witness_dir = dir.join("witnesses");
        fs::create_dir_all(&witness_dir)?;
        let mut files = Vec::new();
        for (p, n, w) in &table.witnesses {
            let name = format!("headline_p{p}_n{n}.gfn");
            w.save(witness_dir.join(&name))?;
            files.push(name);
        }
        write_json(
            &dir.join("headline.json"),
            &serde_json::json!({
                "config": hc,
                "table": table,
                "grid_stability": grid_stability(&table, 0.02),
                "witnesses": files,
            }),
        )?;
        manifest["sections"]["headline"] = serde_json::json!({ "seed": hc.seed });
    }

    if let Some(s) = &cfg.sigma_n {
        let sc = SigmaNConfig {
            ns: s.ns.clone(),
            p: s.p,
            grid: s.grid,
            restarts: s.restarts,
            iters: s.iters,
            seed: rng::derive_seed(cfg.seed, tags::SIGMA_N),
        };
        let table = sigma_n_experiment(&sc, exec)?;
        fs::write(dir.join("sigma_n.csv"), table.to_csv())?;
        write_json(&dir.join("sigma_n.json"), &serde_json::json!({ "config": sc, "table": table }))?;
        manifest["sections"]["sigma_n"] = serde_json::json!({ "seed": sc.seed });
    }

    if let Some(r) = &cfg.rotation {
        let seed = rng::derive_seed(cfg.seed, tags::ROTATION);
        let mut rows = Vec::new();
        let mut csv = String::from("p,n,re_direct,im_direct,re_from_im,im_from_re,re_estimate,im_estimate,difference\n");
        for &p in &r.ps {
            let eq = rotation_equality(p, r.n, r.restarts, r.iters, seed, exec)?;
            csv.push_str(&format!(
                "{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.3e}\n",
                eq.p, eq.n, eq.re_direct, eq.im_direct, eq.re_from_im, eq.im_from_re, eq.re_estimate, eq.im_estimate, eq.difference
            ));
            rows.push(eq);
        }
        fs::write(dir.join("rotation.csv"), csv)?;
        write_json(&dir.join("rotation.json"), &serde_json::json!({ "config": r, "rows": rows }))?;
        manifest["sections"]["rotation"] = serde_json::json!({ "seed": seed });
    }

    if let Some(m) = &cfg.mc {
        let seed = rng::derive_seed(cfg.seed, tags::MC);
        let pairs = mc_pairs(cfg.seed, m.pairs, m.grid, m.band)?;
        let refs: Vec<(&GridFunction, &GridFunction)> = pairs.iter().map(|(f, g)| (f, g)).collect();
        let names = ["identity", "a_s", "j"];
        let mats = [
            TransformMatrix::identity(2),
            TransformMatrix::named(NamedMatrix::As)?,
            TransformMatrix::named(NamedMatrix::J)?,
        ];
        let mcfg = MCConfig::new(m.paths, m.step, m.horizon, seed)?;
        let est = mc_bilinear_pairs(&mats, &refs, &mcfg, exec)?;
        let mut csv = String::from("pair,matrix,spectral_exact,estimate,stderr,within\n");
        let mut rows = Vec::new();
        for (q, (f, g)) in pairs.iter().enumerate() {
            for ((name, a), e) in names.iter().zip(&mats).zip(&est[q]) {
                let exact = deterministic_bilinear(a, f, g, BilinearMode::SpectralExact)?;
                let within = (e.estimate - exact).abs() <= (3.0 * e.stderr).max(0.02 * exact.abs());
                csv.push_str(&format!("{q},{name},{exact:.12},{:.12},{:.12},{within}\n", e.estimate, e.stderr));
                rows.push(serde_json::json!({
                    "pair": q, "matrix": name, "spectral_exact": exact,
                    "estimate": e, "within": within,
                }));
            }
        }
        fs::write(dir.join("mc.csv"), csv)?;
        write_json(&dir.join("mc.json"), &serde_json::json!({ "config": m, "mc": mcfg, "rows": rows }))?;
        manifest["sections"]["mc"] = serde_json::json!({ "seed": seed });
    }

    if let Some(u) = &cfg.umd {
        let mut sc = SearchConfig::new(u.depth, u.p, u.strategy);
        sc.budget = u.budget;
        sc.seed = rng::derive_seed(cfg.seed, tags::UMD);
        let report = umd_lower_bound_search(&sc, exec)?;
        write_json(&dir.join("umd.json"), &report)?;
        manifest["sections"]["umd"] = serde_json::json!({ "seed": sc.seed });
    }

    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(dir)
}
