use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rieszlab_core::config::report_bundle;
use rieszlab_core::estimate::{
    grid_stability, headline_experiment, power_iterate_lp, sigma_n_experiment, HeadlineConfig, PowerConfig,
    PowerTarget, SigmaNConfig,
};
use rieszlab_core::martingale::{
    gaussian_block_ratio, umd_lower_bound_search, GaussEval, GaussianBlockInstance, SearchConfig, SearchStrategy,
};
use rieszlab_core::matrix::{NamedMatrix, TransformMatrix};
use rieszlab_core::multiplier::{p_star, GridFunction, Multiplier, NamedMultiplier, Parity};
use rieszlab_core::spectral::{
    even_decompose, even_reconstruct_pointwise, rotations_decompose_odd_2d, rotations_reconstruct, EvenQuadrature,
    RotationRule,
};
use rieszlab_core::stochastic::{deterministic_bilinear, mc_bilinear, BilinearMode, MCConfig};
use rieszlab_core::{rng, Error, Exec};

#[derive(Parser)]
#[command(name = "rieszlab", version, about = "Fourier multiplier and martingale transform norm experiments")]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a named multiplier to a GFN1 grid function.
    Apply(ApplyArgs),
    /// Lower-bound ‖T_m‖_p by power iteration.
    NormEstimate(NormArgs),
    /// Search quantized Walsh–Paley instances for a UMD lower bound.
    UmdSearch(UmdArgs),
    /// Ratio of a Gaussian block martingale transform.
    GaussRatio(GaussArgs),
    /// Compare the Monte-Carlo bilinear form with its spectral value.
    McVerify(McArgs),
    /// Decompose a plane symbol into Poisson-type or rotation integrals.
    Decompose(DecomposeArgs),
    /// Lower bounds for ‖T_{m0}‖_p over a grid of p and N.
    Headline(HeadlineArgs),
    /// Growth of the conjugation operator tensored with summation operators.
    SigmaN(SigmaNArgs),
    /// Run an experiment config and write a report directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct ApplyArgs {
    /// hilbert, m0, m0-3d, riesz1, riesz2, riesz3, ba-re, ba-im
    #[arg(long)]
    symbol: String,
    /// Input GFN1 file; when absent a random mean-zero input is generated.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the best witness (GFN1).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    ExhaustiveSmall,
    RandomRestart,
    GreedyCoordinate,
}

impl From<Strategy> for SearchStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::ExhaustiveSmall => SearchStrategy::ExhaustiveSmall,
            Strategy::RandomRestart => SearchStrategy::RandomRestart,
            Strategy::GreedyCoordinate => SearchStrategy::GreedyCoordinate,
        }
    }
}

#[derive(Args)]
struct UmdArgs {
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Strategy::ExhaustiveSmall)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of coefficient tables evaluated.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GaussArgs {
    /// Instance JSON; the built-in fixture when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// identity, a_s, j, or a JSON file holding an array of rows.
    #[arg(long, default_value = "a_s")]
    matrix: String,
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    /// Monte-Carlo samples; tensor quadrature when absent.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value = "a_s")]
    matrix: String,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long, default_value_t = 20_000)]
    paths: usize,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 20.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long, value_enum)]
    parity: ParityArg,
    #[arg(long)]
    symbol: String,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 8)]
    degree: usize,
    /// Grid for the operator-level round trip of odd symbols.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HeadlineArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "32,64")]
    grid: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_duality: bool,
    /// Directory for headline.csv, headline_duality.csv and headline.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SigmaNArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_symbol(name: &str) -> anyhow::Result<Multiplier> {
    let which = match name {
        "hilbert" => NamedMultiplier::Hilbert1d,
        "m0" => NamedMultiplier::M0 { d: 2 },
        "m0-3d" => NamedMultiplier::M0 { d: 3 },
        "riesz1" => NamedMultiplier::Riesz { k: 1, d: 2 },
        "riesz2" => NamedMultiplier::Riesz { k: 2, d: 2 },
        "riesz3" => NamedMultiplier::Riesz { k: 3, d: 3 },
        "ba-re" => NamedMultiplier::BaReal,
        "ba-im" => NamedMultiplier::BaImag,
        other => bail!("unknown symbol `{other}`"),
    };
    Ok(Multiplier::named(&which)?)
}

/// Symbols whose p-norm is capped by p* − 1.
fn has_umd_cap(name: &str) -> bool {
    matches!(name, "m0" | "m0-3d" | "ba-re" | "ba-im")
}

fn parse_matrix(spec: &str) -> anyhow::Result<TransformMatrix> {
    Ok(match spec {
        "identity" => TransformMatrix::identity(2),
        "a_s" => TransformMatrix::named(NamedMatrix::As)?,
        "j" => TransformMatrix::named(NamedMatrix::J)?,
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading matrix {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing matrix {path}"))?
        }
    })
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> anyhow::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn apply(args: ApplyArgs) -> anyhow::Result<()> {
    let m = parse_symbol(&args.symbol)?;
    let f = match &args.input {
        Some(path) => GridFunction::load(path)?,
        None => {
            let mut r = rng::stream(args.seed, 0);
            GridFunction::random_trig(m.dim(), args.grid, args.grid / 4, true, &mut r)?
        }
    };
    let g = m.apply(&f)?;
    g.save(&args.out)?;
    print_json(&json!({
        "symbol": m.name(),
        "dim": g.dim(),
        "grid": g.n(),
        "value_dim": g.value_dim(),
        "imag_residual": g.imag_residual(),
        "out": args.out,
    }))
}

fn norm_estimate(args: NormArgs, exec: Exec) -> anyhow::Result<()> {
    let m = parse_symbol(&args.symbol)?;
    let mut cfg = PowerConfig::new(args.p, args.grid);
    cfg.restarts = args.restarts;
    cfg.iters = args.iters;
    cfg.seed = args.seed;
    let mut est = power_iterate_lp(&PowerTarget::scalar(m), &cfg, &[], exec)?;
    if let Some(path) = &args.out {
        est.witness.save(path)?;
        est.report.witness = Some(path.display().to_string());
    }
    print_json(&est.report)?;
    let cap = p_star(args.p) - 1.0;
    if has_umd_cap(&args.symbol) && est.report.best_ratio > cap + 1e-6 {
        return Err(Error::Assertion(format!("ratio {} exceeds p* - 1 = {cap}", est.report.best_ratio)).into());
    }
    Ok(())
}

fn umd_search(args: UmdArgs, exec: Exec) -> anyhow::Result<()> {
    let mut cfg = SearchConfig::new(args.depth, args.p, args.strategy.into());
    cfg.seed = args.seed;
    cfg.budget = args.samples;
    let report = umd_lower_bound_search(&cfg, exec)?;
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    print_json(&report)?;
    let cap = p_star(args.p) - 1.0;
    if report.best_ratio > cap + 1e-9 {
        return Err(Error::Assertion(format!("ratio {} exceeds p* - 1 = {cap}", report.best_ratio)).into());
    }
    Ok(())
}

fn gauss_ratio(args: GaussArgs, exec: Exec) -> anyhow::Result<()> {
    let inst = match &args.instance {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => GaussianBlockInstance::fixture(),
    };
    let a = parse_matrix(&args.matrix)?;
    let eval = match args.samples {
        Some(samples) => GaussEval::MonteCarlo {
            samples,
            seed: args.seed,
        },
        None => GaussEval::Quadrature { nodes_per_axis: None },
    };
    print_json(&gaussian_block_ratio(&inst, &a, args.p, eval, None, exec)?)
}

fn mc_verify(args: McArgs, exec: Exec) -> anyhow::Result<()> {
    let a = parse_matrix(&args.matrix)?;
    let f = GridFunction::load(&args.f)?;
    let g = GridFunction::load(&args.g)?;
    let cfg = MCConfig::new(args.paths, args.step, args.horizon, args.seed)?;
    let est = mc_bilinear(&a, &f, &g, &cfg, exec)?;
    let det = deterministic_bilinear(&a, &f, &g, BilinearMode::SpectralExact)?;
    let diff = (est.estimate - det).abs();
    let within = diff <= (3.0 * est.stderr).max(0.02 * det.abs());
    print_json(&json!({
        "estimate": est.estimate,
        "stderr": est.stderr,
        "deterministic": det,
        "z_score": if est.stderr > 0.0 { (est.estimate - det) / est.stderr } else { 0.0 },
        "coarse_step": est.coarse_step,
        "within_tolerance": within,
    }))?;
    if !within {
        return Err(Error::Assertion(format!("estimate {} is {diff:.3e} from {det}", est.estimate)).into());
    }
    Ok(())
}

fn decompose(args: DecomposeArgs) -> anyhow::Result<()> {
    let m = parse_symbol(&args.symbol)?;
    if m.dim() != 2 {
        bail!("decompositions are defined for plane symbols");
    }
    let mut r = rng::stream(args.seed, 0);
    match args.parity {
        ParityArg::Even => {
            if m.parity() != Parity::EvenReal {
                bail!("{} is not an even symbol", m.name());
            }
            let dec = even_decompose(&m, args.epsilon, args.degree)?;
            let mut worst: f64 = 0.0;
            for j in 0..32 {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 32.0 + 0.1;
                let xi = [phi.cos(), phi.sin()];
                let got = even_reconstruct_pointwise(&dec, &xi, EvenQuadrature::default())?;
                worst = worst.max((got - m.eval(&xi).re).abs());
            }
            print_json(&json!({
                "symbol": m.name(),
                "parity": "even",
                "decomposition": dec,
                "round_trip_max_error": worst,
            }))
        }
        ParityArg::Odd => {
            if m.parity() != Parity::OddImaginary {
                bail!("{} is not an odd symbol", m.name());
            }
            let omega = rotations_decompose_odd_2d(&m, args.degree)?;
            let f = GridFunction::random_trig(2, args.grid, args.grid / 4, true, &mut r)?;
            let nodes = (8 * (args.degree + 1)).max(512);
            let got = rotations_reconstruct(&omega, &f, nodes, RotationRule::default())?;
            print_json(&json!({
                "symbol": m.name(),
                "parity": "odd",
                "omega": omega,
                "theta_nodes": nodes,
                "round_trip_max_error": got.max_abs_diff(&m.apply(&f)?),
            }))
        }
    }
}

fn headline(args: HeadlineArgs, exec: Exec) -> anyhow::Result<()> {
    let cfg = HeadlineConfig {
        ps: args.p,
        ns: args.grid,
        restarts: args.restarts,
        iters: args.iters,
        seed: args.seed,
        duality: !args.no_duality,
    };
    let table = headline_experiment(&cfg, exec)?;
    print!("{}", table.to_csv());
    if !table.duality.is_empty() {
        print!("{}", table.duality_csv());
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("headline.csv"), table.to_csv())?;
        fs::write(dir.join("headline_duality.csv"), table.duality_csv())?;
        for (p, n, w) in &table.witnesses {
            w.save(dir.join(format!("headline_p{p}_n{n}.gfn")))?;
        }
        write_json(
            &dir.join("headline.json"),
            &json!({ "config": cfg, "table": table, "grid_stability": grid_stability(&table, 0.02) }),
        )?;
    }
    if let Some(r) = table.rows.iter().find(|r| !r.within_cap) {
        return Err(Error::Assertion(format!("p = {}, N = {}: ratio {} exceeds {}", r.p, r.n, r.ratio, r.cap)).into());
    }
    Ok(())
}

fn sigma_n(args: SigmaNArgs, exec: Exec) -> anyhow::Result<()> {
    let cfg = SigmaNConfig {
        ns: args.n,
        p: args.p,
        grid: args.grid,
        restarts: args.restarts,
        iters: args.iters,
        seed: args.seed,
    };
    let table = sigma_n_experiment(&cfg, exec)?;
    print!("{}", table.to_csv());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("sigma_n.csv"), table.to_csv())?;
        write_json(&dir.join("sigma_n.json"), &json!({ "config": cfg, "table": table }))?;
    }
    Ok(())
}

fn report(args: ReportArgs, exec: Exec) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let dir = report_bundle(&text, args.out.as_deref(), exec)?;
    println!("{}", dir.display());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Assertion(_)) => 2,
        Some(Error::Config { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let result = match cli.command {
        Command::Apply(a) => apply(a),
        Command::NormEstimate(a) => norm_estimate(a, exec),
        Command::UmdSearch(a) => umd_search(a, exec),
        Command::GaussRatio(a) => gauss_ratio(a, exec),
        Command::McVerify(a) => mc_verify(a, exec),
        Command::Decompose(a) => decompose(a),
        Command::Headline(a) => headline(a, exec),
        Command::SigmaN(a) => sigma_n(a, exec),
        Command::Report(a) => report(a, exec),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
