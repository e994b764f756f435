//! `hexad`: simulate, estimate and verify triadic network formation models.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hexad_core::alt::{nodefe_fit, tetrad_fit};
use hexad_core::hexad::{fit_with, Enumerator, DENSE_MAX_N};
use hexad_core::io::{
    parse_dyadic_csv, parse_network_csv, read_csv_column, read_result_json, write_network_csv, write_result_json,
    EstimateReport, ParseOptions,
};
use hexad_core::oracle::{crosscheck_enumerators, run_oracles, CrosscheckReport, OracleReport};
use hexad_core::simulation::{
    qq_points, run_monte_carlo, simulate_network, write_qq_csv, write_qq_svg, MonteCarloRun,
    Regime, SimCovariates, SimulationConfig,
};
use hexad_core::wiring::{
    count_hexad_pairs_by_overlap, enumerate_wirings, find_identifying_pairs, overlap_growth,
    verify_minimality, DegreeSequence, FeLevel, MinimalityReport, OverlapGrowth, WiringPattern,
};
use hexad_core::{Error, FitConfig, ModelKind};

#[derive(Parser)]
#[command(name = "hexad", version, about = "Conditional logit estimation for triadic network formation")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo cell: simulate, fit every replication, summarize.
    Simulate(SimulateArgs),
    /// Fit a model to a network CSV.
    Estimate(EstimateArgs),
    /// Wiring catalog checks, and optionally the exact-enumeration oracles.
    Verify(VerifyArgs),
    /// Q-Q points from a set of Monte Carlo estimates.
    Qq(QqArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    DyadFe,
    NodeFe,
    Dyadic,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::DyadFe => ModelKind::DyadFe,
            ModelArg::NodeFe => ModelKind::NodeFe,
            ModelArg::Dyadic => ModelKind::Dyadic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumeratorArg {
    Sparse,
    Dense,
}

#[derive(Args)]
struct FitArgs {
    /// Convergence tolerance on the per-observation score and the step.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Maximum Newton iterations.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Scale the sandwich meat by G/(G-1), G the number of clusters.
    #[arg(long)]
    dfc: bool,
}

impl FitArgs {
    fn config(&self) -> FitConfig {
        FitConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            dfc: self.dfc,
            ..FitConfig::default()
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Nodes per part.
    #[arg(long)]
    n: u32,
    /// dense, loglog, logsqrt, logn, custom (with --delta) or custom:<delta>.
    #[arg(long, default_value = "dense")]
    regime: String,
    /// Exponent for the custom regime, c_N = delta ln N.
    #[arg(long)]
    delta: Option<f64>,
    /// Replications.
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "dyad-fe")]
    model: ModelArg,
    /// True coefficients, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    beta0: Vec<f64>,
    #[command(flatten)]
    fit: FitArgs,
    /// Summary JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-replication outcomes JSON.
    #[arg(long)]
    outcomes: Option<PathBuf>,
    /// Q-Q points CSV.
    #[arg(long)]
    qq: Option<PathBuf>,
    /// Q-Q scatter SVG.
    #[arg(long)]
    qq_svg: Option<PathBuf>,
    /// Also write one simulated network as a full CSV (triadic models).
    #[arg(long)]
    emit_network: Option<PathBuf>,
    /// Replication written by --emit-network.
    #[arg(long, default_value_t = 0)]
    emit_rep: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Network CSV: i,j,k,y,x1..xP (or i,j,k with --covariates); i,j,y,x1..xP for dyadic.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dyad-fe")]
    model: ModelArg,
    /// Part size; defaults to the largest index in the file.
    #[arg(long)]
    n: Option<u32>,
    #[command(flatten)]
    fit: FitArgs,
    /// Confidence level for the reported intervals.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Informative-hexad enumerator (dyad-fe only).
    #[arg(long, value_enum, default_value = "sparse")]
    enumerator: EnumeratorArg,
    /// Covariates for compact files: sim:<seed>:<rep>:<p> regenerates simulated draws.
    #[arg(long)]
    covariates: Option<String>,
    /// Leave timing out of the output, for byte-reproducible files.
    #[arg(long)]
    no_timing: bool,
    /// Result JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also run the exact-enumeration sufficiency oracles and enumerator cross-checks.
    #[arg(long)]
    oracles: bool,
    /// Random scenarios per oracle.
    #[arg(long, default_value_t = 100)]
    scenarios: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QqArgs {
    /// Outcomes JSON from `simulate --outcomes`, or a CSV with a `beta` column.
    #[arg(long)]
    input: PathBuf,
    /// Q-Q points CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Failure with its exit code: 2 usage, 3 data, 4 numerical.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) | Error::ResourceLimit(_) => 2,
            Error::Parse { .. } | Error::DuplicateTriad { .. } | Error::Io { .. } | Error::Json(_) => 3,
            _ if e.is_numerical() => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => write_result_json(value, path)?,
        None => println!("{}", serde_json::to_string_pretty(value).map_err(Error::from)?),
    }
    Ok(())
}

fn parse_regime(name: &str, delta: Option<f64>) -> CliResult<Regime> {
    let regime: Regime = match (name, delta) {
        ("custom", Some(d)) => format!("custom:{d}").parse().map_err(usage)?,
        ("custom", None) => return Err(usage("--regime custom needs --delta")),
        (other, None) => other.parse().map_err(usage)?,
        (_, Some(_)) => return Err(usage("--delta only applies to --regime custom")),
    };
    Ok(regime)
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let regime = parse_regime(&args.regime, args.delta)?;
    let cfg = SimulationConfig {
        n: args.n,
        beta0: args.beta0.clone(),
        regime,
        replications: args.reps,
        seed: args.seed,
        model: args.model.into(),
        fit: args.fit.config(),
    };
    cfg.validate()?;
    if let Some(path) = &args.emit_network {
        if cfg.model == ModelKind::Dyadic {
            return Err(usage("--emit-network supports the triadic models only"));
        }
        let (net, _) = simulate_network(&cfg, args.emit_rep)?;
        write_network_csv(&net, path)?;
    }
    let run = run_monte_carlo(&cfg)?;
    for w in &run.summary.warnings {
        warn(w);
    }
    emit(&run.summary, args.out.as_deref())?;
    if let Some(path) = &args.outcomes {
        write_result_json(&run, path)?;
    }
    if args.qq.is_some() || args.qq_svg.is_some() {
        write_qq(&run.betas(), args.qq.as_deref(), args.qq_svg.as_deref(), &qq_title(&cfg))?;
    }
    Ok(())
}

fn qq_title(cfg: &SimulationConfig) -> String {
    format!("{} N={} regime={} K={}", cfg.model.as_str(), cfg.n, cfg.regime, cfg.replications)
}

fn write_qq(betas: &[f64], csv: Option<&Path>, svg: Option<&Path>, title: &str) -> CliResult<()> {
    let points = qq_points(betas)?;
    if let Some(path) = csv {
        write_qq_csv(path, &points)?;
    }
    if let Some(path) = svg {
        write_qq_svg(path, &points, title)?;
    }
    Ok(())
}

fn parse_sim_covariates(spec: &str) -> CliResult<SimCovariates> {
    let bad = || usage(format!("--covariates expects sim:<seed>:<rep>:<p>, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 || parts[0] != "sim" {
        return Err(bad());
    }
    let seed = parts[1].parse().map_err(|_| bad())?;
    let rep = parts[2].parse().map_err(|_| bad())?;
    let p: usize = parts[3].parse().map_err(|_| bad())?;
    if p == 0 {
        return Err(bad());
    }
    Ok(SimCovariates { seed, rep, p })
}

fn estimate(args: EstimateArgs) -> CliResult<()> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(usage(format!("--level must lie in (0, 1), got {}", args.level)));
    }
    let model: ModelKind = args.model.into();
    if matches!(args.enumerator, EnumeratorArg::Dense) && model != ModelKind::DyadFe {
        return Err(usage("--enumerator dense applies to --model dyad-fe only"));
    }
    let cfg = args.fit.config();
    cfg.validate()?;
    let start = Instant::now();
    let (result, warnings) = match model {
        ModelKind::Dyadic => {
            if args.covariates.is_some() {
                return Err(usage("--covariates applies to triadic models only"));
            }
            let (net, warnings) = parse_dyadic_csv(&args.input, args.n)?;
            (tetrad_fit(&net, &cfg)?, warnings)
        }
        _ => {
            let opts = ParseOptions {
                n: args.n,
                covariates: None,
            };
            let opts = match &args.covariates {
                Some(spec) => {
                    let generator = parse_sim_covariates(spec)?;
                    let n = args
                        .n
                        .ok_or_else(|| usage("--covariates needs --n"))?;
                    ParseOptions {
                        covariates: Some(generator.generator(n)),
                        ..opts
                    }
                }
                None => opts,
            };
            let parsed = parse_network_csv(&args.input, &opts)?;
            let net = parsed.network;
            let result = if model == ModelKind::DyadFe {
                let enumerator = match args.enumerator {
                    EnumeratorArg::Sparse => Enumerator::Sparse,
                    EnumeratorArg::Dense => Enumerator::Dense { max_n: DENSE_MAX_N },
                };
                fit_with(&net, &cfg, enumerator)?
            } else {
                nodefe_fit(&net, &cfg)?
            };
            (result, parsed.warnings)
        }
    };
    for w in &warnings {
        warn(w);
    }
    if !result.converged {
        warn(&format!("fit did not converge ({:?})", result.status));
    }
    let mut report = EstimateReport::new(result, args.level)?;
    report.warnings = warnings;
    if !args.no_timing {
        report.timing_seconds = Some(start.elapsed().as_secs_f64());
    }
    emit(&report, args.out.as_deref())
}

#[derive(Serialize)]
struct WiringEntry {
    mask: u8,
    triads: String,
}

fn wiring_entries(ws: &[WiringPattern]) -> Vec<WiringEntry> {
    ws.iter()
        .map(|w| WiringEntry {
            mask: w.0,
            triads: w.to_string(),
        })
        .collect()
}

#[derive(Serialize)]
struct OverlapCount {
    overlap: [u8; 3],
    count: u64,
}

#[derive(Serialize)]
struct OverlapTable {
    n: u32,
    total_pairs: u64,
    partition_holds: bool,
    cells: Vec<OverlapCount>,
}

#[derive(Serialize)]
struct VerifyReport {
    degree_2_wirings: Vec<WiringEntry>,
    degree_2_identifying_pairs: Vec<[String; 2]>,
    degree_1_wirings: Vec<WiringEntry>,
    degree_1_node_level_pairs: usize,
    minimality: MinimalityReport,
    overlap_tables: Vec<OverlapTable>,
    /// n = 3 to n = 4 cell growth against the exponent band (factor 3).
    growth: Vec<OverlapGrowth>,
    growth_within_band: bool,
    catalog_pass: bool,
    oracles: Option<OracleReport>,
    crosschecks: Option<Vec<CrosscheckReport>>,
    oracles_pass: Option<bool>,
}

fn overlap_table(n: u32) -> CliResult<(OverlapTable, std::collections::BTreeMap<(u8, u8, u8), u64>)> {
    let counts = count_hexad_pairs_by_overlap(n)?;
    let m = (n as u64).pow(3) * (n as u64 - 1).pow(3);
    let total: u64 = counts.values().sum();
    let table = OverlapTable {
        n,
        total_pairs: total,
        partition_holds: total == m * m,
        cells: counts
            .iter()
            .map(|(&(a, b, c), &count)| OverlapCount {
                overlap: [a, b, c],
                count,
            })
            .collect(),
    };
    Ok((table, counts))
}

fn verify(args: VerifyArgs) -> CliResult<()> {
    let two = enumerate_wirings(DegreeSequence::uniform(2));
    let pairs = find_identifying_pairs(&two, FeLevel::Dyad);
    let one = enumerate_wirings(DegreeSequence::uniform(1));
    let node_pairs = find_identifying_pairs(&one, FeLevel::Node).len();
    let minimality = verify_minimality();
    let (t2, _) = overlap_table(2)?;
    let (t3, c3) = overlap_table(3)?;
    let c4 = count_hexad_pairs_by_overlap(4)?;
    let growth = overlap_growth(&c3, 3, &c4, 4, 3.0);
    let within_band = growth.iter().all(|g| g.within_band);
    let catalog_pass = two.len() == 8
        && pairs.len() == 1
        && pairs[0] == (WiringPattern::INFORMATIVE_1, WiringPattern::INFORMATIVE_2)
        && one.len() == 4
        && node_pairs == 6
        && minimality.passed
        && t2.partition_holds
        && t3.partition_holds;
    let (oracles, crosschecks, oracles_pass) = if args.oracles {
        let report = run_oracles(args.scenarios, 2, args.seed);
        let checks = [(4, 0.3), (5, 0.1), (6, 0.3), (8, 0.6)]
            .iter()
            .map(|&(n, density)| crosscheck_enumerators(n, density, args.seed, 20))
            .collect::<Result<Vec<_>, _>>()?;
        let pass = report.pass && checks.iter().all(|c| c.failed_trials.is_empty());
        (Some(report), Some(checks), Some(pass))
    } else {
        (None, None, None)
    };
    let report = VerifyReport {
        degree_2_wirings: wiring_entries(&two),
        degree_2_identifying_pairs: pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        degree_1_wirings: wiring_entries(&one),
        degree_1_node_level_pairs: node_pairs,
        minimality,
        overlap_tables: vec![t2, t3],
        growth,
        growth_within_band: within_band,
        catalog_pass,
        oracles,
        crosschecks,
        oracles_pass,
    };
    if !within_band {
        warn("some n=3 to n=4 overlap cells fall outside the factor-3 growth band (small-n effect)");
    }
    emit(&report, args.out.as_deref())?;
    if catalog_pass && oracles_pass.unwrap_or(true) {
        Ok(())
    } else {
        Err(Failure {
            code: 4,
            message: "verification failed".into(),
        })
    }
}

fn read_betas(path: &Path) -> CliResult<Vec<f64>> {
    if path.extension().is_some_and(|e| e == "json") {
        let run: MonteCarloRun = read_result_json(path)?;
        return Ok(run.betas());
    }
    Ok(read_csv_column(path, "beta")?)
}

fn qq(args: QqArgs) -> CliResult<()> {
    let betas = read_betas(&args.input)?;
    write_qq(&betas, Some(&args.out), args.svg.as_deref(), "Q-Q")
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify(a) => verify(a),
        Command::Qq(a) => qq(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
