//! Data-generating processes, sparsity regimes and the Monte Carlo harness.
//!
//! Random numbers come from ChaCha8 keyed by `(seed, replication)`. Each
//! variate family has its own stream and each triad (or dyad) a fixed word
//! offset within it, so any single draw can be recomputed by seeking and
//! networks do not depend on how replications are scheduled.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alt::{nodefe_fit, tetrad_fit, DyadicNetwork};
use crate::error::{Error, Result};
use crate::hexad;
use crate::inference::normal_quantile;
use crate::network::{Covariates, FixedEffects, Triad, TriadicNetwork};
use crate::result::{EstimationResult, ModelKind};
use crate::solver::FitConfig;

const COVARIATE_STREAM: u64 = 1;
const SHOCK_STREAM: u64 = 2;
/// 32-bit words consumed by one normal draw (two `u64`s).
const NORMAL_WORDS: u128 = 4;
/// 32-bit words consumed by one logistic draw (one `u64`).
const LOGISTIC_WORDS: u128 = 2;

/// Sparsity regime: the scale `c_N` of the degree heterogeneity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Regime {
    /// `c_N = 0`.
    Dense,
    /// `c_N = ln ln N`.
    LogLog,
    /// `c_N = ln √N`.
    LogSqrt,
    /// `c_N = ln N`.
    LogN,
    /// `c_N = δ ln N`.
    Custom { delta: f64 },
}

impl Regime {
    pub fn c_n(self, n: u32) -> f64 {
        let ln = (n as f64).ln();
        match self {
            Regime::Dense => 0.0,
            Regime::LogLog => ln.ln(),
            Regime::LogSqrt => 0.5 * ln,
            Regime::LogN => ln,
            Regime::Custom { delta } => delta * ln,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Dense => f.write_str("dense"),
            Regime::LogLog => f.write_str("loglog"),
            Regime::LogSqrt => f.write_str("logsqrt"),
            Regime::LogN => f.write_str("logn"),
            Regime::Custom { delta } => write!(f, "custom:{delta}"),
        }
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dense" => Ok(Regime::Dense),
            "loglog" => Ok(Regime::LogLog),
            "logsqrt" => Ok(Regime::LogSqrt),
            "logn" => Ok(Regime::LogN),
            other => {
                let delta = other
                    .strip_prefix("custom:")
                    .and_then(|d| d.parse::<f64>().ok())
                    .ok_or_else(|| {
                        format!("unknown regime `{other}` (dense, loglog, logsqrt, logn, custom:<delta>)")
                    })?;
                if !(delta >= 0.0) || !delta.is_finite() {
                    return Err(format!("custom delta must be finite and nonnegative, got {delta}"));
                }
                Ok(Regime::Custom { delta })
            }
        }
    }
}

impl From<Regime> for String {
    fn from(r: Regime) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Regime {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: u32,
    pub beta0: Vec<f64>,
    pub regime: Regime,
    pub replications: usize,
    pub seed: u64,
    pub model: ModelKind,
    pub fit: FitConfig,
}

impl SimulationConfig {
    /// Scalar `β₀ = 1` design.
    pub fn new(n: u32, regime: Regime, replications: usize, seed: u64, model: ModelKind) -> Self {
        SimulationConfig {
            n,
            beta0: vec![1.0],
            regime,
            replications,
            seed,
            model,
            fit: FitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidArgument(format!("n must be at least 4, got {}", self.n)));
        }
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if self.beta0.is_empty() || self.beta0.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("beta0 must be a nonempty finite vector".into()));
        }
        if let Regime::Custom { delta } = self.regime {
            if !(delta >= 0.0) || !delta.is_finite() {
                return Err(Error::InvalidArgument("custom delta must be nonnegative".into()));
            }
        }
        self.fit.validate()
    }

    pub fn p(&self) -> usize {
        self.beta0.len()
    }

    pub fn c_n(&self) -> f64 {
        self.regime.c_n(self.n)
    }
}

/// `φ_r = (N - r) / (N - 1)` for 1-based `r`.
pub fn tendency(r: u32, n: u32) -> Result<f64> {
    if n < 2 || r == 0 || r > n {
        return Err(Error::InvalidArgument(format!("tendency needs 1 <= r <= n, n >= 2; got r = {r}, n = {n}")));
    }
    Ok((n - r) as f64 / (n - 1) as f64)
}

fn tendencies(n: u32) -> Vec<f64> {
    (1..=n).map(|r| (n - r) as f64 / (n - 1) as f64).collect()
}

/// `A_ij = -(c/2)(φ_i + φ_j)` and likewise for `B_jk`, `C_ik`.
pub fn build_fixed_effects(n: u32, c_n: f64) -> Result<FixedEffects> {
    if n < 2 || !(c_n >= 0.0) || !c_n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "fixed effects need n >= 2 and finite c_N >= 0; got n = {n}, c_N = {c_n}"
        )));
    }
    let phi = tendencies(n);
    let m = DMatrix::from_fn(n as usize, n as usize, |r, c| -0.5 * c_n * (phi[r] + phi[c]));
    Ok(FixedEffects {
        a: m.clone(),
        b: m.clone(),
        c: m,
    })
}

/// Node-level effects `A_i = B_j = C_k = -c φ`, written into the dyad
/// matrices so that `index` returns `A_i + B_j + C_k`.
pub fn build_node_fixed_effects(n: u32, c_n: f64) -> Result<FixedEffects> {
    build_fixed_effects(n, c_n)?;
    let phi = tendencies(n);
    let nu = n as usize;
    // a[(i, j)] = A_i, b[(j, k)] = B_j, c[(i, k)] = C_k.
    Ok(FixedEffects {
        a: DMatrix::from_fn(nu, nu, |i, _| -c_n * phi[i]),
        b: DMatrix::from_fn(nu, nu, |j, _| -c_n * phi[j]),
        c: DMatrix::from_fn(nu, nu, |_, k| -c_n * phi[k]),
    })
}

fn rng(seed: u64, rep: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&rep.to_le_bytes());
    let mut r = ChaCha8Rng::from_seed(key);
    r.set_stream(stream);
    r
}

/// Uniform on the open unit interval from the top 53 bits.
#[inline]
fn open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Box-Muller cosine branch.
#[inline]
fn draw_normal(r: &mut ChaCha8Rng) -> f64 {
    let u1 = open_unit(r.next_u64());
    let u2 = open_unit(r.next_u64());
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Inverse CDF of the standard logistic.
#[inline]
fn draw_logistic(r: &mut ChaCha8Rng) -> f64 {
    let u = open_unit(r.next_u64());
    (u / (1.0 - u)).ln()
}

/// Recomputes the simulated covariates of any cell on demand.
#[derive(Clone, Copy, Debug)]
pub struct SimCovariates {
    pub seed: u64,
    pub rep: u64,
    pub p: usize,
}

impl SimCovariates {
    /// Covariates of the cell with linear index `index`.
    pub fn write(&self, index: u64, out: &mut [f64]) {
        let mut r = rng(self.seed, self.rep, COVARIATE_STREAM);
        r.set_word_pos(index as u128 * self.p as u128 * NORMAL_WORDS);
        for x in out.iter_mut() {
            *x = draw_normal(&mut r);
        }
    }

    /// Covariates of every cell in linear order.
    pub fn dense(&self, cells: usize) -> Vec<f64> {
        let mut r = rng(self.seed, self.rep, COVARIATE_STREAM);
        (0..cells * self.p).map(|_| draw_normal(&mut r)).collect()
    }

    /// A generator-backed [`Covariates`] for a triadic network of size `n`.
    pub fn generator(self, n: u32) -> Covariates {
        Covariates::generated(self.p, move |t, out| {
            self.write(t.index_unchecked(n) as u64, out)
        })
    }

    /// Shock `ε` of the cell with linear index `index`.
    pub fn shock(&self, index: u64) -> f64 {
        let mut r = rng(self.seed, self.rep, SHOCK_STREAM);
        r.set_word_pos(index as u128 * LOGISTIC_WORDS);
        draw_logistic(&mut r)
    }
}

fn shocks(seed: u64, rep: u64, cells: usize) -> impl Iterator<Item = f64> {
    let mut r = rng(seed, rep, SHOCK_STREAM);
    (0..cells).map(move |_| draw_logistic(&mut r))
}

fn linear_index(x: &[f64], beta: &[f64]) -> f64 {
    x.iter().zip(beta).map(|(a, b)| a * b).sum()
}

/// One triadic draw: `Y = 1{X'β₀ + F - ε ≥ 0}`. Dyad-level effects for
/// `DyadFe`, node-level for `NodeFe`.
pub fn simulate_network(cfg: &SimulationConfig, rep: u64) -> Result<(TriadicNetwork, FixedEffects)> {
    cfg.validate()?;
    let n = cfg.n;
    let fe = match cfg.model {
        ModelKind::DyadFe => build_fixed_effects(n, cfg.c_n())?,
        ModelKind::NodeFe => build_node_fixed_effects(n, cfg.c_n())?,
        ModelKind::Dyadic => {
            return Err(Error::InvalidArgument(
                "dyadic draws come from simulate_dyadic".into(),
            ))
        }
    };
    let p = cfg.p();
    let cells = (n as usize).pow(3);
    let x = SimCovariates { seed: cfg.seed, rep, p }.dense(cells);
    let mut edges = Vec::new();
    let mut idx = 0;
    let mut eps = shocks(cfg.seed, rep, cells);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = Triad::new(i, j, k);
                let e = eps.next().expect("one shock per triad");
                let index = linear_index(&x[idx * p..(idx + 1) * p], &cfg.beta0) + fe.index(t);
                if index - e >= 0.0 {
                    edges.push(t);
                }
                idx += 1;
            }
        }
    }
    let net = TriadicNetwork::new(n, edges, Covariates::dense(p, x))?;
    Ok((net, fe))
}

/// One bipartite draw: `Y_ij = 1{X_ij'β₀ + A_i + B_j - ε_ij ≥ 0}`, with
/// `A_i = -c φ_i`, `B_j = -c φ_j`. Returns the network and `(A, B)`.
pub fn simulate_dyadic(cfg: &SimulationConfig, rep: u64) -> Result<(DyadicNetwork, Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let n = cfg.n;
    let c = cfg.c_n();
    let a: Vec<f64> = tendencies(n).into_iter().map(|phi| -c * phi).collect();
    let b = a.clone();
    let p = cfg.p();
    let cells = (n as usize).pow(2);
    let x = SimCovariates { seed: cfg.seed, rep, p }.dense(cells);
    let mut edges = Vec::new();
    let mut eps = shocks(cfg.seed, rep, cells);
    for i in 0..n {
        for j in 0..n {
            let idx = (i * n + j) as usize;
            let e = eps.next().expect("one shock per dyad");
            let index = linear_index(&x[idx * p..(idx + 1) * p], &cfg.beta0) + a[i as usize] + b[j as usize];
            if index - e >= 0.0 {
                edges.push((i, j));
            }
        }
    }
    Ok((DyadicNetwork::new(n, edges, p, x)?, a, b))
}

/// Simulates replication `rep` and fits the configured estimator.
pub fn simulate_and_fit(cfg: &SimulationConfig, rep: u64) -> (Result<EstimationResult>, usize, f64) {
    match cfg.model {
        ModelKind::Dyadic => match simulate_dyadic(cfg, rep) {
            Ok((net, _, _)) => {
                let rho = net.average_degree_and_density().1;
                (tetrad_fit(&net, &cfg.fit), net.n_links(), rho)
            }
            Err(e) => (Err(e), 0, 0.0),
        },
        model => match simulate_network(cfg, rep) {
            Ok((net, _)) => {
                let rho = net.average_degree_and_density().1;
                let fit = if model == ModelKind::DyadFe {
                    hexad::fit(&net, &cfg.fit)
                } else {
                    nodefe_fit(&net, &cfg.fit)
                };
                (fit, net.n_links(), rho)
            }
            Err(e) => (Err(e), 0, 0.0),
        },
    }
}

/// Per-replication record. Moments use the first coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub rep: u64,
    pub beta_hat: Option<f64>,
    pub se: Option<f64>,
    pub converged: bool,
    pub n_informative: usize,
    pub n_links: usize,
    pub rho_hat: f64,
    pub error: Option<String>,
}

impl ReplicationOutcome {
    /// Usable for the moment columns: converged with a positive standard
    /// error.
    pub fn succeeded(&self) -> bool {
        self.converged && self.beta_hat.is_some() && self.se.is_some_and(|s| s > 0.0)
    }
}

/// One Monte Carlo cell, column for column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub model: ModelKind,
    pub n: u32,
    pub regime: Regime,
    pub c_n: f64,
    pub beta0: f64,
    pub replications: usize,
    pub seed: u64,
    pub mean_beta: f64,
    pub bias: f64,
    /// Population SD over successful replications; `None` below two.
    pub sd_beta: Option<f64>,
    pub mean_se: f64,
    pub rmse: f64,
    /// `mean_se / sd_beta`.
    pub se_ratio: Option<f64>,
    pub c90: f64,
    pub c95: f64,
    /// Rejection rate of `β = 0` at 5%.
    pub power: f64,
    pub mean_rho_hat: f64,
    pub mean_n_informative: f64,
    pub mean_n_links: f64,
    /// Mean of `n_informative / n_links` over replications with links.
    pub mean_info_ratio: f64,
    pub n_failed: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloRun {
    pub summary: MonteCarloSummary,
    pub outcomes: Vec<ReplicationOutcome>,
}

impl MonteCarloRun {
    /// First-coefficient estimates of the successful replications, in
    /// replication order.
    pub fn betas(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .filter(|o| o.succeeded())
            .filter_map(|o| o.beta_hat)
            .collect()
    }
}

/// Simulates and fits one replication.
pub fn run_replication(cfg: &SimulationConfig, rep: u64) -> ReplicationOutcome {
    let (fit, n_links, rho_hat) = simulate_and_fit(cfg, rep);
    match fit {
        Ok(res) => ReplicationOutcome {
            rep,
            beta_hat: Some(res.beta_hat[0]),
            se: res.se.as_ref().map(|s| s[0]),
            converged: res.converged,
            n_informative: res.n_informative,
            n_links,
            rho_hat,
            error: None,
        },
        Err(e) => ReplicationOutcome {
            rep,
            beta_hat: None,
            se: None,
            converged: false,
            n_informative: match e {
                Error::NoInformation { n_informative, .. } => n_informative,
                _ => 0,
            },
            n_links,
            rho_hat,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every replication (in parallel on the current rayon pool) and folds
/// them in replication order.
pub fn run_monte_carlo(cfg: &SimulationConfig) -> Result<MonteCarloRun> {
    cfg.validate()?;
    let outcomes: Vec<ReplicationOutcome> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(cfg, rep))
        .collect();
    let summary = summarize(cfg, &outcomes)?;
    Ok(MonteCarloRun { summary, outcomes })
}

/// Table-style aggregation of replication outcomes.
pub fn summarize(cfg: &SimulationConfig, outcomes: &[ReplicationOutcome]) -> Result<MonteCarloSummary> {
    let beta0 = cfg.beta0[0];
    let ok: Vec<(f64, f64)> = outcomes
        .iter()
        .filter(|o| o.succeeded())
        .map(|o| (o.beta_hat.unwrap(), o.se.unwrap()))
        .collect();
    let k_all = outcomes.len() as f64;
    let mean_rho_hat = outcomes.iter().map(|o| o.rho_hat).sum::<f64>() / k_all;
    let mean_n_informative = outcomes.iter().map(|o| o.n_informative as f64).sum::<f64>() / k_all;
    let mean_n_links = outcomes.iter().map(|o| o.n_links as f64).sum::<f64>() / k_all;
    let with_links: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.n_links > 0)
        .map(|o| o.n_informative as f64 / o.n_links as f64)
        .collect();
    let mean_info_ratio = if with_links.is_empty() {
        0.0
    } else {
        with_links.iter().sum::<f64>() / with_links.len() as f64
    };
    if ok.is_empty() {
        return Err(Error::NoInformation {
            n_links: mean_n_links.round() as usize,
            n_informative: mean_n_informative.round() as usize,
        });
    }
    let k = ok.len() as f64;
    let mean_beta = ok.iter().map(|(b, _)| b).sum::<f64>() / k;
    let mean_se = ok.iter().map(|(_, s)| s).sum::<f64>() / k;
    let var = ok.iter().map(|(b, _)| (b - mean_beta).powi(2)).sum::<f64>() / k;
    let rmse = (ok.iter().map(|(b, _)| (b - beta0).powi(2)).sum::<f64>() / k).sqrt();
    let mut warnings = Vec::new();
    let sd_beta = if ok.len() >= 2 {
        Some(var.sqrt())
    } else {
        warnings.push("sd_beta undefined with fewer than two successful replications".to_string());
        None
    };
    let n_failed = outcomes.len() - ok.len();
    if n_failed > 0 {
        warnings.push(format!("{n_failed} replication(s) failed and were excluded from moments"));
    }
    let z90 = normal_quantile(0.95);
    let z95 = normal_quantile(0.975);
    let rate = |pred: &dyn Fn(f64, f64) -> bool| ok.iter().filter(|(b, s)| pred(*b, *s)).count() as f64 / k;
    Ok(MonteCarloSummary {
        model: cfg.model,
        n: cfg.n,
        regime: cfg.regime,
        c_n: cfg.c_n(),
        beta0,
        replications: outcomes.len(),
        seed: cfg.seed,
        mean_beta,
        bias: mean_beta - beta0,
        sd_beta,
        mean_se,
        rmse,
        se_ratio: sd_beta.filter(|&sd| sd > 0.0).map(|sd| mean_se / sd),
        c90: rate(&|b, s| (b - beta0).abs() <= z90 * s),
        c95: rate(&|b, s| (b - beta0).abs() <= z95 * s),
        power: rate(&|b, s| b.abs() / s > z95),
        mean_rho_hat,
        mean_n_informative,
        mean_n_links,
        mean_info_ratio,
        n_failed,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub empirical: f64,
}

/// Sorted estimates against normal quantiles `μ + σ Φ⁻¹((r - ½)/K)`, with
/// `μ`, `σ` the Monte Carlo mean and (population) SD.
pub fn qq_points(betas: &[f64]) -> Result<Vec<QqPoint>> {
    if betas.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "Q-Q plot needs at least 10 values, got {}",
            betas.len()
        )));
    }
    if betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidArgument("Q-Q input must be finite".into()));
    }
    let k = betas.len() as f64;
    let mean = betas.iter().sum::<f64>() / k;
    let sd = (betas.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / k).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateInference("Q-Q input has zero variance".into()));
    }
    let mut sorted = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(r, empirical)| QqPoint {
            theoretical: mean + sd * normal_quantile((r as f64 + 0.5) / k),
            empirical,
        })
        .collect())
}

pub fn write_qq_csv(path: &Path, points: &[QqPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for pt in points {
        w.serialize(pt).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Scatter of the Q-Q points with the 45° reference line.
pub fn qq_svg(points: &[QqPoint], title: &str) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 48.0;
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.theoretical).min(p.empirical), hi.max(p.theoretical).max(p.empirical))
    });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let sx = |v: f64| PAD + (v - lo) / span * (SIZE - 2.0 * PAD);
    let sy = |v: f64| SIZE - PAD - (v - lo) / span * (SIZE - 2.0 * PAD);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(&format!("<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        SIZE / 2.0,
        escape(title)
    ));
    s.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{w}\" height=\"{w}\" fill=\"none\" stroke=\"black\"/>\n",
        w = SIZE - 2.0 * PAD
    ));
    s.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n",
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    ));
    for p in points {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"steelblue\"/>\n",
            sx(p.theoretical),
            sy(p.empirical)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">normal quantile</text>\n",
        SIZE / 2.0,
        SIZE - 12.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {})\">estimate</text>\n",
        SIZE / 2.0,
        SIZE / 2.0
    ));
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_qq_svg(path: &Path, points: &[QqPoint], title: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(qq_svg(points, title).as_bytes())
        .map_err(|e| Error::io(path, e))
}
