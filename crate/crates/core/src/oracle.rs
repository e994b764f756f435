//! Brute-force oracles: exhaustive outcome enumeration for the conditional
//! probabilities of each estimator, and enumerator cross-checks.
//!
//! Nothing here is used by the estimators themselves.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexad::{enumerate_informative_dense, enumerate_informative_sparse};
use crate::network::{Covariates, Triad, TriadicNetwork};
use crate::wiring::{WiringPattern, TRIAD_ORDER};

/// Local triads of the two dyad-level informative wirings.
const DYAD_WIRINGS: [[(u8, u8, u8); 4]; 2] = [
    [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1)],
    [(1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 2)],
];

/// Local triads of the four node-level wirings.
const NODE_WIRINGS: [[(u8, u8, u8); 2]; 4] = [
    [(1, 1, 1), (2, 2, 2)],
    [(1, 2, 1), (2, 1, 2)],
    [(1, 2, 2), (2, 1, 1)],
    [(1, 1, 2), (2, 2, 1)],
];

/// Heterogeneity on one hexad, in local labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScenarioEffects {
    /// `A₁₁ A₁₂ A₂₁ A₂₂ B₁₁ … C₂₂`, first index the earlier part.
    Dyad([f64; 12]),
    /// `A₁ A₂ B₁ B₂ C₁ C₂`.
    Node([f64; 6]),
}

impl ScenarioEffects {
    fn index(&self, (a, b, c): (u8, u8, u8)) -> f64 {
        let (a, b, c) = ((a - 1) as usize, (b - 1) as usize, (c - 1) as usize);
        match self {
            ScenarioEffects::Dyad(f) => f[2 * a + b] + f[4 + 2 * b + c] + f[8 + 2 * a + c],
            ScenarioEffects::Node(f) => f[a] + f[2 + b] + f[4 + c],
        }
    }

    fn n_labels(&self) -> usize {
        match self {
            ScenarioEffects::Dyad(_) => 2,
            ScenarioEffects::Node(_) => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexadScenario {
    /// Covariates of the eight triads in mask order.
    pub x: [Vec<f64>; 8],
    pub fe: ScenarioEffects,
    pub beta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetradScenario {
    /// Covariates of dyads 11, 12, 21, 22.
    pub x: [Vec<f64>; 4],
    /// `A₁ A₂ B₁ B₂`.
    pub fe: [f64; 4],
    pub beta: Vec<f64>,
}

/// Deterministic draws for scenario construction.
pub struct ScenarioRng(ChaCha8Rng);

impl ScenarioRng {
    pub fn new(seed: u64) -> Self {
        ScenarioRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `(lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = ((self.0.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    fn vec(&mut self, p: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..p).map(|_| self.uniform(lo, hi)).collect()
    }

    pub fn dyad_effects(&mut self) -> ScenarioEffects {
        ScenarioEffects::Dyad(std::array::from_fn(|_| self.uniform(-2.0, 2.0)))
    }

    pub fn node_effects(&mut self) -> ScenarioEffects {
        ScenarioEffects::Node(std::array::from_fn(|_| self.uniform(-2.0, 2.0)))
    }

    pub fn hexad_scenario(&mut self, p: usize, node_level: bool) -> HexadScenario {
        let x = std::array::from_fn(|_| self.vec(p, -1.5, 1.5));
        let beta = self.vec(p, -1.0, 1.0);
        let fe = if node_level {
            self.node_effects()
        } else {
            self.dyad_effects()
        };
        HexadScenario { x, fe, beta }
    }

    pub fn tetrad_scenario(&mut self, p: usize) -> TetradScenario {
        TetradScenario {
            x: std::array::from_fn(|_| self.vec(p, -1.5, 1.5)),
            fe: std::array::from_fn(|_| self.uniform(-2.0, 2.0)),
            beta: self.vec(p, -1.0, 1.0),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(log Λ(u), log(1 - Λ(u)))`, both stable.
fn log_link(u: f64) -> (f64, f64) {
    let log1pexp = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    (-log1pexp(-u), -log1pexp(u))
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// `P(label = c | some label fires)` given the per-outcome log
/// probabilities and each outcome's label (0 = none).
fn condition(log_probs: &[f64], labels: &[usize], n_labels: usize) -> Vec<f64> {
    let max = log_probs
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l > 0)
        .map(|(lp, _)| *lp)
        .fold(f64::NEG_INFINITY, f64::max);
    let group = |c: usize| {
        compensated_sum(
            log_probs
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(lp, _)| (lp - max).exp()),
        )
    };
    let masses: Vec<f64> = (1..=n_labels).map(group).collect();
    let total = compensated_sum(masses.iter().copied());
    masses.into_iter().map(|m| m / total).collect()
}

fn mask_of(triads: &[(u8, u8, u8)]) -> u8 {
    triads.iter().fold(0, |m, t| {
        m | 1 << TRIAD_ORDER.iter().position(|o| o == t).expect("local triad")
    })
}

/// Exact conditional label probabilities for one hexad, by summing the
/// likelihood of all 2⁸ outcomes. Two labels under dyad effects, four under
/// node effects.
pub fn exact_conditional_prob(sc: &HexadScenario) -> Vec<f64> {
    let terms: Vec<(f64, f64)> = TRIAD_ORDER
        .iter()
        .zip(&sc.x)
        .map(|(&t, x)| log_link(dot(x, &sc.beta) + sc.fe.index(t)))
        .collect();
    let wirings: Vec<u8> = match sc.fe {
        ScenarioEffects::Dyad(_) => DYAD_WIRINGS.iter().map(|w| mask_of(w)).collect(),
        ScenarioEffects::Node(_) => NODE_WIRINGS.iter().map(|w| mask_of(w)).collect(),
    };
    let mut log_probs = Vec::with_capacity(256);
    let mut labels = Vec::with_capacity(256);
    for mask in 0u16..256 {
        let lp = compensated_sum(
            terms
                .iter()
                .enumerate()
                .map(|(bit, &(on, off))| if mask >> bit & 1 == 1 { on } else { off }),
        );
        log_probs.push(lp);
        labels.push(wirings.iter().position(|&w| w as u16 == mask).map_or(0, |c| c + 1));
    }
    condition(&log_probs, &labels, sc.fe.n_labels())
}

/// The closed form the estimator relies on: a binary logit in
/// `W = Σ_{wiring 1} X - Σ_{wiring 2} X` (dyad effects) or a softmax over the
/// four node-level wiring sums.
pub fn closed_form_prob(sc: &HexadScenario) -> Vec<f64> {
    let sum_over = |triads: &[(u8, u8, u8)]| -> f64 {
        triads
            .iter()
            .map(|t| dot(&sc.x[TRIAD_ORDER.iter().position(|o| o == t).unwrap()], &sc.beta))
            .sum()
    };
    let utilities: Vec<f64> = match sc.fe {
        ScenarioEffects::Dyad(_) => DYAD_WIRINGS.iter().map(|w| sum_over(w)).collect(),
        ScenarioEffects::Node(_) => NODE_WIRINGS.iter().map(|w| sum_over(w)).collect(),
    };
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = utilities.iter().map(|u| (u - max).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Tetrad analogue over all 2⁴ outcomes: `(P(wiring 1), P(wiring 2))`.
pub fn exact_conditional_prob_tetrad(sc: &TetradScenario) -> (f64, f64) {
    // Dyads 11, 12, 21, 22 -> (a, b) local indices.
    let cells = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let terms: Vec<(f64, f64)> = cells
        .iter()
        .zip(&sc.x)
        .map(|(&(a, b), x)| log_link(dot(x, &sc.beta) + sc.fe[a] + sc.fe[2 + b]))
        .collect();
    let mut log_probs = Vec::with_capacity(16);
    let mut labels = Vec::with_capacity(16);
    for mask in 0u8..16 {
        log_probs.push(compensated_sum(
            terms
                .iter()
                .enumerate()
                .map(|(bit, &(on, off))| if mask >> bit & 1 == 1 { on } else { off }),
        ));
        labels.push(match mask {
            0b1001 => 1,
            0b0110 => 2,
            _ => 0,
        });
    }
    let p = condition(&log_probs, &labels, 2);
    (p[0], p[1])
}

/// `Λ(W'β)` with `W = X₁₁ + X₂₂ - X₁₂ - X₂₁`.
pub fn closed_form_prob_tetrad(sc: &TetradScenario) -> f64 {
    let u = dot(&sc.x[0], &sc.beta) + dot(&sc.x[3], &sc.beta)
        - dot(&sc.x[1], &sc.beta)
        - dot(&sc.x[2], &sc.beta);
    1.0 / (1.0 + (-u).exp())
}

/// Network with each triad formed independently with probability
/// `density` and uniform covariates.
pub fn random_network(n: u32, density: f64, p: usize, seed: u64) -> Result<TriadicNetwork> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = ScenarioRng::new(seed);
    let mut edges = Vec::new();
    let cells = (n as usize).pow(3);
    let mut x = Vec::with_capacity(cells * p);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rng.uniform(0.0, 1.0) < density {
                    edges.push(Triad::new(i, j, k));
                }
                for _ in 0..p {
                    x.push(rng.uniform(-1.0, 1.0));
                }
            }
        }
    }
    TriadicNetwork::new(n, edges, Covariates::dense(p, x))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub n: u32,
    pub density: f64,
    pub trials: usize,
    pub passed: usize,
    pub failed_trials: Vec<usize>,
    pub total_informative: usize,
}

/// Dense vs sparse informative sets on random networks.
pub fn crosscheck_enumerators(n: u32, density: f64, seed: u64, trials: usize) -> Result<CrosscheckReport> {
    if n > 8 {
        return Err(Error::InvalidArgument(format!("cross-check limited to n <= 8, got {n}")));
    }
    let mut report = CrosscheckReport {
        n,
        density,
        trials,
        passed: 0,
        failed_trials: Vec::new(),
        total_informative: 0,
    };
    for trial in 0..trials {
        let net = random_network(n, density, 1, seed.wrapping_add(trial as u64))?;
        let dense = enumerate_informative_dense(&net)?;
        let mut sparse = enumerate_informative_sparse(&net);
        sparse.sort_by_key(|h| h.nodes);
        report.total_informative += dense.len();
        if dense == sparse {
            report.passed += 1;
        } else {
            report.failed_trials.push(trial);
        }
    }
    Ok(report)
}

/// Largest absolute deviations found by [`run_oracles`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub scenarios: usize,
    pub seed: u64,
    /// Exact vs `Λ(W'β)` under dyad effects.
    pub dyad_closed_form: f64,
    /// Exact probabilities under two independent dyad-effect draws.
    pub dyad_fe_invariance: f64,
    /// Adding a constant to every `A`.
    pub dyad_translation: f64,
    pub node_closed_form: f64,
    pub node_fe_invariance: f64,
    pub tetrad_closed_form: f64,
    pub tetrad_fe_invariance: f64,
    pub tetrad_translation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Sufficiency checks on `scenarios` random scenarios of each kind.
pub fn run_oracles(scenarios: usize, p: usize, seed: u64) -> OracleReport {
    let mut rng = ScenarioRng::new(seed);
    let mut r = OracleReport {
        scenarios,
        seed,
        dyad_closed_form: 0.0,
        dyad_fe_invariance: 0.0,
        dyad_translation: 0.0,
        node_closed_form: 0.0,
        node_fe_invariance: 0.0,
        tetrad_closed_form: 0.0,
        tetrad_fe_invariance: 0.0,
        tetrad_translation: 0.0,
        tolerance: ORACLE_TOLERANCE,
        pass: false,
    };
    for _ in 0..scenarios {
        let mut sc = rng.hexad_scenario(p, false);
        let exact = exact_conditional_prob(&sc);
        r.dyad_closed_form = r.dyad_closed_form.max(max_dev(&exact, &closed_form_prob(&sc)));
        let kappa = rng.uniform(-3.0, 3.0);
        let original = sc.fe.clone();
        if let ScenarioEffects::Dyad(f) = &mut sc.fe {
            f[..4].iter_mut().for_each(|a| *a += kappa);
        }
        r.dyad_translation = r.dyad_translation.max(max_dev(&exact, &exact_conditional_prob(&sc)));
        sc.fe = rng.dyad_effects();
        r.dyad_fe_invariance = r.dyad_fe_invariance.max(max_dev(&exact, &exact_conditional_prob(&sc)));
        sc.fe = original;

        let mut sc = rng.hexad_scenario(p, true);
        let exact = exact_conditional_prob(&sc);
        r.node_closed_form = r.node_closed_form.max(max_dev(&exact, &closed_form_prob(&sc)));
        sc.fe = rng.node_effects();
        r.node_fe_invariance = r.node_fe_invariance.max(max_dev(&exact, &exact_conditional_prob(&sc)));

        let mut sc = rng.tetrad_scenario(p);
        let (p1, p2) = exact_conditional_prob_tetrad(&sc);
        let closed = closed_form_prob_tetrad(&sc);
        r.tetrad_closed_form = r.tetrad_closed_form.max((p1 - closed).abs()).max((p2 - (1.0 - closed)).abs());
        let shift = rng.uniform(-3.0, 3.0);
        sc.fe[0] += shift;
        sc.fe[1] += shift;
        let (q1, _) = exact_conditional_prob_tetrad(&sc);
        r.tetrad_translation = r.tetrad_translation.max((p1 - q1).abs());
        sc.fe = std::array::from_fn(|_| rng.uniform(-2.0, 2.0));
        let (q1, _) = exact_conditional_prob_tetrad(&sc);
        r.tetrad_fe_invariance = r.tetrad_fe_invariance.max((p1 - q1).abs());
    }
    r.pass = [
        r.dyad_closed_form,
        r.dyad_fe_invariance,
        r.dyad_translation,
        r.node_closed_form,
        r.node_fe_invariance,
        r.tetrad_closed_form,
        r.tetrad_fe_invariance,
        r.tetrad_translation,
    ]
    .iter()
    .all(|&d| d < ORACLE_TOLERANCE);
    r
}

/// The two informative masks as derived here from the local triad lists.
pub fn informative_masks() -> [WiringPattern; 2] {
    DYAD_WIRINGS.map(|w| WiringPattern(mask_of(&w)))
}
