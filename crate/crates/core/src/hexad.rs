//! The hexad logit estimator.
//!
//! A hexad is informative when its eight triads carry exactly one of the two
//! wirings [`WiringPattern::INFORMATIVE_1`] / [`WiringPattern::INFORMATIVE_2`].
//! Conditional on that event the wiring label follows a binary logit in the
//! covariate contrast, free of the dyad-level effects, and the estimator
//! maximizes the sum of those conditional log-likelihoods.
//!
//! Hexads are summed once per canonical node set (`i₁ < i₂`, `j₁ < j₂`,
//! `k₁ < k₂`). The sum over all eight orderings of a node set is exactly
//! eight times the canonical sum, so the maximizer and the sandwich
//! covariance are unaffected.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inference::{sandwich_from_parts, ClusterAccumulator};
use crate::logit::{conditional_prob, log_logistic, logistic, BinaryLogitData, Objective};
use crate::network::{Triad, TriadicNetwork};
use crate::result::{matrix_rows, EnumeratorKind, EstimationResult, ModelKind};
use crate::solver::{maximize, FitConfig, NewtonOutcome};
use crate::wiring::{WiringPattern, TRIAD_ORDER};

/// Largest part size the exhaustive enumerator accepts by default.
pub const DENSE_MAX_N: u32 = 12;

/// Six nodes, two per part. Not necessarily canonical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hexad {
    pub i: [u32; 2],
    pub j: [u32; 2],
    pub k: [u32; 2],
}

impl Hexad {
    pub fn new(i: [u32; 2], j: [u32; 2], k: [u32; 2]) -> Result<Self> {
        if i[0] == i[1] || j[0] == j[1] || k[0] == k[1] {
            return Err(Error::InvalidArgument(format!(
                "hexad nodes must be distinct within parts: {i:?} {j:?} {k:?}"
            )));
        }
        Ok(Hexad { i, j, k })
    }

    pub fn is_canonical(&self) -> bool {
        self.i[0] < self.i[1] && self.j[0] < self.j[1] && self.k[0] < self.k[1]
    }

    /// The canonical ordering of the same node set, and whether an odd number
    /// of parts had to be swapped (which exchanges the two informative
    /// wirings).
    pub fn canonical(&self) -> (Hexad, bool) {
        let mut flips = 0;
        let mut sort = |pair: [u32; 2]| {
            if pair[0] > pair[1] {
                flips += 1;
                [pair[1], pair[0]]
            } else {
                pair
            }
        };
        let h = Hexad {
            i: sort(self.i),
            j: sort(self.j),
            k: sort(self.k),
        };
        (h, flips % 2 == 1)
    }

    /// Global triad for local labels `a, b, c ∈ {1, 2}`.
    #[inline]
    pub fn triad(&self, a: u8, b: u8, c: u8) -> Triad {
        Triad::new(
            self.i[(a - 1) as usize],
            self.j[(b - 1) as usize],
            self.k[(c - 1) as usize],
        )
    }

    /// The eight triads in mask-bit order.
    pub fn triads(&self) -> [Triad; 8] {
        TRIAD_ORDER.map(|(a, b, c)| self.triad(a, b, c))
    }

    pub fn restriction(&self, net: &TriadicNetwork) -> WiringPattern {
        let mut mask = 0u8;
        for (bit, t) in self.triads().into_iter().enumerate() {
            if net.contains(t) {
                mask |= 1 << bit;
            }
        }
        WiringPattern(mask)
    }
}

/// A hexad whose restriction is one of the two informative wirings.
#[derive(Clone, Debug, PartialEq)]
pub struct InformativeHexad {
    /// Canonical node set.
    pub nodes: Hexad,
    /// 1 or 2: which informative wiring the network shows.
    pub label: u8,
    /// `X₁₁₁ + X₁₂₂ + X₂₁₂ + X₂₂₁`.
    pub w1: Vec<f64>,
    /// `X₁₂₁ + X₁₁₂ + X₂₁₁ + X₂₂₂`.
    pub w2: Vec<f64>,
}

impl InformativeHexad {
    pub fn from_network(net: &TriadicNetwork, nodes: Hexad, label: u8) -> Self {
        let p = net.p();
        let mut w1 = vec![0.0; p];
        let mut w2 = vec![0.0; p];
        let mut scratch = vec![0.0; p];
        let one = WiringPattern::INFORMATIVE_1.0;
        for (bit, t) in nodes.triads().into_iter().enumerate() {
            let target = if one >> bit & 1 == 1 { &mut w1 } else { &mut w2 };
            net.covariates().add_scaled(t, net.n(), 1.0, target, &mut scratch);
        }
        InformativeHexad {
            nodes,
            label,
            w1,
            w2,
        }
    }

    /// `W_σ = W_{σ,1} - W_{σ,2}`.
    pub fn contrast(&self) -> Vec<f64> {
        self.w1.iter().zip(&self.w2).map(|(a, b)| a - b).collect()
    }

    /// `W_label - W_other`.
    pub fn oriented_contrast(&self) -> Vec<f64> {
        let sign = if self.label == 1 { 1.0 } else { -1.0 };
        self.contrast().into_iter().map(|x| sign * x).collect()
    }
}

/// `(S_{σ,1}, S_{σ,2})` for any hexad with distinct nodes within parts.
pub fn wiring_indicators(net: &TriadicNetwork, hexad: &Hexad) -> (u8, u8) {
    let mask = hexad.restriction(net);
    (
        (mask == WiringPattern::INFORMATIVE_1) as u8,
        (mask == WiringPattern::INFORMATIVE_2) as u8,
    )
}

/// Enumeration strategy for informative hexads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Enumerator {
    /// Exhaustive `O(N⁶)` loop; guarded by `max_n`.
    Dense { max_n: u32 },
    /// Pivot search; uses column bitsets when the network has them.
    #[default]
    Sparse,
}

/// Calls `f(hexad, label)` for every informative canonical hexad, each
/// exactly once, in an order fixed by the strategy and the network.
pub fn visit_informative(
    net: &TriadicNetwork,
    enumerator: Enumerator,
    f: impl FnMut(Hexad, u8),
) -> Result<EnumeratorKind> {
    match enumerator {
        Enumerator::Dense { max_n } => {
            if net.n() > max_n {
                return Err(Error::ResourceLimit(format!(
                    "dense hexad enumeration limited to n <= {max_n}, got {}",
                    net.n()
                )));
            }
            visit_dense(net, f);
            Ok(EnumeratorKind::Dense)
        }
        Enumerator::Sparse => Ok(visit_sparse(net, f)),
    }
}

fn visit_dense(net: &TriadicNetwork, mut f: impl FnMut(Hexad, u8)) {
    let n = net.n();
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            for j1 in 0..n {
                for j2 in j1 + 1..n {
                    for k1 in 0..n {
                        for k2 in k1 + 1..n {
                            let h = Hexad {
                                i: [i1, i2],
                                j: [j1, j2],
                                k: [k1, k2],
                            };
                            match h.restriction(net) {
                                WiringPattern::INFORMATIVE_1 => f(h, 1),
                                WiringPattern::INFORMATIVE_2 => f(h, 2),
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Pivot search. For each part-1 node `i` and pair of its links
/// `(i, j₁, k_a)`, `(i, j₂, k_b)` with `j₁ < j₂`, `k_a ≠ k_b`, the partner
/// `i₂ > i` must carry `(i₂, j₁, k_b)` and `(i₂, j₂, k_a)` and none of the
/// other four triads. Restricting to `i₂ > i` and `j₁ < j₂` reaches every
/// informative hexad from exactly one pivot pair, so no deduplication is
/// needed. `k_a < k_b` yields wiring 1, `k_a > k_b` wiring 2.
fn visit_sparse(net: &TriadicNetwork, mut f: impl FnMut(Hexad, u8)) -> EnumeratorKind {
    let n = net.n();
    let columns = net.column_bits();
    let mut candidates: Vec<u32> = Vec::new();
    for i in 0..n {
        let rows: Vec<(u32, &[u32])> = (0..n)
            .map(|j| (j, net.index_ij(i, j)))
            .filter(|(_, ks)| !ks.is_empty())
            .collect();
        for (a, &(j1, ks1)) in rows.iter().enumerate() {
            for &(j2, ks2) in &rows[a + 1..] {
                for &ka in ks1 {
                    for &kb in ks2 {
                        if ka == kb || net.y(i, j1, kb) || net.y(i, j2, ka) {
                            continue;
                        }
                        candidates.clear();
                        match columns {
                            Some(cols) => {
                                let present1 = cols.column(j1, kb);
                                let present2 = cols.column(j2, ka);
                                let absent1 = cols.column(j1, ka);
                                let absent2 = cols.column(j2, kb);
                                let first = (i + 1) as usize;
                                for w in first / 64..cols.words_per_column() {
                                    let mut word =
                                        present1[w] & present2[w] & !absent1[w] & !absent2[w];
                                    if w == first / 64 {
                                        word &= u64::MAX.checked_shl((first % 64) as u32).unwrap_or(0);
                                    }
                                    while word != 0 {
                                        candidates.push((w * 64) as u32 + word.trailing_zeros());
                                        word &= word - 1;
                                    }
                                }
                            }
                            None => {
                                intersect_above(
                                    net.index_jk(j1, kb),
                                    net.index_jk(j2, ka),
                                    i,
                                    &mut candidates,
                                );
                                candidates.retain(|&i2| !net.y(i2, j1, ka) && !net.y(i2, j2, kb));
                            }
                        }
                        let (k, label) = if ka < kb { ([ka, kb], 1) } else { ([kb, ka], 2) };
                        for &i2 in &candidates {
                            f(
                                Hexad {
                                    i: [i, i2],
                                    j: [j1, j2],
                                    k,
                                },
                                label,
                            );
                        }
                    }
                }
            }
        }
    }
    if columns.is_some() {
        EnumeratorKind::SparseBitset
    } else {
        EnumeratorKind::SparseIndex
    }
}

/// Elements common to two ascending lists that exceed `floor`.
fn intersect_above(a: &[u32], b: &[u32], floor: u32, out: &mut Vec<u32>) {
    let start_a = a.partition_point(|&x| x <= floor);
    let start_b = b.partition_point(|&x| x <= floor);
    let (mut x, mut y) = (start_a, start_b);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
}

pub fn enumerate_informative_dense(net: &TriadicNetwork) -> Result<Vec<InformativeHexad>> {
    let mut out = Vec::new();
    visit_informative(net, Enumerator::Dense { max_n: DENSE_MAX_N }, |h, label| {
        out.push(InformativeHexad::from_network(net, h, label))
    })?;
    Ok(out)
}

pub fn enumerate_informative_sparse(net: &TriadicNetwork) -> Vec<InformativeHexad> {
    let mut out = Vec::new();
    visit_sparse(net, |h, label| out.push(InformativeHexad::from_network(net, h, label)));
    out
}

/// Count of informative hexads without materializing them.
pub fn count_informative(net: &TriadicNetwork) -> usize {
    let mut count = 0;
    visit_sparse(net, |_, _| count += 1);
    count
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_σ log p_{σ,label}(β)`.
pub fn log_likelihood(hexads: &[InformativeHexad], beta: &[f64]) -> f64 {
    hexads
        .iter()
        .map(|h| {
            let index = dot(&h.w1, beta) - dot(&h.w2, beta);
            if h.label == 1 {
                log_logistic(index)
            } else {
                log_logistic(-index)
            }
        })
        .sum()
}

/// `W̄_σ(β) = p₁ W₁ + p₂ W₂`.
fn mean_covariate(h: &InformativeHexad, beta: &[f64]) -> (f64, f64, Vec<f64>) {
    let (p1, p2) = conditional_prob(beta, &h.w1, &h.w2);
    let wbar = h.w1.iter().zip(&h.w2).map(|(a, b)| p1 * a + p2 * b).collect();
    (p1, p2, wbar)
}

/// `s_σ(β) = W_label - W̄_σ(β)`.
pub fn hexad_score(h: &InformativeHexad, beta: &[f64]) -> Vec<f64> {
    let (_, _, wbar) = mean_covariate(h, beta);
    let chosen = if h.label == 1 { &h.w1 } else { &h.w2 };
    chosen.iter().zip(&wbar).map(|(w, m)| w - m).collect()
}

pub fn score(hexads: &[InformativeHexad], beta: &[f64]) -> Vec<f64> {
    let mut total = vec![0.0; beta.len()];
    for h in hexads {
        for (t, s) in total.iter_mut().zip(hexad_score(h, beta)) {
            *t += s;
        }
    }
    total
}

/// `Σ_σ -Σ_c p_c (W_c - W̄)(W_c - W̄)'`.
pub fn hessian(hexads: &[InformativeHexad], beta: &[f64]) -> DMatrix<f64> {
    let p = beta.len();
    let mut total = DMatrix::zeros(p, p);
    for h in hexads {
        let (p1, p2, wbar) = mean_covariate(h, beta);
        let wbar = DVector::from_vec(wbar);
        for (prob, w) in [(p1, &h.w1), (p2, &h.w2)] {
            let d = DVector::from_column_slice(w) - &wbar;
            total -= &d * d.transpose() * prob;
        }
    }
    total
}

/// Writes `W_label - W_other` for a hexad straight from the network.
fn oriented_contrast(
    net: &TriadicNetwork,
    h: &Hexad,
    label: u8,
    out: &mut [f64],
    scratch: &mut [f64],
) {
    out.fill(0.0);
    let present = if label == 1 {
        WiringPattern::INFORMATIVE_1.0
    } else {
        WiringPattern::INFORMATIVE_2.0
    };
    for (bit, t) in h.triads().into_iter().enumerate() {
        let sign = if present >> bit & 1 == 1 { 1.0 } else { -1.0 };
        net.covariates().add_scaled(t, net.n(), sign, out, scratch);
    }
}

pub fn fit(net: &TriadicNetwork, cfg: &FitConfig) -> Result<EstimationResult> {
    fit_with(net, cfg, Enumerator::Sparse)
}

/// Hexad logit fit with the triad-clustered sandwich covariance.
///
/// Informative hexads are streamed into a compact contrast array; the
/// sandwich pass re-runs the (deterministic) enumeration to attribute each
/// hexad's score to its eight triads.
pub fn fit_with(
    net: &TriadicNetwork,
    cfg: &FitConfig,
    enumerator: Enumerator,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let p = net.p();
    if let Some(start) = &cfg.start {
        if start.len() != p {
            return Err(Error::InvalidArgument(format!(
                "start has length {}, expected {p}",
                start.len()
            )));
        }
    }
    let mut data = BinaryLogitData::new(p);
    let mut contrast = vec![0.0; p];
    let mut scratch = vec![0.0; p];
    let kind = visit_informative(net, enumerator, |h, label| {
        oriented_contrast(net, &h, label, &mut contrast, &mut scratch);
        data.push(&contrast);
    })?;
    let n_informative = data.n_obs();
    if n_informative == 0 {
        return Err(Error::NoInformation {
            n_links: net.n_links(),
            n_informative,
        });
    }
    let outcome = maximize(&data, cfg)?;

    let n = net.n();
    let mut clusters = ClusterAccumulator::new((n as u64).pow(3), p);
    let mut obs = 0;
    let mut s = vec![0.0; p];
    visit_informative(net, enumerator, |h, _| {
        data.obs_score(obs, &outcome.beta, &mut s);
        for t in h.triads() {
            clusters.add(t.index_unchecked(n) as u64, &s);
        }
        obs += 1;
    })?;
    debug_assert_eq!(obs, n_informative);
    let (meat, n_clusters) = clusters.meat();
    finish_result(
        ModelKind::DyadFe,
        kind,
        net,
        outcome,
        n_informative,
        meat,
        n_clusters,
        cfg.dfc,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish_result(
    model: ModelKind,
    enumerator: EnumeratorKind,
    net: &TriadicNetwork,
    outcome: NewtonOutcome,
    n_informative: usize,
    meat: DMatrix<f64>,
    n_clusters: usize,
    dfc: bool,
) -> Result<EstimationResult> {
    let vcov = match sandwich_from_parts(&outcome.evaluation.hessian, meat, n_clusters, dfc) {
        Ok((vcov, _)) => Some(vcov),
        Err(_) if !outcome.converged() => None,
        Err(e) => return Err(e),
    };
    let se = vcov
        .as_ref()
        .map(|v| (0..v.nrows()).map(|d| v[(d, d)].max(0.0).sqrt()).collect());
    let (avg_degree, rho_hat) = match model {
        ModelKind::Dyadic => {
            let nn = net.n() as f64;
            let rho = net.n_links() as f64 / (nn * nn);
            (nn * rho, rho)
        }
        _ => net.average_degree_and_density(),
    };
    Ok(EstimationResult {
        model,
        enumerator,
        beta_hat: outcome.beta.clone(),
        vcov: vcov.as_ref().map(matrix_rows),
        se,
        loglik: outcome.evaluation.loglik,
        iterations: outcome.iterations,
        converged: outcome.converged(),
        status: outcome.status,
        n_informative,
        n_links: net.n_links(),
        n_clusters,
        rho_hat,
        avg_degree,
    })
}

/// `Λ(W_σ'β)`: the conditional probability of wiring 1.
pub fn wiring_one_probability(h: &InformativeHexad, beta: &[f64]) -> f64 {
    logistic(dot(&h.contrast(), beta))
}
