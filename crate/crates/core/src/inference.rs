//! Triad-clustered sandwich variance and Wald inference.
//!
//! Each informative subnetwork's score is added in full to every triad it
//! contains (eight for a hexad, four dyads for a tetrad); the meat is the sum
//! of outer products of those per-triad totals. The meat is not centered.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::hexad::{hessian, hexad_score, InformativeHexad};
use crate::network::Triad;
use crate::result::EstimationResult;
use crate::solver::invert_pd;

/// Largest dense accumulator (in `f64` slots) before falling back to a map.
const DENSE_CLUSTER_SLOTS: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichParts {
    /// `(-Σ H)^{-1}` at the estimate.
    pub bread: DMatrix<f64>,
    /// `Σ_t g_t g_t'`.
    pub meat: DMatrix<f64>,
    /// Clusters with a nonzero score total.
    pub n_clusters: usize,
}

/// Per-cluster score totals keyed by an integer cluster id.
#[derive(Clone, Debug)]
pub struct ClusterAccumulator {
    p: usize,
    store: Store,
}

#[derive(Clone, Debug)]
enum Store {
    Dense(Vec<f64>),
    Sparse(BTreeMap<u64, Vec<f64>>),
}

impl ClusterAccumulator {
    /// Keys must lie in `[0, key_space)`.
    pub fn new(key_space: u64, p: usize) -> Self {
        let store = if key_space.saturating_mul(p as u64) <= DENSE_CLUSTER_SLOTS {
            Store::Dense(vec![0.0; key_space as usize * p])
        } else {
            Store::Sparse(BTreeMap::new())
        };
        ClusterAccumulator { p, store }
    }

    #[inline]
    pub fn add(&mut self, key: u64, score: &[f64]) {
        let p = self.p;
        let slot = match &mut self.store {
            Store::Dense(v) => &mut v[key as usize * p..(key as usize + 1) * p],
            Store::Sparse(m) => m.entry(key).or_insert_with(|| vec![0.0; p]).as_mut_slice(),
        };
        for (a, s) in slot.iter_mut().zip(score) {
            *a += s;
        }
    }

    /// Nonzero cluster totals in key order.
    pub fn totals(&self) -> Vec<(u64, Vec<f64>)> {
        let nonzero = |g: &[f64]| g.iter().any(|&x| x != 0.0);
        match &self.store {
            Store::Dense(v) => v
                .chunks_exact(self.p)
                .enumerate()
                .filter(|(_, g)| nonzero(g))
                .map(|(key, g)| (key as u64, g.to_vec()))
                .collect(),
            Store::Sparse(m) => m
                .iter()
                .filter(|(_, g)| nonzero(g))
                .map(|(&key, g)| (key, g.clone()))
                .collect(),
        }
    }

    /// `(Σ g g', number of nonzero clusters)`.
    pub fn meat(&self) -> (DMatrix<f64>, usize) {
        let p = self.p;
        let mut meat = DMatrix::zeros(p, p);
        let mut count = 0;
        let mut visit = |g: &[f64]| {
            if g.iter().all(|&x| x == 0.0) {
                return;
            }
            count += 1;
            for r in 0..p {
                for c in 0..=r {
                    meat[(r, c)] += g[r] * g[c];
                }
            }
        };
        match &self.store {
            Store::Dense(v) => v.chunks_exact(p).for_each(&mut visit),
            Store::Sparse(m) => m.values().for_each(|g| visit(g)),
        }
        for r in 0..p {
            for c in r + 1..p {
                meat[(r, c)] = meat[(c, r)];
            }
        }
        (meat, count)
    }
}

/// `bread · meat · bread` with `bread = (-H)^{-1}`. With `dfc` the meat is
/// scaled by `G / (G - 1)`.
pub fn sandwich_from_parts(
    hessian_total: &DMatrix<f64>,
    meat: DMatrix<f64>,
    n_clusters: usize,
    dfc: bool,
) -> Result<(DMatrix<f64>, SandwichParts)> {
    let bread = invert_pd(&-hessian_total).ok_or_else(|| {
        Error::IdentificationFailure("total Hessian is singular at the estimate".into())
    })?;
    let meat = if dfc && n_clusters > 1 {
        let g = n_clusters as f64;
        meat * (g / (g - 1.0))
    } else {
        meat
    };
    let v = &bread * &meat * &bread;
    let vcov = (&v + v.transpose()) * 0.5;
    Ok((
        vcov,
        SandwichParts {
            bread,
            meat,
            n_clusters,
        },
    ))
}

/// `g_t = Σ_{σ ∋ t} s_σ(β)` for every triad covered by an informative hexad.
pub fn triad_cluster_scores(hexads: &[InformativeHexad], beta: &[f64]) -> BTreeMap<Triad, Vec<f64>> {
    let mut out: BTreeMap<Triad, Vec<f64>> = BTreeMap::new();
    for h in hexads {
        let s = hexad_score(h, beta);
        for t in h.nodes.triads() {
            let g = out.entry(t).or_insert_with(|| vec![0.0; s.len()]);
            for (a, b) in g.iter_mut().zip(&s) {
                *a += b;
            }
        }
    }
    out
}

/// Triad-clustered sandwich covariance of the hexad logit estimator.
pub fn sandwich_vcov(
    hexads: &[InformativeHexad],
    beta_hat: &[f64],
) -> Result<(DMatrix<f64>, SandwichParts)> {
    let p = beta_hat.len();
    let scores = triad_cluster_scores(hexads, beta_hat);
    let mut meat = DMatrix::zeros(p, p);
    let mut n_clusters = 0;
    for g in scores.values() {
        if g.iter().any(|&x| x != 0.0) {
            n_clusters += 1;
        }
        let g = nalgebra::DVector::from_column_slice(g);
        meat += &g * g.transpose();
    }
    sandwich_from_parts(&hessian(hexads, beta_hat), meat, n_clusters, false)
}

pub fn normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaldSummary {
    pub level: f64,
    pub z_critical: f64,
    /// Per-coordinate `β̂ ± z·se`.
    pub ci: Vec<(f64, f64)>,
    pub null: Vec<f64>,
    pub z_stats: Vec<f64>,
    /// Two-sided normal p-values against `null`.
    pub p_values: Vec<f64>,
    /// Any coordinate rejects at `1 - level`.
    pub reject: bool,
}

pub fn wald_from(beta: &[f64], se: &[f64], level: f64, null: &[f64]) -> Result<WaldSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level {level} outside (0, 1)")));
    }
    if se.len() != beta.len() || null.len() != beta.len() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: beta {}, se {}, null {}",
            beta.len(),
            se.len(),
            null.len()
        )));
    }
    if let Some(bad) = se.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(Error::DegenerateInference(format!("standard error {bad} is not positive")));
    }
    let z = normal_quantile((1.0 + level) / 2.0);
    let ci = beta.iter().zip(se).map(|(b, s)| (b - z * s, b + z * s)).collect();
    let z_stats: Vec<f64> = beta.iter().zip(se).zip(null).map(|((b, s), h)| (b - h) / s).collect();
    let p_values = z_stats.iter().map(|t| 2.0 * normal_cdf(-t.abs())).collect();
    let reject = z_stats.iter().any(|t| t.abs() > z);
    Ok(WaldSummary {
        level,
        z_critical: z,
        ci,
        null: null.to_vec(),
        z_stats,
        p_values,
        reject,
    })
}

/// Confidence intervals and Wald test of `β = null` for a fitted model.
pub fn wald_and_ci(result: &EstimationResult, level: f64, null: &[f64]) -> Result<WaldSummary> {
    let se = result
        .se
        .as_ref()
        .ok_or_else(|| Error::DegenerateInference("no standard errors available".into()))?;
    wald_from(&result.beta_hat, se, level, null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_examples() {
        let w = wald_from(&[1.0], &[0.1], 0.95, &[0.0]).unwrap();
        assert!((w.z_critical - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((w.ci[0].0 - 0.804).abs() < 1e-4);
        assert!((w.ci[0].1 - 1.196).abs() < 1e-4);

        assert!(wald_from(&[1.0], &[0.04], 0.95, &[0.0]).unwrap().reject);
        assert!(!wald_from(&[1.0], &[0.04], 0.95, &[1.0]).unwrap().reject);
    }

    #[test]
    fn wald_errors() {
        assert!(matches!(
            wald_from(&[1.0], &[0.0], 0.95, &[0.0]),
            Err(Error::DegenerateInference(_))
        ));
        assert!(matches!(
            wald_from(&[1.0], &[-1.0], 0.95, &[0.0]),
            Err(Error::DegenerateInference(_))
        ));
        assert!(matches!(
            wald_from(&[1.0], &[0.1], 1.0, &[0.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zero_meat_gives_zero_vcov() {
        let h = DMatrix::from_element(1, 1, -3.0);
        let (v, parts) = sandwich_from_parts(&h, DMatrix::zeros(1, 1), 0, false).unwrap();
        assert_eq!(v[(0, 0)], 0.0);
        assert!((parts.bread[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_scores_scales_vcov_quadratically() {
        let h = DMatrix::from_row_slice(2, 2, &[-4.0, 1.0, 1.0, -3.0]);
        let scores = [[0.3, -1.2], [0.7, 0.4], [-0.1, 0.9]];
        let meat_for = |lambda: f64| {
            let mut acc = ClusterAccumulator::new(3, 2);
            for (key, s) in scores.iter().enumerate() {
                acc.add(key as u64, &[lambda * s[0], lambda * s[1]]);
            }
            acc.meat()
        };
        let (m1, g1) = meat_for(1.0);
        let (m3, g3) = meat_for(3.0);
        let (v1, _) = sandwich_from_parts(&h, m1, g1, false).unwrap();
        let (v3, _) = sandwich_from_parts(&h, m3, g3, false).unwrap();
        assert!((v3 - v1 * 9.0).amax() < 1e-12);
    }

    #[test]
    fn dfc_scales_meat() {
        let h = DMatrix::from_element(1, 1, -2.0);
        let meat = DMatrix::from_element(1, 1, 5.0);
        let (plain, _) = sandwich_from_parts(&h, meat.clone(), 5, false).unwrap();
        let (adj, parts) = sandwich_from_parts(&h, meat, 5, true).unwrap();
        assert!((adj[(0, 0)] - plain[(0, 0)] * 1.25).abs() < 1e-15);
        assert!((parts.meat[(0, 0)] - 6.25).abs() < 1e-15);
    }

    #[test]
    fn singular_bread_is_identification_failure() {
        let h = DMatrix::zeros(1, 1);
        assert!(matches!(
            sandwich_from_parts(&h, DMatrix::zeros(1, 1), 0, false),
            Err(Error::IdentificationFailure(_))
        ));
    }

    #[test]
    fn sparse_and_dense_accumulators_agree() {
        let mut dense = ClusterAccumulator::new(10, 1);
        let mut sparse = ClusterAccumulator {
            p: 1,
            store: Store::Sparse(BTreeMap::new()),
        };
        for (key, s) in [(3u64, 1.5), (7, -2.0), (3, 0.5), (9, 0.0)] {
            dense.add(key, &[s]);
            sparse.add(key, &[s]);
        }
        assert_eq!(dense.meat(), sparse.meat());
        assert_eq!(dense.totals(), sparse.totals());
        assert_eq!(dense.meat().1, 2);
    }
}
