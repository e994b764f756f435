//! Tetrad logit for bipartite dyadic networks with node effects `A_i + B_j`.
//!
//! A dyadic network is stored as a triadic one whose third part has a single
//! node, so membership, indexes and covariates share one implementation.

use crate::error::{Error, Result};
use crate::hexad::finish_result;
use crate::inference::ClusterAccumulator;
use crate::logit::{BinaryLogitData, Objective};
use crate::network::{Covariates, NetworkOptions, Triad, TriadicNetwork};
use crate::result::{EnumeratorKind, EstimationResult, ModelKind};
use crate::solver::{maximize, FitConfig};

/// Largest part size for the exhaustive tetrad loop.
pub const TETRAD_DENSE_MAX_N: u32 = 200;

/// Bipartite network on parts of size `n`.
#[derive(Clone, Debug)]
pub struct DyadicNetwork {
    n: u32,
    inner: TriadicNetwork,
}

impl DyadicNetwork {
    /// `edges` are 0-based `(i, j)`; `values[(i * n + j) * p + d]`.
    pub fn new(
        n: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
        p: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidArgument(
                "part size and covariate dimension must be positive".into(),
            ));
        }
        let expected = (n as usize).pow(2) * p;
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "expected {expected} covariate values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("covariates must be finite".into()));
        }
        let mut triads = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "dyad ({}, {}) invalid for n = {n}",
                    i + 1,
                    j + 1
                )));
            }
            triads.push(Triad::new(i, j, 0));
        }
        let covariates = Covariates::generated(p, move |t, out| {
            let start = (t.i as usize * n as usize + t.j as usize) * p;
            out.copy_from_slice(&values[start..start + p]);
        });
        let inner = TriadicNetwork::with_options(n, triads, covariates, NetworkOptions::default())
            .map_err(|e| match e {
                Error::InvalidArgument(msg) => Error::InvalidArgument(msg.replace("triad", "dyad")),
                other => other,
            })?;
        Ok(DyadicNetwork { n, inner })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> usize {
        self.inner.p()
    }

    pub fn n_links(&self) -> usize {
        self.inner.n_links()
    }

    /// 0-based `(i, j)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.inner.edges().iter().map(|t| (t.i, t.j))
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        i < self.n && j < self.n && self.inner.y(i, j, 0)
    }

    pub fn covariate(&self, i: u32, j: u32) -> Vec<f64> {
        self.inner.covariate(Triad::new(i, j, 0))
    }

    fn add_scaled(&self, i: u32, j: u32, coef: f64, acc: &mut [f64], scratch: &mut [f64]) {
        self.inner
            .covariates()
            .add_scaled(Triad::new(i, j, 0), self.n, coef, acc, scratch);
    }

    /// Part-2 neighbours of `i`, ascending.
    fn row(&self, i: u32) -> &[u32] {
        // index_ik maps (i, k) to the sorted j's.
        self.inner.index_ik(i, 0)
    }

    /// Part-1 neighbours of `j`, ascending.
    fn column(&self, j: u32) -> &[u32] {
        self.inner.index_jk(j, 0)
    }

    /// `(links / n, links / n²)`.
    pub fn average_degree_and_density(&self) -> (f64, f64) {
        let nn = self.n as f64;
        let rho = self.n_links() as f64 / (nn * nn);
        (nn * rho, rho)
    }

    pub(crate) fn as_triadic(&self) -> &TriadicNetwork {
        &self.inner
    }
}

/// Four nodes `(i₁, i₂ | j₁, j₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tetrad {
    pub i: [u32; 2],
    pub j: [u32; 2],
}

impl Tetrad {
    pub fn new(i: [u32; 2], j: [u32; 2]) -> Result<Self> {
        if i[0] == i[1] || j[0] == j[1] {
            return Err(Error::InvalidArgument(format!(
                "tetrad nodes must be distinct within parts: {i:?} {j:?}"
            )));
        }
        Ok(Tetrad { i, j })
    }

    /// Dyads in the order 11, 12, 21, 22.
    pub fn dyads(&self) -> [(u32, u32); 4] {
        [
            (self.i[0], self.j[0]),
            (self.i[0], self.j[1]),
            (self.i[1], self.j[0]),
            (self.i[1], self.j[1]),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InformativeTetrad {
    pub nodes: Tetrad,
    pub label: u8,
    /// `X₁₁ + X₂₂`.
    pub w1: Vec<f64>,
    /// `X₁₂ + X₂₁`.
    pub w2: Vec<f64>,
}

impl InformativeTetrad {
    fn from_network(net: &DyadicNetwork, nodes: Tetrad, label: u8) -> Self {
        let p = net.p();
        let mut scratch = vec![0.0; p];
        let [d11, d12, d21, d22] = nodes.dyads();
        let mut w1 = vec![0.0; p];
        let mut w2 = vec![0.0; p];
        net.add_scaled(d11.0, d11.1, 1.0, &mut w1, &mut scratch);
        net.add_scaled(d22.0, d22.1, 1.0, &mut w1, &mut scratch);
        net.add_scaled(d12.0, d12.1, 1.0, &mut w2, &mut scratch);
        net.add_scaled(d21.0, d21.1, 1.0, &mut w2, &mut scratch);
        InformativeTetrad {
            nodes,
            label,
            w1,
            w2,
        }
    }

    /// `W_τ = (X₁₁ + X₂₂) - (X₁₂ + X₂₁)`.
    pub fn contrast(&self) -> Vec<f64> {
        self.w1.iter().zip(&self.w2).map(|(a, b)| a - b).collect()
    }
}

/// 1 for `{11, 22}` alone, 2 for `{12, 21}` alone, else 0.
pub fn tetrad_indicators(net: &DyadicNetwork, tetrad: &Tetrad) -> u8 {
    let [y11, y12, y21, y22] = tetrad.dyads().map(|(i, j)| net.contains(i, j));
    match (y11, y12, y21, y22) {
        (true, false, false, true) => 1,
        (false, true, true, false) => 2,
        _ => 0,
    }
}

fn visit_dense(net: &DyadicNetwork, mut f: impl FnMut(Tetrad, u8)) -> Result<()> {
    let n = net.n();
    if n > TETRAD_DENSE_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "dense tetrad enumeration limited to n <= {TETRAD_DENSE_MAX_N}, got {n}"
        )));
    }
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            for j1 in 0..n {
                for j2 in j1 + 1..n {
                    let t = Tetrad {
                        i: [i1, i2],
                        j: [j1, j2],
                    };
                    let label = tetrad_indicators(net, &t);
                    if label > 0 {
                        f(t, label);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Pivot on `i₁`: a neighbour `j_a` and a non-neighbour `j_b`; partners are
/// `i₂ > i₁` adjacent to `j_b` and not to `j_a`. `j_a < j_b` gives wiring 1.
fn visit_sparse(net: &DyadicNetwork, mut f: impl FnMut(Tetrad, u8)) {
    let n = net.n();
    for i in 0..n {
        let row = net.row(i);
        for &ja in row {
            for jb in 0..n {
                if row.binary_search(&jb).is_ok() {
                    continue;
                }
                let (j, label) = if ja < jb { ([ja, jb], 1) } else { ([jb, ja], 2) };
                let column = net.column(jb);
                let first = column.partition_point(|&x| x <= i);
                for &i2 in &column[first..] {
                    if !net.contains(i2, ja) {
                        f(Tetrad { i: [i, i2], j }, label);
                    }
                }
            }
        }
    }
}

pub fn enumerate_tetrads_dense(net: &DyadicNetwork) -> Result<Vec<InformativeTetrad>> {
    let mut out = Vec::new();
    visit_dense(net, |t, c| out.push(InformativeTetrad::from_network(net, t, c)))?;
    Ok(out)
}

pub fn enumerate_tetrads_sparse(net: &DyadicNetwork) -> Vec<InformativeTetrad> {
    let mut out = Vec::new();
    visit_sparse(net, |t, c| out.push(InformativeTetrad::from_network(net, t, c)));
    out
}

/// Binary conditional logit on tetrad contrasts, clustered by dyad.
pub fn tetrad_fit(net: &DyadicNetwork, cfg: &FitConfig) -> Result<EstimationResult> {
    cfg.validate()?;
    let p = net.p();
    let n = net.n();
    let mut data = BinaryLogitData::new(p);
    let mut v = vec![0.0; p];
    let mut scratch = vec![0.0; p];
    visit_sparse(net, |t, label| {
        let sign = if label == 1 { 1.0 } else { -1.0 };
        v.fill(0.0);
        let [d11, d12, d21, d22] = t.dyads();
        net.add_scaled(d11.0, d11.1, sign, &mut v, &mut scratch);
        net.add_scaled(d22.0, d22.1, sign, &mut v, &mut scratch);
        net.add_scaled(d12.0, d12.1, -sign, &mut v, &mut scratch);
        net.add_scaled(d21.0, d21.1, -sign, &mut v, &mut scratch);
        data.push(&v);
    });
    let n_informative = data.n_obs();
    if n_informative == 0 {
        return Err(Error::NoInformation {
            n_links: net.n_links(),
            n_informative,
        });
    }
    let outcome = maximize(&data, cfg)?;

    let mut clusters = ClusterAccumulator::new((n as u64).pow(2), p);
    let mut obs = 0;
    let mut s = vec![0.0; p];
    visit_sparse(net, |t, _| {
        data.obs_score(obs, &outcome.beta, &mut s);
        for (i, j) in t.dyads() {
            clusters.add(i as u64 * n as u64 + j as u64, &s);
        }
        obs += 1;
    });
    let (meat, n_clusters) = clusters.meat();
    finish_result(
        ModelKind::Dyadic,
        EnumeratorKind::SparseIndex,
        net.as_triadic(),
        outcome,
        n_informative,
        meat,
        n_clusters,
        cfg.dfc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net_from(n: u32, dyads: &[(u32, u32)]) -> DyadicNetwork {
        let x = (0..(n * n) as usize).map(|v| (v as f64 * 0.37).sin()).collect();
        DyadicNetwork::new(n, dyads.iter().map(|&(i, j)| (i - 1, j - 1)), 1, x).unwrap()
    }

    fn base() -> Tetrad {
        Tetrad::new([0, 1], [0, 1]).unwrap()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(tetrad_indicators(&net_from(2, &[(1, 1), (2, 2)]), &base()), 1);
        assert_eq!(tetrad_indicators(&net_from(2, &[(1, 2), (2, 1)]), &base()), 2);
        let full = net_from(2, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        assert_eq!(tetrad_indicators(&full, &base()), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DyadicNetwork::new(2, [(0, 0), (0, 0)], 1, vec![0.0; 4]).is_err());
        assert!(DyadicNetwork::new(2, [(2, 0)], 1, vec![0.0; 4]).is_err());
        assert!(DyadicNetwork::new(2, [], 1, vec![0.0; 3]).is_err());
        assert!(Tetrad::new([1, 1], [0, 1]).is_err());
    }

    #[test]
    fn sparse_matches_dense() {
        let net = net_from(5, &[(1, 1), (2, 2), (1, 3), (3, 1), (4, 5), (5, 4), (3, 3), (2, 5)]);
        let mut sparse = enumerate_tetrads_sparse(&net);
        sparse.sort_by_key(|t| (t.nodes, t.label));
        let dense = enumerate_tetrads_dense(&net).unwrap();
        assert!(!dense.is_empty());
        assert_eq!(sparse, dense);
    }

    #[test]
    fn loglik_at_zero_is_half() {
        let net = net_from(4, &[(1, 1), (2, 2), (3, 4), (4, 3), (1, 4)]);
        let tetrads = enumerate_tetrads_sparse(&net);
        let mut data = BinaryLogitData::new(1);
        for t in &tetrads {
            data.push(&t.contrast());
        }
        let ll = data.evaluate(&[0.0]).loglik;
        assert!((ll - tetrads.len() as f64 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn empty_network_has_no_information() {
        let net = net_from(3, &[]);
        assert!(matches!(
            tetrad_fit(&net, &FitConfig::default()),
            Err(Error::NoInformation { .. })
        ));
    }
}
