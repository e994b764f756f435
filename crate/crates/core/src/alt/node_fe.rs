//! Hexad logit under node-level effects `A_i + B_j + C_k`.
//!
//! With node effects, any two node-disjoint hyperedges on a hexad carry the
//! same six effects, so the four wirings of degree sequence (1,…,1) are
//! exchangeable up to covariates and the label follows a 4-way conditional
//! logit.

use crate::error::{Error, Result};
use crate::hexad::{finish_result, Hexad, DENSE_MAX_N};
use crate::inference::ClusterAccumulator;
use crate::logit::{MultinomialLogitData, Objective};
use crate::network::TriadicNetwork;
use crate::result::{EnumeratorKind, EstimationResult, ModelKind};
use crate::solver::{maximize, FitConfig};
use crate::wiring::WiringPattern;

/// Local triads of wiring `c` (1-based), the first one holding `i₁`.
pub const NODE_FE_WIRINGS: [[(u8, u8, u8); 2]; 4] = [
    [(1, 1, 1), (2, 2, 2)],
    [(1, 2, 1), (2, 1, 2)],
    [(1, 2, 2), (2, 1, 1)],
    [(1, 1, 2), (2, 2, 1)],
];

#[derive(Clone, Debug, PartialEq)]
pub struct NodeFeInformativeHexad {
    pub nodes: Hexad,
    /// 1..=4.
    pub label: u8,
    /// `W̃_{σ,c}` for `c = 1..4`.
    pub w: [Vec<f64>; 4],
}

impl NodeFeInformativeHexad {
    pub fn from_network(net: &TriadicNetwork, nodes: Hexad, label: u8) -> Self {
        let p = net.p();
        let mut scratch = vec![0.0; p];
        let w = NODE_FE_WIRINGS.map(|pair| {
            let mut acc = vec![0.0; p];
            for (a, b, c) in pair {
                net.covariates()
                    .add_scaled(nodes.triad(a, b, c), net.n(), 1.0, &mut acc, &mut scratch);
            }
            acc
        });
        NodeFeInformativeHexad { nodes, label, w }
    }
}

/// 0 when no (1,…,1) wiring matches the restriction, else its label.
pub fn nodefe_indicators(net: &TriadicNetwork, hexad: &Hexad) -> u8 {
    let mask = hexad.restriction(net);
    WiringPattern::NODE_LEVEL
        .iter()
        .position(|&w| w == mask)
        .map_or(0, |c| c as u8 + 1)
}

fn visit_dense(net: &TriadicNetwork, max_n: u32, mut f: impl FnMut(Hexad, u8)) -> Result<()> {
    let n = net.n();
    if n > max_n {
        return Err(Error::ResourceLimit(format!(
            "dense hexad enumeration limited to n <= {max_n}, got {n}"
        )));
    }
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
                            let label = nodefe_indicators(net, &h);
                            if label > 0 {
                                f(h, label);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Pairs of node-disjoint hyperedges `e < e'` (in `i`), then a check that the
/// other six triads are absent. Each informative hexad holds exactly one
/// hyperedge on its smaller part-1 node, so it is reached once.
fn visit_pairs(net: &TriadicNetwork, mut f: impl FnMut(Hexad, u8)) {
    let edges = net.edges();
    for (pos, e) in edges.iter().enumerate() {
        // Edges are sorted by i: skip the rest of e's own i-block.
        let start = pos + edges[pos..].partition_point(|t| t.i == e.i);
        for g in &edges[start..] {
            if g.j == e.j || g.k == e.k {
                continue;
            }
            let (j, x) = if e.j < g.j { ([e.j, g.j], 1) } else { ([g.j, e.j], 2) };
            let (k, y) = if e.k < g.k { ([e.k, g.k], 1) } else { ([g.k, e.k], 2) };
            let label = match (x, y) {
                (1, 1) => 1,
                (2, 1) => 2,
                (2, 2) => 3,
                _ => 4,
            };
            let h = Hexad { i: [e.i, g.i], j, k };
            if h.restriction(net) == WiringPattern::NODE_LEVEL[label as usize - 1] {
                f(h, label);
            }
        }
    }
}

pub fn enumerate_nodefe_dense(net: &TriadicNetwork) -> Result<Vec<NodeFeInformativeHexad>> {
    let mut out = Vec::new();
    visit_dense(net, DENSE_MAX_N, |h, c| {
        out.push(NodeFeInformativeHexad::from_network(net, h, c))
    })?;
    Ok(out)
}

pub fn enumerate_nodefe_pairs(net: &TriadicNetwork) -> Vec<NodeFeInformativeHexad> {
    let mut out = Vec::new();
    visit_pairs(net, |h, c| out.push(NodeFeInformativeHexad::from_network(net, h, c)));
    out
}

/// 4-category conditional logit with the triad-clustered sandwich.
pub fn nodefe_fit(net: &TriadicNetwork, cfg: &FitConfig) -> Result<EstimationResult> {
    cfg.validate()?;
    let p = net.p();
    let n = net.n();
    let mut data = MultinomialLogitData::new(p, 4);
    let mut block = vec![0.0; 4 * p];
    let mut scratch = vec![0.0; p];
    visit_pairs(net, |h, label| {
        block.fill(0.0);
        for (c, pair) in NODE_FE_WIRINGS.iter().enumerate() {
            for &(a, b, cc) in pair {
                net.covariates().add_scaled(
                    h.triad(a, b, cc),
                    n,
                    1.0,
                    &mut block[c * p..(c + 1) * p],
                    &mut scratch,
                );
            }
        }
        data.push(&block, label as usize - 1);
    });
    let n_informative = data.n_obs();
    if n_informative == 0 {
        return Err(Error::NoInformation {
            n_links: net.n_links(),
            n_informative,
        });
    }
    let outcome = maximize(&data, cfg)?;

    let mut clusters = ClusterAccumulator::new((n as u64).pow(3), p);
    let mut obs = 0;
    let mut s = vec![0.0; p];
    visit_pairs(net, |h, _| {
        data.obs_score(obs, &outcome.beta, &mut s);
        for t in h.triads() {
            clusters.add(t.index_unchecked(n) as u64, &s);
        }
        obs += 1;
    });
    let (meat, n_clusters) = clusters.meat();
    finish_result(
        ModelKind::NodeFe,
        EnumeratorKind::DisjointPairs,
        net,
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
    use crate::network::{Covariates, Triad};

    fn net_from(n: u32, triads: &[(u32, u32, u32)]) -> TriadicNetwork {
        let edges = triads
            .iter()
            .map(|&(i, j, k)| Triad::from_one_based(i, j, k, n).unwrap());
        let x = (0..(n as usize).pow(3)).map(|v| v as f64 * 0.1).collect();
        TriadicNetwork::new(n, edges, Covariates::dense(1, x)).unwrap()
    }

    fn base() -> Hexad {
        Hexad::new([0, 1], [0, 1], [0, 1]).unwrap()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(nodefe_indicators(&net_from(2, &[(1, 1, 1), (2, 2, 2)]), &base()), 1);
        assert_eq!(nodefe_indicators(&net_from(2, &[(1, 2, 1), (2, 1, 2)]), &base()), 2);
        assert_eq!(nodefe_indicators(&net_from(2, &[(1, 2, 2), (2, 1, 1)]), &base()), 3);
        assert_eq!(nodefe_indicators(&net_from(2, &[(1, 1, 2), (2, 2, 1)]), &base()), 4);
        let extra = net_from(2, &[(1, 1, 1), (2, 2, 2), (1, 2, 1)]);
        assert_eq!(nodefe_indicators(&extra, &base()), 0);
    }

    #[test]
    fn wiring_table_matches_masks() {
        for (c, pair) in NODE_FE_WIRINGS.iter().enumerate() {
            assert_eq!(WiringPattern::from_triads(pair), WiringPattern::NODE_LEVEL[c]);
        }
    }

    #[test]
    fn pair_search_matches_dense() {
        let net = net_from(
            4,
            &[(1, 1, 1), (2, 2, 2), (3, 4, 1), (4, 3, 2), (1, 3, 4), (2, 1, 3), (4, 4, 4)],
        );
        let mut dense = enumerate_nodefe_dense(&net).unwrap();
        let mut pairs = enumerate_nodefe_pairs(&net);
        let key = |h: &NodeFeInformativeHexad| (h.nodes, h.label);
        dense.sort_by_key(key);
        pairs.sort_by_key(key);
        assert!(!dense.is_empty());
        assert_eq!(dense, pairs);
    }

    #[test]
    fn loglik_at_zero_is_quarter() {
        let net = net_from(3, &[(1, 1, 1), (2, 2, 2), (3, 3, 3), (1, 2, 3)]);
        let hexads = enumerate_nodefe_pairs(&net);
        let mut data = MultinomialLogitData::new(1, 4);
        for h in &hexads {
            let block: Vec<f64> = h.w.iter().flatten().copied().collect();
            data.push(&block, h.label as usize - 1);
        }
        let ev = data.evaluate(&[0.0]);
        assert!((ev.loglik - hexads.len() as f64 * 0.25f64.ln()).abs() < 1e-12);
    }
}
