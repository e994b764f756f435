use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::solver::FitStatus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Triadic model with dyad-level effects `A_ij + B_jk + C_ik` (hexad logit).
    DyadFe,
    /// Triadic model with node-level effects `A_i + B_j + C_k`.
    NodeFe,
    /// Bipartite dyadic model with node effects `A_i + B_j` (tetrad logit).
    Dyadic,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DyadFe => "dyad-fe",
            ModelKind::NodeFe => "node-fe",
            ModelKind::Dyadic => "dyadic",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dyad-fe" => Ok(ModelKind::DyadFe),
            "node-fe" => Ok(ModelKind::NodeFe),
            "dyadic" => Ok(ModelKind::Dyadic),
            other => Err(format!("unknown model `{other}` (dyad-fe, node-fe, dyadic)")),
        }
    }
}

/// Which enumeration strategy produced the informative subnetworks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumeratorKind {
    /// Exhaustive loop over every canonical subnetwork.
    Dense,
    /// Pivot search using the per-column bitsets.
    SparseBitset,
    /// Pivot search using sorted secondary-index intersection.
    SparseIndex,
    /// Pairs of node-disjoint links with a complement check.
    DisjointPairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub model: ModelKind,
    pub enumerator: EnumeratorKind,
    pub beta_hat: Vec<f64>,
    /// Cluster-robust sandwich covariance; `None` when the fit did not
    /// converge and the Hessian at the last iterate is singular.
    pub vcov: Option<Vec<Vec<f64>>>,
    pub se: Option<Vec<f64>>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: FitStatus,
    pub n_informative: usize,
    pub n_links: usize,
    pub n_clusters: usize,
    pub rho_hat: f64,
    pub avg_degree: f64,
}

impl EstimationResult {
    pub fn vcov_matrix(&self) -> Option<DMatrix<f64>> {
        let rows = self.vcov.as_ref()?;
        let p = rows.len();
        Some(DMatrix::from_fn(p, p, |r, c| rows[r][c]))
    }
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}
