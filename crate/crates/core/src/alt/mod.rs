//! Companion estimators: the hexad logit under node-level heterogeneity and
//! the tetrad logit for bipartite dyadic networks.

pub mod node_fe;
pub mod tetrad;

pub use node_fe::{
    enumerate_nodefe_dense, enumerate_nodefe_pairs, nodefe_fit, nodefe_indicators,
    NodeFeInformativeHexad,
};
pub use tetrad::{
    enumerate_tetrads_dense, enumerate_tetrads_sparse, tetrad_fit, tetrad_indicators,
    DyadicNetwork, InformativeTetrad, Tetrad,
};
