//! Conditional logit estimation for triadic (three-part) network formation
//! with unobserved pairwise heterogeneity.

pub mod alt;
pub mod error;
pub mod hexad;
pub mod inference;
pub mod io;
pub mod logit;
pub mod network;
pub mod oracle;
pub mod result;
pub mod simulation;
pub mod solver;
pub mod wiring;

pub use error::{Error, Result};
pub use network::{Covariates, FixedEffects, NodeId, Part, Triad, TriadicNetwork};
pub use result::{EnumeratorKind, EstimationResult, ModelKind};
pub use solver::{FitConfig, FitStatus};
