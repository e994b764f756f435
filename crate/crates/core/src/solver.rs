//! Damped Newton-Raphson for concave conditional likelihoods.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logit::{Evaluation, Objective};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Convergence tolerance on the per-observation score and on the step.
    pub tol: f64,
    pub max_iter: usize,
    /// Ridge added to `-H` on every step. Zero by default; on a singular
    /// Hessian the solver escalates from `1e-8` by factors of ten to `1e-2`.
    pub ridge: f64,
    /// Starting value; zero vector when `None`.
    pub start: Option<Vec<f64>>,
    /// `|β|∞` beyond which a still-improving fit is declared separated.
    pub separation_bound: f64,
    /// Multiply the sandwich meat by `G / (G - 1)`, `G` the cluster count.
    pub dfc: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            tol: 1e-8,
            max_iter: 1000,
            ridge: 0.0,
            start: None,
            separation_bound: 1e3,
            dfc: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::InvalidArgument("ridge must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Converged,
    MaxIterations,
    /// Coefficients ran past the separation bound while the likelihood kept
    /// improving.
    Separation,
    /// No step along the Newton direction improved the likelihood.
    LineSearchFailed,
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub beta: Vec<f64>,
    /// Evaluation at `beta`.
    pub evaluation: Evaluation,
    pub iterations: usize,
    pub status: FitStatus,
}

impl NewtonOutcome {
    pub fn converged(&self) -> bool {
        self.status == FitStatus::Converged
    }
}

const MAX_HALVINGS: usize = 30;
const RIDGE_START: f64 = 1e-8;
const RIDGE_MAX: f64 = 1e-2;
/// Relative pivot threshold below which `-H` is treated as singular.
const PIVOT_TOL: f64 = 1e-12;

/// Solves `m x = rhs` for symmetric `m`, returning `None` unless `m` is
/// positive definite with every Cholesky pivot above `PIVOT_TOL * max diag`.
pub(crate) fn solve_pd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = m.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let chol = m.clone().cholesky()?;
    let l = chol.l_dirty();
    let min_pivot = (0..m.nrows()).map(|r| l[(r, r)] * l[(r, r)]).fold(f64::INFINITY, f64::min);
    if min_pivot <= PIVOT_TOL * scale {
        return None;
    }
    Some(chol.solve(rhs))
}

/// Inverse of a symmetric positive definite matrix, same criterion as
/// [`solve_pd`].
pub(crate) fn invert_pd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = m.nrows();
    let mut inv = DMatrix::zeros(p, p);
    for c in 0..p {
        let mut e = DVector::zeros(p);
        e[c] = 1.0;
        inv.set_column(c, &solve_pd(m, &e)?);
    }
    Some((&inv + inv.transpose()) * 0.5)
}

/// Newton direction for `ev`, and whether a ridge beyond `base_ridge` had to
/// be added.
fn newton_direction(ev: &Evaluation, base_ridge: f64) -> Result<(DVector<f64>, bool)> {
    let p = ev.score.len();
    let neg_h = -&ev.hessian;
    let with_ridge = |r: f64| &neg_h + DMatrix::identity(p, p) * r;
    if let Some(d) = solve_pd(&with_ridge(base_ridge), &ev.score) {
        return Ok((d, false));
    }
    let mut ridge = RIDGE_START.max(base_ridge);
    while ridge <= RIDGE_MAX * (1.0 + 1e-9) {
        if let Some(d) = solve_pd(&with_ridge(ridge), &ev.score) {
            return Ok((d, true));
        }
        ridge *= 10.0;
    }
    Err(Error::IdentificationFailure(format!(
        "Hessian singular after ridge escalation to {RIDGE_MAX:e}"
    )))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Maximizes `obj` by Newton-Raphson with step halving.
///
/// Convergence: `max(|s|∞ / n_obs, |step|∞) < tol` with a non-singular
/// Hessian. The score is averaged over observations so the tolerance does
/// not depend on how many informative subnetworks the data contain.
pub fn maximize<O: Objective + ?Sized>(obj: &O, cfg: &FitConfig) -> Result<NewtonOutcome> {
    cfg.validate()?;
    let p = obj.dim();
    let n_obs = obj.n_obs();
    if n_obs == 0 {
        return Err(Error::NoInformation {
            n_links: 0,
            n_informative: 0,
        });
    }
    let zero = vec![0.0; p];
    let mut beta = match &cfg.start {
        Some(start) if start.len() != p => {
            return Err(Error::InvalidArgument(format!(
                "start has length {}, expected {p}",
                start.len()
            )))
        }
        Some(start) => start.clone(),
        None => zero.clone(),
    };

    // The logit weights are strictly positive, so -H is singular at one β iff
    // it is singular everywhere: check identification where nothing saturates.
    let at_zero = obj.evaluate(&zero);
    if solve_pd(&-&at_zero.hessian, &at_zero.score).is_none() {
        return Err(Error::IdentificationFailure(
            "Hessian singular at beta = 0: covariate contrasts are zero or collinear".into(),
        ));
    }
    let mut ev = if beta == zero { at_zero } else { obj.evaluate(&beta) };

    let mut iterations = 0;
    let status = loop {
        let (step, used_ridge) = newton_direction(&ev, cfg.ridge)?;
        let score_norm = max_abs(ev.score.as_slice()) / n_obs as f64;
        let step_norm = max_abs(step.as_slice());
        if !used_ridge && score_norm.max(step_norm) < cfg.tol {
            break FitStatus::Converged;
        }
        if iterations == cfg.max_iter {
            break FitStatus::MaxIterations;
        }

        let slack = 1e-12 * (1.0 + ev.loglik.abs());
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, d)| b + t * d).collect();
            let cand_ev = obj.evaluate(&candidate);
            if cand_ev.loglik.is_finite() && cand_ev.loglik >= ev.loglik - slack {
                accepted = Some((candidate, cand_ev));
                break;
            }
            t *= 0.5;
        }
        let Some((candidate, cand_ev)) = accepted else {
            break FitStatus::LineSearchFailed;
        };
        let improved = cand_ev.loglik > ev.loglik;
        beta = candidate;
        ev = cand_ev;
        iterations += 1;
        if improved && max_abs(&beta) > cfg.separation_bound {
            break FitStatus::Separation;
        }
    };

    Ok(NewtonOutcome {
        beta,
        evaluation: ev,
        iterations,
        status,
    })
}
