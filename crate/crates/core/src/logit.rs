//! Conditional-logit likelihood kernels.
//!
//! Two data layouts cover all three estimators:
//!
//! * [`BinaryLogitData`]: two alternatives per observation, stored as the
//!   oriented contrast `v = W_chosen - W_other`, so that
//!   `l = log Λ(v'β)`, `s = (1 - Λ(v'β)) v`, `H = -Λ(1-Λ) v v'`.
//! * [`MultinomialLogitData`]: `C` alternatives per observation and the
//!   chosen label.
//!
//! Reductions run over fixed chunks of [`CHUNK`] observations; the chunk
//! partial sums are folded in chunk order, so results do not depend on the
//! number of worker threads.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Observations per reduction chunk.
pub const CHUNK: usize = 16_384;

/// `Λ(x) = 1 / (1 + e^{-x})`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log Λ(x)` without overflow for large `|x|`.
#[inline]
pub fn log_logistic(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conditional probabilities of the two informative wirings,
/// `p_c = exp(W_c'β) / Σ exp(W_c'β)`, evaluated in log space.
pub fn conditional_prob(beta: &[f64], w1: &[f64], w2: &[f64]) -> (f64, f64) {
    let contrast = dot(w1, beta) - dot(w2, beta);
    (logistic(contrast), logistic(-contrast))
}

/// Softmax over the linear indices `W_c'β` of each alternative.
pub fn softmax_probs(beta: &[f64], alternatives: &[&[f64]]) -> Vec<f64> {
    let u: Vec<f64> = alternatives.iter().map(|w| dot(w, beta)).collect();
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + u.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    u.iter().map(|x| (x - lse).exp()).collect()
}

/// Log-likelihood, score and Hessian at one parameter value.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub loglik: f64,
    pub score: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// A concave objective the Newton solver can maximize.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn n_obs(&self) -> usize;
    fn evaluate(&self, beta: &[f64]) -> Evaluation;
    /// Score contribution of a single observation.
    fn obs_score(&self, obs: usize, beta: &[f64], out: &mut [f64]);
}

#[derive(Clone)]
struct Partial {
    loglik: f64,
    score: Vec<f64>,
    hessian: Vec<f64>,
}

impl Partial {
    fn zero(p: usize) -> Self {
        Partial {
            loglik: 0.0,
            score: vec![0.0; p],
            hessian: vec![0.0; p * p],
        }
    }
}

fn fold_partials(p: usize, partials: Vec<Partial>) -> Evaluation {
    let mut total = Partial::zero(p);
    for part in partials {
        total.loglik += part.loglik;
        for (a, b) in total.score.iter_mut().zip(&part.score) {
            *a += b;
        }
        for (a, b) in total.hessian.iter_mut().zip(&part.hessian) {
            *a += b;
        }
    }
    // Only the lower triangle was accumulated.
    let mut hessian = DMatrix::from_row_slice(p, p, &total.hessian);
    for r in 0..p {
        for c in r + 1..p {
            hessian[(r, c)] = hessian[(c, r)];
        }
    }
    Evaluation {
        loglik: total.loglik,
        score: DVector::from_vec(total.score),
        hessian,
    }
}

/// Binary conditional logit on oriented contrasts.
#[derive(Clone, Debug, Default)]
pub struct BinaryLogitData {
    p: usize,
    v: Vec<f64>,
}

impl BinaryLogitData {
    pub fn new(p: usize) -> Self {
        BinaryLogitData { p, v: Vec::new() }
    }

    pub fn with_capacity(p: usize, n: usize) -> Self {
        BinaryLogitData {
            p,
            v: Vec::with_capacity(n * p),
        }
    }

    pub fn push(&mut self, contrast: &[f64]) {
        debug_assert_eq!(contrast.len(), self.p);
        self.v.extend_from_slice(contrast);
    }

    pub fn contrast(&self, obs: usize) -> &[f64] {
        &self.v[obs * self.p..(obs + 1) * self.p]
    }

    fn chunk_partial(&self, chunk: &[f64], beta: &[f64]) -> Partial {
        let p = self.p;
        let mut part = Partial::zero(p);
        for v in chunk.chunks_exact(p) {
            let x = dot(v, beta);
            let e = (-x.abs()).exp();
            let big = 1.0 / (1.0 + e);
            let small = e / (1.0 + e);
            let (lam, one_minus) = if x >= 0.0 { (big, small) } else { (small, big) };
            part.loglik += if x >= 0.0 { -e.ln_1p() } else { x - e.ln_1p() };
            let weight = lam * one_minus;
            for r in 0..p {
                part.score[r] += one_minus * v[r];
                let wr = weight * v[r];
                for c in 0..=r {
                    part.hessian[r * p + c] -= wr * v[c];
                }
            }
        }
        part
    }
}

impl Objective for BinaryLogitData {
    fn dim(&self) -> usize {
        self.p
    }

    fn n_obs(&self) -> usize {
        self.v.len() / self.p.max(1)
    }

    fn evaluate(&self, beta: &[f64]) -> Evaluation {
        let partials: Vec<Partial> = self
            .v
            .par_chunks(CHUNK * self.p)
            .map(|chunk| self.chunk_partial(chunk, beta))
            .collect();
        fold_partials(self.p, partials)
    }

    fn obs_score(&self, obs: usize, beta: &[f64], out: &mut [f64]) {
        let v = self.contrast(obs);
        let one_minus = logistic(-dot(v, beta));
        for (o, x) in out.iter_mut().zip(v) {
            *o = one_minus * x;
        }
    }
}

/// Conditional logit with `n_alt` alternatives per observation.
#[derive(Clone, Debug)]
pub struct MultinomialLogitData {
    p: usize,
    n_alt: usize,
    /// `w[(obs * n_alt + c) * p + d]`.
    w: Vec<f64>,
    chosen: Vec<u8>,
}

impl MultinomialLogitData {
    pub fn new(p: usize, n_alt: usize) -> Self {
        MultinomialLogitData {
            p,
            n_alt,
            w: Vec::new(),
            chosen: Vec::new(),
        }
    }

    /// `alternatives` holds `n_alt` covariate vectors back to back; `chosen`
    /// is 0-based.
    pub fn push(&mut self, alternatives: &[f64], chosen: usize) {
        debug_assert_eq!(alternatives.len(), self.p * self.n_alt);
        debug_assert!(chosen < self.n_alt);
        self.w.extend_from_slice(alternatives);
        self.chosen.push(chosen as u8);
    }

    fn obs_terms(&self, block: &[f64], chosen: usize, beta: &[f64], probs: &mut [f64], wbar: &mut [f64]) -> f64 {
        let p = self.p;
        let mut max = f64::NEG_INFINITY;
        for (c, prob) in probs.iter_mut().enumerate() {
            *prob = dot(&block[c * p..(c + 1) * p], beta);
            max = max.max(*prob);
        }
        let u_chosen = probs[chosen];
        let sum: f64 = probs.iter().map(|u| (u - max).exp()).sum();
        let lse = max + sum.ln();
        wbar.fill(0.0);
        for (c, prob) in probs.iter_mut().enumerate() {
            *prob = (*prob - lse).exp();
            for d in 0..p {
                wbar[d] += *prob * block[c * p + d];
            }
        }
        u_chosen - lse
    }

    fn chunk_partial(&self, start: usize, end: usize, beta: &[f64]) -> Partial {
        let (p, n_alt) = (self.p, self.n_alt);
        let mut part = Partial::zero(p);
        let mut probs = vec![0.0; n_alt];
        let mut wbar = vec![0.0; p];
        let mut dev = vec![0.0; p];
        for obs in start..end {
            let block = &self.w[obs * n_alt * p..(obs + 1) * n_alt * p];
            let chosen = self.chosen[obs] as usize;
            part.loglik += self.obs_terms(block, chosen, beta, &mut probs, &mut wbar);
            for d in 0..p {
                part.score[d] += block[chosen * p + d] - wbar[d];
            }
            for (c, &prob) in probs.iter().enumerate() {
                for d in 0..p {
                    dev[d] = block[c * p + d] - wbar[d];
                }
                for r in 0..p {
                    let wr = prob * dev[r];
                    for q in 0..=r {
                        part.hessian[r * p + q] -= wr * dev[q];
                    }
                }
            }
        }
        part
    }
}

impl Objective for MultinomialLogitData {
    fn dim(&self) -> usize {
        self.p
    }

    fn n_obs(&self) -> usize {
        self.chosen.len()
    }

    fn evaluate(&self, beta: &[f64]) -> Evaluation {
        let n = self.n_obs();
        let partials: Vec<Partial> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| self.chunk_partial(chunk * CHUNK, ((chunk + 1) * CHUNK).min(n), beta))
            .collect();
        fold_partials(self.p, partials)
    }

    fn obs_score(&self, obs: usize, beta: &[f64], out: &mut [f64]) {
        let (p, n_alt) = (self.p, self.n_alt);
        let block = &self.w[obs * n_alt * p..(obs + 1) * n_alt * p];
        let chosen = self.chosen[obs] as usize;
        let mut probs = vec![0.0; n_alt];
        let mut wbar = vec![0.0; p];
        self.obs_terms(block, chosen, beta, &mut probs, &mut wbar);
        for d in 0..p {
            out[d] = block[chosen * p + d] - wbar[d];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditional_prob_examples() {
        assert_eq!(conditional_prob(&[0.0], &[3.0], &[-1.0]), (0.5, 0.5));
        let (a, b) = conditional_prob(&[1.7, -0.3], &[0.4, 2.0], &[0.4, 2.0]);
        assert_eq!((a, b), (0.5, 0.5));
        let (p1, p2) = conditional_prob(&[1.0], &[2.0], &[0.0]);
        assert!((p1 - 0.880_797_077_977_882_3).abs() < 1e-12);
        assert!((p1 + p2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conditional_prob_saturates() {
        let (p1, p2) = conditional_prob(&[1.0], &[800.0], &[-800.0]);
        assert_eq!(p1, 1.0);
        assert_eq!(p2, 0.0);
        assert!(log_logistic(-1000.0).is_finite());
        assert!((log_logistic(-1000.0) + 1000.0).abs() < 1e-9);
    }

    #[test]
    fn softmax_matches_binary_case() {
        let beta = [0.7, -1.2];
        let w1 = [0.3, 0.5];
        let w2 = [-1.0, 0.25];
        let soft = softmax_probs(&beta, &[&w1, &w2]);
        let (p1, p2) = conditional_prob(&beta, &w1, &w2);
        assert!((soft[0] - p1).abs() < 1e-15);
        assert!((soft[1] - p2).abs() < 1e-15);
    }

    #[test]
    fn binary_and_multinomial_kernels_agree() {
        let mut bin = BinaryLogitData::new(2);
        let mut multi = MultinomialLogitData::new(2, 2);
        let obs = [([0.3, 1.0], [-0.2, 0.1], 0usize), ([1.5, -0.5], [0.0, 0.7], 1)];
        for (w1, w2, chosen) in obs {
            let (a, b) = if chosen == 0 { (w1, w2) } else { (w2, w1) };
            bin.push(&[a[0] - b[0], a[1] - b[1]]);
            multi.push(&[w1[0], w1[1], w2[0], w2[1]], chosen);
        }
        let beta = [0.4, -0.9];
        let eb = bin.evaluate(&beta);
        let em = multi.evaluate(&beta);
        assert!((eb.loglik - em.loglik).abs() < 1e-13);
        assert!((eb.score - em.score).amax() < 1e-13);
        assert!((eb.hessian - em.hessian).amax() < 1e-13);
    }

    #[test]
    fn chunked_reduction_is_consistent() {
        let mut data = BinaryLogitData::new(1);
        for idx in 0..(CHUNK * 2 + 17) {
            data.push(&[((idx * 37 % 101) as f64 - 50.0) / 25.0]);
        }
        let ev = data.evaluate(&[0.3]);
        let mut score = 0.0;
        let mut buf = [0.0];
        for obs in 0..data.n_obs() {
            data.obs_score(obs, &[0.3], &mut buf);
            score += buf[0];
        }
        assert!((ev.score[0] - score).abs() < 1e-9 * (1.0 + score.abs()));
    }
}
