//! Jensen-Shannon mutual-information estimation over critic scores, the
//! training losses built from it, their exact score gradients, and the
//! InfoNCE lower-bound diagnostic.
//!
//! Everything here operates on plain score arrays; pairing scores with the
//! network that produced them is the training loop's job.

use crate::error::{Result, SmieError};
use crate::mat::Mat;

/// Loss hyper-parameters: hinge margin and temporal trade-off weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub beta: f64,
    pub lambda: f64,
}

impl LossConfig {
    pub fn new(beta: f64, lambda: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(SmieError::Validation(format!(
                "hinge margin beta must be >= 0, got {beta}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(SmieError::Validation(format!(
                "trade-off lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(LossConfig { beta, lambda })
    }
}

/// Everything computed from one batch of critic scores.
#[derive(Debug, Clone)]
pub struct MiBatchResult {
    /// Estimated MI between full sequences and their semantics.
    pub m: f64,
    /// Estimated MI with keyframe-masked positives, same negatives.
    pub m_hat: f64,
    pub l1: f64,
    pub l2: f64,
    pub total: f64,
    pub pos_scores: Vec<f64>,
    pub masked_pos_scores: Vec<f64>,
    pub neg_scores: Vec<f64>,
}

/// Overflow-safe softplus log(1 + e^z).
pub fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp().ln_1p()
    } else if z < -30.0 {
        // e^z is tiny; ln_1p keeps full precision instead of rounding to 0.
        z.exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Numerically stable logistic sigmoid, the softplus derivative.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// JSD mutual-information estimate:
/// mean(-softplus(-g)) over positives minus mean(softplus(g')) over negatives.
///
/// Strictly negative for finite scores since softplus is strictly positive.
pub fn jsd_mi(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(SmieError::Validation(
            "jsd_mi requires non-empty positive and negative score arrays".into(),
        ));
    }
    let pos_term: f64 =
        pos_scores.iter().map(|&g| -softplus(-g)).sum::<f64>() / pos_scores.len() as f64;
    let neg_term: f64 =
        neg_scores.iter().map(|&g| softplus(g)).sum::<f64>() / neg_scores.len() as f64;
    Ok(pos_term - neg_term)
}

/// Global alignment loss: maximize m by minimizing -m.
pub fn global_loss(m: f64) -> f64 {
    -m
}

/// Temporal-constrained MI: masked positives scored against the same
/// negatives as the global estimate.
pub fn temporal_mi(masked_pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    jsd_mi(masked_pos_scores, neg_scores)
}

/// Hinge loss max(0, beta - (m - m_hat)) keeping full-sequence MI above the
/// masked-sequence MI by the margin.
pub fn hinge_loss(m: f64, m_hat: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(SmieError::Validation(format!(
            "hinge margin beta must be >= 0, got {beta}"
        )));
    }
    Ok((beta - (m - m_hat)).max(0.0))
}

/// Combined loss L1 + lambda * L2.
pub fn total_loss(l1: f64, l2: f64, lambda: f64) -> f64 {
    l1 + lambda * l2
}

/// Compute m, m_hat and all loss terms for one batch of scores.
pub fn mi_batch(
    pos_scores: Vec<f64>,
    masked_pos_scores: Vec<f64>,
    neg_scores: Vec<f64>,
    cfg: &LossConfig,
) -> Result<MiBatchResult> {
    if masked_pos_scores.len() != pos_scores.len() {
        return Err(SmieError::Validation(format!(
            "masked positive count {} != positive count {}",
            masked_pos_scores.len(),
            pos_scores.len()
        )));
    }
    let m = jsd_mi(&pos_scores, &neg_scores)?;
    let m_hat = temporal_mi(&masked_pos_scores, &neg_scores)?;
    let l1 = global_loss(m);
    let l2 = hinge_loss(m, m_hat, cfg.beta)?;
    let total = total_loss(l1, l2, cfg.lambda);
    Ok(MiBatchResult {
        m,
        m_hat,
        l1,
        l2,
        total,
        pos_scores,
        masked_pos_scores,
        neg_scores,
    })
}

/// Exact gradients of the combined loss with respect to every score.
#[derive(Debug, Clone)]
pub struct ScoreGradients {
    pub pos: Vec<f64>,
    pub masked_pos: Vec<f64>,
    pub neg: Vec<f64>,
}

/// Closed-form chain rule through the JSD estimates and the hinge.
///
/// With N positives and M shared negatives:
///   dL/dg_i  = -(1 + lambda*[hinge active]) * logistic(-g_i) / N
///   dL/dĝ_i  =  lambda*[hinge active] * logistic(-ĝ_i) / N
///   dL/dg'_j =  logistic(g'_j) / M
/// The negative-score terms of the hinge cancel exactly because m and m_hat
/// share them. The subgradient at the hinge kink takes the active branch.
pub fn loss_score_gradients(
    pos_scores: &[f64],
    masked_pos_scores: &[f64],
    neg_scores: &[f64],
    beta: f64,
    lambda: f64,
) -> Result<ScoreGradients> {
    let cfg = LossConfig::new(beta, lambda)?;
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(SmieError::Validation(
            "loss_score_gradients requires non-empty score arrays".into(),
        ));
    }
    if masked_pos_scores.len() != pos_scores.len() {
        return Err(SmieError::Validation(
            "masked positive count must match positive count".into(),
        ));
    }
    let n = pos_scores.len() as f64;
    let m_count = neg_scores.len() as f64;
    let m = jsd_mi(pos_scores, neg_scores)?;
    let m_hat = temporal_mi(masked_pos_scores, neg_scores)?;
    let hinge_active = cfg.beta - (m - m_hat) >= 0.0;
    let pos_factor = if hinge_active { 1.0 + cfg.lambda } else { 1.0 };

    let pos = pos_scores
        .iter()
        .map(|&g| -pos_factor * logistic(-g) / n)
        .collect();
    let masked_pos = masked_pos_scores
        .iter()
        .map(|&g| {
            if hinge_active {
                cfg.lambda * logistic(-g) / n
            } else {
                0.0
            }
        })
        .collect();
    let neg = neg_scores
        .iter()
        .map(|&g| logistic(g) / m_count)
        .collect();
    Ok(ScoreGradients {
        pos,
        masked_pos,
        neg,
    })
}

/// InfoNCE-style diagnostic over a B x B score matrix where entry (i, j)
/// scores semantic i against visual j.
///
/// Returns (L_S, bound) with L_S the softmax cross-entropy of the diagonal
/// and bound = log B - L_S, a lower bound on the mutual information.
pub fn infonce_diagnostic(score_matrix: &Mat) -> Result<(f64, f64)> {
    let b = score_matrix.rows();
    if b < 2 || score_matrix.cols() != b {
        return Err(SmieError::Validation(format!(
            "infonce diagnostic needs a square matrix with B >= 2, got {}x{}",
            score_matrix.rows(),
            score_matrix.cols()
        )));
    }
    let mut loss_sum = 0.0;
    for i in 0..b {
        let row = score_matrix.row(i);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + row.iter().map(|&s| (s - max).exp()).sum::<f64>().ln();
        loss_sum += log_norm - row[i];
    }
    let l_s = loss_sum / b as f64;
    Ok((l_s, (b as f64).ln() - l_s))
}
