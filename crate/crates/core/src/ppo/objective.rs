//! The clipped surrogate objective and its exact gradient.
//!
//! `J = J_clip - c1 H + c2 S` with
//!
//! * `J_clip = mean_i min(rho_i A_i, clip(rho_i, 1 - eps, 1 + eps) A_i)`
//! * `H = mean_i (V(o_i) - R_i)^2 / 2`
//! * `S`, the entropy of the (state-independent) action distribution.
//!
//! The returned gradient is the gradient of `J` itself (an ascent direction).

use super::buffer::Transition;
use crate::env::ACTION_DIM;
use crate::error::Result;
use crate::policy::{entropy, log_prob, PolicyParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveCoeffs {
    pub clip_eps: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone)]
pub struct ObjectiveOutput {
    pub clip_term: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub objective: f64,
    /// Share of samples whose ratio left the clip interval.
    pub clip_fraction: f64,
    /// Mean of `old_log_prob - log_prob`, a cheap KL estimate.
    pub approx_kl: f64,
    pub grads: PolicyParams,
}

/// `pi_new(a|o) / pi_old(a|o)` from log-densities.
pub fn probability_ratio(log_prob_new: f64, log_prob_old: f64) -> f64 {
    (log_prob_new - log_prob_old).exp()
}

/// Objective and gradient over the transitions selected by `indices`.
pub fn ppo_objective(
    params: &PolicyParams,
    transitions: &[Transition],
    indices: &[usize],
    coeffs: ObjectiveCoeffs,
) -> Result<ObjectiveOutput> {
    let n = indices.len().max(1) as f64;
    let mut grads = params.zeros_like();
    let sigma2: Vec<f64> = params.log_std.iter().map(|s| (2.0 * s).exp()).collect();
    let (lo, hi) = (1.0 - coeffs.clip_eps, 1.0 + coeffs.clip_eps);
    let (mut clip_sum, mut value_sum, mut kl_sum) = (0.0, 0.0, 0.0);
    let mut clipped = 0usize;
    let mut d_log_std = vec![0.0; params.log_std.len()];
    let mut d_mean = [0.0; ACTION_DIM];

    for &i in indices {
        let t = &transitions[i];
        let tape = params.forward_tape(&t.obs)?;
        let mean = tape.mean();
        let lp = log_prob(mean, &params.log_std, &t.action);
        let ratio = probability_ratio(lp, t.log_prob);
        let a = t.advantage;
        let unclipped = ratio * a;
        let clipped_term = ratio.clamp(lo, hi) * a;
        if ratio < lo || ratio > hi {
            clipped += 1;
        }
        // d J_clip_i / d log pi_i
        let g = if unclipped <= clipped_term {
            clip_sum += unclipped;
            ratio * a
        } else {
            clip_sum += clipped_term;
            0.0
        };
        let value_err = tape.value() - t.return_target;
        value_sum += 0.5 * value_err * value_err;
        kl_sum += t.log_prob - lp;

        for j in 0..ACTION_DIM {
            let diff = t.action[j] - mean[j];
            d_mean[j] = g / n * diff / sigma2[j];
            d_log_std[j] += g / n * (diff * diff / sigma2[j] - 1.0);
        }
        let d_value = -coeffs.c1 * value_err / n;
        params.backward(&tape, &d_mean, d_value, &mut grads);
    }

    let ent = entropy(&params.log_std);
    for (g, d) in grads.log_std.iter_mut().zip(&d_log_std) {
        *g = d + coeffs.c2;
    }
    let clip_term = clip_sum / n;
    let value_loss = value_sum / n;
    Ok(ObjectiveOutput {
        clip_term,
        value_loss,
        entropy: ent,
        objective: clip_term - coeffs.c1 * value_loss + coeffs.c2 * ent,
        clip_fraction: clipped as f64 / n,
        approx_kl: kl_sum / n,
        grads,
    })
}
