//! Generalized advantage estimation.

use crate::error::{Error, Result};

/// Advantages and lambda-returns of a flat sequence of transitions.
///
/// `values` holds one more entry than `rewards`: the value of the state after
/// the last transition. Where `dones[k]` is set, the episode ended after step
/// `k`; the next value is treated as zero and the recursion restarts.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rewards.len();
    if values.len() != n + 1 || dones.len() != n {
        return Err(Error::LengthMismatch(format!(
            "{n} rewards need {} values and {n} done flags, got {} and {}",
            n + 1,
            values.len(),
            dones.len()
        )));
    }
    let mut advantages = vec![0.0; n];
    let mut running = 0.0;
    for k in (0..n).rev() {
        let (next_value, carry) = if dones[k] {
            (0.0, 0.0)
        } else {
            (values[k + 1], running)
        };
        let delta = rewards[k] + gamma * next_value - values[k];
        running = delta + gamma * lambda * carry;
        advantages[k] = running;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, returns))
}

/// Undiscounted sum of the remaining rewards within each episode.
pub fn rewards_to_go(rewards: &[f64], dones: &[bool]) -> Result<Vec<f64>> {
    if rewards.len() != dones.len() {
        return Err(Error::LengthMismatch(format!(
            "{} rewards but {} done flags",
            rewards.len(),
            dones.len()
        )));
    }
    let mut out = vec![0.0; rewards.len()];
    let mut running = 0.0;
    for k in (0..rewards.len()).rev() {
        if dones[k] {
            running = 0.0;
        }
        running += rewards[k];
        out[k] = running;
    }
    Ok(out)
}

/// Shift and scale to zero mean and unit (population) standard deviation.
pub fn normalize(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for x in values.iter_mut() {
        *x -= mean;
        if std > 1e-12 {
            *x /= std;
        }
    }
}
