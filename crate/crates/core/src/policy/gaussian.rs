//! Diagonal Gaussian action distribution in the pre-squash action space.

use std::f64::consts::PI;

use crate::rng::RngStream;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionParams {
    pub mean: Vec<f64>,
    pub log_std: Vec<f64>,
}

impl DistributionParams {
    pub fn new(mean: Vec<f64>, log_std: Vec<f64>) -> Self {
        debug_assert_eq!(mean.len(), log_std.len());
        Self { mean, log_std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn std(&self) -> Vec<f64> {
        self.log_std.iter().map(|s| s.exp()).collect()
    }

    /// Draw `mean + std * z`, `z ~ N(0, I)`, and its log-density.
    pub fn sample(&self, stream: &mut RngStream) -> (Vec<f64>, f64) {
        let action: Vec<f64> = self
            .mean
            .iter()
            .zip(&self.log_std)
            .map(|(m, ls)| m + ls.exp() * stream.standard_normal())
            .collect();
        let lp = self.log_prob(&action);
        (action, lp)
    }

    pub fn log_prob(&self, action: &[f64]) -> f64 {
        log_prob(&self.mean, &self.log_std, action)
    }

    /// The distribution mode, i.e. the mean.
    pub fn mode(&self) -> &[f64] {
        &self.mean
    }
}

pub fn log_prob(mean: &[f64], log_std: &[f64], action: &[f64]) -> f64 {
    mean.iter()
        .zip(log_std)
        .zip(action)
        .map(|((m, ls), a)| {
            let z = (a - m) * (-ls).exp();
            -0.5 * z * z - ls - 0.5 * LN_2PI
        })
        .sum()
}

/// Closed-form differential entropy, `sum(log_std) + d/2 (1 + ln 2 pi)`.
pub fn entropy(log_std: &[f64]) -> f64 {
    log_std.iter().sum::<f64>() + 0.5 * log_std.len() as f64 * (1.0 + (2.0 * PI).ln())
}
