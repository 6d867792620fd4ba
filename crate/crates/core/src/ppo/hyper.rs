use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Critic regression target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueTarget {
    /// `advantage + V_old`, i.e. the lambda-return.
    #[default]
    LambdaReturn,
    /// Undiscounted sum of the remaining rewards of the episode.
    RewardToGo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    pub gamma: f64,
    pub lambda: f64,
    /// Learning rate at t = 0; decays linearly to 0 at `total_steps`.
    pub alpha0: f64,
    /// Clip range at t = 0; decays linearly, floored at `clip_floor`.
    pub clip0: f64,
    pub clip_floor: f64,
    /// Value-error coefficient.
    pub c1: f64,
    /// Entropy coefficient.
    pub c2: f64,
    pub n_opt: usize,
    pub n_env: usize,
    /// Episodes per environment per rollout; also the number of minibatches.
    pub n_b: usize,
    /// Training budget in environment steps.
    pub total_steps: u64,
    pub max_grad_norm: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub normalize_advantages: bool,
    pub value_target: ValueTarget,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            gamma: 0.9999,
            lambda: 0.99,
            alpha0: 2.5e-4,
            clip0: 0.3,
            clip_floor: 1e-6,
            c1: 0.5,
            c2: 4.75e-8,
            n_opt: 30,
            n_env: 8,
            n_b: 4,
            total_steps: 300_000,
            max_grad_norm: 0.5,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            normalize_advantages: true,
            value_target: ValueTarget::LambdaReturn,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail("gamma must lie in (0, 1]");
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return fail("lambda must lie in (0, 1]");
        }
        if !(self.clip0 > 0.0 && self.clip0 < 1.0) {
            return fail("clip0 must lie in (0, 1)");
        }
        if !(self.alpha0 >= 0.0 && self.c1 >= 0.0 && self.c2 >= 0.0) {
            return fail("alpha0, c1 and c2 must be non-negative");
        }
        if self.n_opt < 1 {
            return fail("n_opt must be at least 1");
        }
        if self.n_env < 1 || self.n_b < 1 {
            return fail("n_env and n_b must be at least 1");
        }
        if self.max_grad_norm <= 0.0 {
            return fail("max_grad_norm must be positive");
        }
        Ok(())
    }

    /// Environment steps consumed by one rollout.
    pub fn rollout_steps(&self, segments: usize) -> u64 {
        (self.n_env * self.n_b * segments) as u64
    }

    /// Learning rate and clip range at training step `t`.
    pub fn schedules(&self, t: u64) -> (f64, f64) {
        schedules(t, self.total_steps, self)
    }
}

/// Linear decay of the learning rate and clip range over the budget `total`.
pub fn schedules(t: u64, total: u64, hp: &HyperParams) -> (f64, f64) {
    let frac = if total == 0 {
        0.0
    } else {
        (1.0 - t as f64 / total as f64).max(0.0)
    };
    (hp.alpha0 * frac, (hp.clip0 * frac).max(hp.clip_floor))
}
