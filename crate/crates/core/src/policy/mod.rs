//! The guidance-and-control network: a policy head producing the mean of a
//! diagonal Gaussian over pre-squash impulses, a separate value head, and a
//! free state-independent log standard deviation vector.
//!
//! Gradients are exact reverse-mode derivatives of the scalar loss with
//! respect to every parameter. The loss itself is assembled by the caller
//! (see [`crate::ppo`]), which supplies the output cotangents to
//! [`PolicyParams::backward`].

mod checkpoint;
mod gaussian;
mod network;

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamPurpose};

pub use checkpoint::{load_params, save_params, CheckpointFile, FORMAT_VERSION};
pub use gaussian::{entropy, log_prob, DistributionParams, LN_2PI};
pub use network::{Activation, Dense, Mlp, MlpTape, NetworkSpec};

/// Initial gains of the orthogonal initialization.
pub const HIDDEN_GAIN: f64 = std::f64::consts::SQRT_2;
pub const POLICY_OUTPUT_GAIN: f64 = 0.01;
pub const VALUE_OUTPUT_GAIN: f64 = 1.0;

/// All trainable parameters of both heads. The same type doubles as the
/// gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub spec: NetworkSpec,
    pub policy: Mlp,
    pub value: Mlp,
    pub log_std: Vec<f64>,
}

/// Forward-pass record for one observation.
#[derive(Debug, Clone)]
pub struct PolicyTape {
    pub policy: MlpTape,
    pub value: MlpTape,
}

impl PolicyTape {
    pub fn mean(&self) -> &[f64] {
        self.policy.output()
    }

    pub fn value(&self) -> f64 {
        self.value.output()[0]
    }
}

impl PolicyParams {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        Self {
            spec: spec.clone(),
            policy: Mlp::zeros(&spec.policy_sizes()),
            value: Mlp::zeros(&spec.value_sizes()),
            log_std: vec![0.0; spec.policy_out],
        }
    }

    /// Orthogonal initialization with zero biases and `log_std = 0`.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut stream = RngStream::derive(seed, 0, 0, StreamPurpose::Init);
        Ok(Self {
            spec: spec.clone(),
            policy: Mlp::orthogonal(&spec.policy_sizes(), HIDDEN_GAIN, POLICY_OUTPUT_GAIN, &mut stream),
            value: Mlp::orthogonal(&spec.value_sizes(), HIDDEN_GAIN, VALUE_OUTPUT_GAIN, &mut stream),
            log_std: vec![0.0; spec.policy_out],
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.spec)
    }

    fn check_obs(&self, obs: &[f64]) -> Result<()> {
        if obs.len() != self.spec.input_dim {
            return Err(Error::ShapeMismatch {
                what: "observation".into(),
                expected: self.spec.input_dim.to_string(),
                got: obs.len().to_string(),
            });
        }
        Ok(())
    }

    /// Policy mean and value estimate for one observation.
    pub fn forward(&self, obs: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_obs(obs)?;
        let mean = self.policy.forward(obs);
        let value = self.value.forward(obs)[0];
        Ok((mean, value))
    }

    pub fn forward_tape(&self, obs: &[f64]) -> Result<PolicyTape> {
        self.check_obs(obs)?;
        Ok(PolicyTape {
            policy: self.policy.forward_tape(obs),
            value: self.value.forward_tape(obs),
        })
    }

    pub fn distribution(&self, mean: Vec<f64>) -> DistributionParams {
        DistributionParams::new(mean, self.log_std.clone())
    }

    /// Accumulate into `grads` the gradient of a loss whose cotangents with
    /// respect to the policy mean and the value output are given. Gradients
    /// with respect to `log_std` are accumulated by the caller directly.
    pub fn backward(&self, tape: &PolicyTape, d_mean: &[f64], d_value: f64, grads: &mut PolicyParams) {
        if d_mean.iter().any(|d| *d != 0.0) {
            self.policy.backward(&tape.policy, d_mean, &mut grads.policy);
        }
        if d_value != 0.0 {
            self.value.backward(&tape.value, &[d_value], &mut grads.value);
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for head in [&self.policy, &self.value] {
            for l in &head.layers {
                out.push(&l.weights);
                out.push(&l.bias);
            }
        }
        out.push(&self.log_std);
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for head in [&mut self.policy, &mut self.value] {
            for l in &mut head.layers {
                out.push(&mut l.weights);
                out.push(&mut l.bias);
            }
        }
        out.push(&mut self.log_std);
        out
    }

    pub fn len(&self) -> usize {
        self.policy.len() + self.value.len() + self.log_std.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::ShapeMismatch {
                what: "flat parameter vector".into(),
                expected: self.len().to_string(),
                got: flat.len().to_string(),
            });
        }
        let mut offset = 0;
        for s in self.slices_mut() {
            s.copy_from_slice(&flat[offset..offset + s.len()]);
            offset += s.len();
        }
        Ok(())
    }

    pub fn global_norm(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|x| x.is_finite()))
    }
}

impl fmt::Display for PolicyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_sizes = |s: Vec<usize>| {
            s.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" -> ")
        };
        writeln!(f, "policy head: {} (tanh hidden, linear output)", fmt_sizes(self.spec.policy_sizes()))?;
        writeln!(f, "value head:  {} (tanh hidden, linear output)", fmt_sizes(self.spec.value_sizes()))?;
        writeln!(f, "policy parameters: {}", self.policy.len())?;
        writeln!(f, "value parameters:  {}", self.value.len())?;
        writeln!(f, "log-std parameters: {}", self.log_std.len())?;
        write!(f, "total parameters: {}", self.len())
    }
}
