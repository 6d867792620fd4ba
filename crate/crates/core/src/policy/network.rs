//! Dense tanh networks with an explicit reverse pass.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
}

/// Layer sizes of the two heads. Both heads use the same hidden widths but
/// share no weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub policy_out: usize,
    pub value_out: usize,
    pub activation: Activation,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            input_dim: 8,
            hidden: vec![64, 64],
            policy_out: 3,
            value_out: 1,
            activation: Activation::Tanh,
        }
    }
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.policy_out == 0 || self.value_out != 1 {
            return Err(Error::InvalidConfig(
                "network needs a non-empty input, a non-empty policy output and a scalar value output"
                    .into(),
            ));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::InvalidConfig("hidden layers must be non-empty".into()));
        }
        Ok(())
    }

    fn head_sizes(&self, out: usize) -> Vec<usize> {
        std::iter::once(self.input_dim)
            .chain(self.hidden.iter().copied())
            .chain(std::iter::once(out))
            .collect()
    }

    pub fn policy_sizes(&self) -> Vec<usize> {
        self.head_sizes(self.policy_out)
    }

    pub fn value_sizes(&self) -> Vec<usize> {
        self.head_sizes(self.value_out)
    }

    /// Total trainable scalars, including the log standard deviations.
    pub fn parameter_count(&self) -> usize {
        let count = |sizes: Vec<usize>| sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum::<usize>();
        count(self.policy_sizes()) + count(self.value_sizes()) + self.policy_out
    }
}

/// Fully connected layer `y = W x + b`, with `W` stored row-major (`out x in`).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Orthogonal rows (or columns) scaled by `gain`, zero bias.
    pub fn orthogonal(inputs: usize, outputs: usize, gain: f64, stream: &mut RngStream) -> Self {
        let tall = outputs >= inputs;
        let (r, c) = if tall { (outputs, inputs) } else { (inputs, outputs) };
        let a = DMatrix::from_fn(r, c, |_, _| stream.standard_normal());
        let qr = a.qr();
        let mut q = qr.q();
        let rr = qr.r();
        // Sign fix so the draw is uniform over the orthogonal group.
        for j in 0..c {
            if rr[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        let w = if tall { q } else { q.transpose() };
        let mut layer = Self::zeros(inputs, outputs);
        for o in 0..outputs {
            for i in 0..inputs {
                layer.weights[o * inputs + i] = gain * w[(o, i)];
            }
        }
        layer
    }

    pub fn forward(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.inputs);
        for (o, out) in y.iter_mut().enumerate() {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            *out = self.bias[o] + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Stack of dense layers with tanh on every hidden layer and a linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Layer outputs recorded by [`Mlp::forward_tape`] for the reverse pass.
/// `values[0]` is the input, `values[i]` the output of layer `i - 1`.
#[derive(Debug, Clone, Default)]
pub struct MlpTape {
    pub values: Vec<Vec<f64>>,
}

impl MlpTape {
    pub fn output(&self) -> &[f64] {
        self.values.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            layers: sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        }
    }

    pub fn orthogonal(sizes: &[usize], hidden_gain: f64, output_gain: f64, stream: &mut RngStream) -> Self {
        let n = sizes.len() - 1;
        Self {
            layers: sizes
                .windows(2)
                .enumerate()
                .map(|(i, w)| {
                    let gain = if i + 1 == n { output_gain } else { hidden_gain };
                    Dense::orthogonal(w[0], w[1], gain, stream)
                })
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.inputs)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    pub fn forward_tape(&self, input: &[f64]) -> MlpTape {
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut y = vec![0.0; layer.outputs];
            layer.forward(values.last().expect("input pushed"), &mut y);
            if i != last {
                y.iter_mut().for_each(|v| *v = v.tanh());
            }
            values.push(y);
        }
        MlpTape { values }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_tape(input).values.pop().unwrap_or_default()
    }

    /// Accumulate `d(loss)/d(params)` into `grads` given `d(loss)/d(output)`.
    pub fn backward(&self, tape: &MlpTape, grad_output: &[f64], grads: &mut Mlp) {
        let mut delta = grad_output.to_vec();
        let last = self.layers.len() - 1;
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let g = &mut grads.layers[i];
            if i != last {
                // tanh' = 1 - tanh^2, and values[i + 1] holds tanh outputs.
                for (d, y) in delta.iter_mut().zip(&tape.values[i + 1]) {
                    *d *= 1.0 - y * y;
                }
            }
            let x = &tape.values[i];
            for (o, d) in delta.iter().enumerate() {
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (gw, xi) in row.iter_mut().zip(x) {
                    *gw += d * xi;
                }
            }
            if i > 0 {
                let mut next = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (n, w) in next.iter_mut().zip(row) {
                        *n += d * w;
                    }
                }
                delta = next;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Dense::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
