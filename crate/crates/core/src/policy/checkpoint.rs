//! JSON checkpoints of [`PolicyParams`].
//!
//! The document carries a format version, the network spec, and every layer
//! by name with its `[rows, cols]` shape and row-major weights. Floats are
//! written in shortest round-trip form, so save -> load -> save is
//! byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dense, Mlp, NetworkSpec, PolicyParams};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRecord {
    pub name: String,
    /// `[outputs, inputs]`
    pub shape: [usize; 2],
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointFile {
    pub format_version: u32,
    pub network: NetworkSpec,
    pub parameter_count: usize,
    pub layers: Vec<LayerRecord>,
    pub log_std: Vec<f64>,
}

fn head_records(prefix: &str, mlp: &Mlp) -> Vec<LayerRecord> {
    mlp.layers
        .iter()
        .enumerate()
        .map(|(i, l)| LayerRecord {
            name: format!("{prefix}.{i}"),
            shape: [l.outputs, l.inputs],
            weights: l.weights.clone(),
            bias: l.bias.clone(),
        })
        .collect()
}

impl CheckpointFile {
    pub fn from_params(params: &PolicyParams) -> Self {
        let mut layers = head_records("policy", &params.policy);
        layers.extend(head_records("value", &params.value));
        Self {
            format_version: FORMAT_VERSION,
            network: params.spec.clone(),
            parameter_count: params.len(),
            layers,
            log_std: params.log_std.clone(),
        }
    }

    pub fn into_params(self) -> Result<PolicyParams> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: self.format_version,
                expected: FORMAT_VERSION,
            });
        }
        self.network.validate()?;
        let spec = self.network;
        let mut params = PolicyParams::zeros(&spec);
        let expected_names: Vec<(String, [usize; 2])> = ["policy", "value"]
            .iter()
            .zip([spec.policy_sizes(), spec.value_sizes()])
            .flat_map(|(prefix, sizes)| {
                sizes
                    .windows(2)
                    .enumerate()
                    .map(|(i, w)| (format!("{prefix}.{i}"), [w[1], w[0]]))
                    .collect::<Vec<_>>()
            })
            .collect();
        if self.layers.len() != expected_names.len() {
            return Err(Error::ShapeMismatch {
                what: "layer count".into(),
                expected: expected_names.len().to_string(),
                got: self.layers.len().to_string(),
            });
        }
        let mismatch = |what: String, expected: String, got: String| Error::ShapeMismatch { what, expected, got };
        let n_policy = params.policy.layers.len();
        for (i, (record, (name, shape))) in self.layers.into_iter().zip(expected_names).enumerate() {
            if record.name != name {
                return Err(mismatch("layer name".into(), name, record.name));
            }
            if record.shape != shape
                || record.weights.len() != shape[0] * shape[1]
                || record.bias.len() != shape[0]
            {
                return Err(mismatch(
                    format!("layer {name}"),
                    format!("{shape:?}"),
                    format!(
                        "{:?} with {} weights and {} biases",
                        record.shape,
                        record.weights.len(),
                        record.bias.len()
                    ),
                ));
            }
            if record.weights.iter().chain(&record.bias).any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("layer {name} holds non-finite values")));
            }
            let layer = Dense {
                inputs: shape[1],
                outputs: shape[0],
                weights: record.weights,
                bias: record.bias,
            };
            if i < n_policy {
                params.policy.layers[i] = layer;
            } else {
                params.value.layers[i - n_policy] = layer;
            }
        }
        if self.log_std.len() != spec.policy_out {
            return Err(mismatch(
                "log_std".into(),
                spec.policy_out.to_string(),
                self.log_std.len().to_string(),
            ));
        }
        params.log_std = self.log_std;
        if self.parameter_count != params.len() {
            return Err(mismatch(
                "parameter_count".into(),
                params.len().to_string(),
                self.parameter_count.to_string(),
            ));
        }
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("checkpoint: {e}")))
    }
}

pub fn save_params(params: &PolicyParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, CheckpointFile::from_params(params).to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_params(path: impl AsRef<Path>) -> Result<PolicyParams> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CheckpointFile::from_json(&text)?.into_params()
}
