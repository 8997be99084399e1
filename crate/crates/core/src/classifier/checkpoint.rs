//! JSON model checkpoints. Parameters are stored as `f64`, which represents
//! every `f32` and `f64` exactly, so a save/load cycle is bit-exact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mlp::{Dense, MlpConfig, MlpModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const FORMAT: &str = "docrel-mlp";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct LayerRecord {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    version: u32,
    scalar: String,
    config: MlpConfig,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
    layers: Vec<LayerRecord>,
}

/// A model plus free-form metadata (embedder, scheme, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub model: MlpModel<T>,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn new(model: MlpModel<T>) -> Self {
        Self {
            model,
            metadata: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = CheckpointFile {
            format: FORMAT.into(),
            version: VERSION,
            scalar: T::NAME.into(),
            config: self.model.config.clone(),
            metadata: self.metadata.clone(),
            layers: self
                .model
                .layers
                .iter()
                .map(|l| LayerRecord {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    weights: l.weights.iter().map(|x| x.as_f64()).collect(),
                    bias: l.bias.iter().map(|x| x.as_f64()).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CheckpointFile =
            serde_json::from_str(s).map_err(|e| Error::Invalid(format!("unreadable checkpoint: {e}")))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::Invalid(format!(
                "unsupported checkpoint {} v{}",
                file.format, file.version
            )));
        }
        if file.scalar != T::NAME {
            return Err(Error::Invalid(format!(
                "checkpoint holds {} parameters, expected {}",
                file.scalar,
                T::NAME
            )));
        }
        file.config.validate()?;
        let widths = file.config.widths();
        if file.layers.len() + 1 != widths.len() {
            return Err(Error::Invalid(
                "checkpoint layer count does not match its config".into(),
            ));
        }
        let mut layers = Vec::with_capacity(file.layers.len());
        for (l, w) in file.layers.into_iter().zip(widths.windows(2)) {
            if (l.inputs, l.outputs) != (w[0], w[1])
                || l.weights.len() != l.inputs * l.outputs
                || l.bias.len() != l.outputs
            {
                return Err(Error::Invalid("checkpoint layer shapes do not chain".into()));
            }
            layers.push(Dense {
                inputs: l.inputs,
                outputs: l.outputs,
                weights: l.weights.into_iter().map(T::of).collect(),
                bias: l.bias.into_iter().map(T::of).collect(),
            });
        }
        let model = MlpModel {
            config: file.config,
            layers,
        };
        if !model.is_finite() {
            return Err(Error::Invalid("checkpoint contains non-finite parameters".into()));
        }
        Ok(Self {
            model,
            metadata: file.metadata,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
