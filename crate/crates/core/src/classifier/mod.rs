//! MLP relation classifier over concatenated pair vectors.

pub mod checkpoint;
pub mod gradcheck;
pub mod mlp;
pub mod predict;
pub mod train;

pub use checkpoint::Checkpoint;
pub use gradcheck::{gradient_check, relative_error};
pub use mlp::{Dense, LossKind, MlpConfig, MlpModel, Mode};
pub use predict::{ordinal, predict, Prediction, PredictionRecord};
pub use train::{train, Adam};
