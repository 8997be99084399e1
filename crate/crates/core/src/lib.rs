//! Pairwise semantic relation classification between documents.
//!
//! The crate covers the whole pipeline:
//! * [`dataset`]: harvesting relation triples from a Wikidata SPARQL endpoint,
//!   joining them with a plain-text corpus, filtering and negative sampling,
//! * [`embeddings`]: count-weighted word-vector averages, PV-DBOW document
//!   vectors and pair concatenation schemes,
//! * [`classifier`]: a sigmoid-output MLP trained with Adam,
//! * [`evaluation`]: stratified k-fold splits, P/R/F1 and confusion matrices,
//! * [`experiment`]: the k-fold train/evaluate loop tying these together.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the single-precision variant used by the command-line tool.

pub mod classifier;
pub mod dataset;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod io;
pub mod relation;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use relation::{RelationClass, NUM_CLASSES};
pub use scalar::Scalar;

pub type Real = f32;
pub type WordVectors = embeddings::WordVectorTable<Real>;
pub type DocVectors = embeddings::DocVectorTable<Real>;
pub type Mlp = classifier::MlpModel<Real>;
pub type Mlp64 = classifier::MlpModel<f64>;
pub type ModelCheckpoint = classifier::Checkpoint<Real>;
pub type ScoredPrediction = classifier::Prediction<Real>;
