//! One experiment cell: pair vectors under a concatenation scheme, k-fold
//! training of the MLP and evaluation of every held-out fold.
//!
//! Document vectors may be computed from the whole corpus, test documents
//! included; only the classifier is restricted to each fold's training labels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{predict, train, MlpConfig, MlpModel, PredictionRecord};
use crate::dataset::LabeledPair;
use crate::embeddings::{concat, ConcatScheme, DocVectorTable};
use crate::error::{Error, Result};
use crate::evaluation::{
    aggregate_folds, prf_scores, stratified_kfold, AggregateReport, ConfusionMatrix, EvalReport, FoldAssignment,
};
use crate::relation::RelationClass;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub scheme: ConcatScheme,
    /// Classifier settings; `input_dim` is overwritten from the scheme and
    /// vector dimension.
    pub mlp: MlpConfig,
    pub k: usize,
    pub rng_seed: u64,
    /// Train the folds concurrently. Results do not depend on this.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: ConcatScheme::UvDiffProd,
            mlp: MlpConfig::default(),
            k: 4,
            rng_seed: 1,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    /// Classifier config for one fold: input width from the scheme, seed
    /// offset by the fold index.
    pub fn fold_mlp(&self, dim: usize, fold: usize) -> MlpConfig {
        MlpConfig {
            input_dim: self.scheme.output_dim(dim),
            rng_seed: self.mlp.rng_seed.wrapping_add(fold as u64),
            ..self.mlp.clone()
        }
    }
}

/// Concatenated pair vectors for every pair; all ids must have vectors.
pub fn pair_features<T: Scalar>(
    pairs: &[LabeledPair],
    docs: &DocVectorTable<T>,
    scheme: ConcatScheme,
) -> Result<Vec<Vec<T>>> {
    let mut missing: Vec<String> = pairs
        .iter()
        .flat_map(|p| [&p.seed_id, &p.target_id])
        .filter(|id| docs.get(id).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::MissingDocs(missing));
    }
    pairs
        .iter()
        .map(|p| concat(docs.get(&p.seed_id).unwrap(), docs.get(&p.target_id).unwrap(), scheme))
        .collect()
}

#[derive(Debug, Clone)]
pub struct FoldResult {
    pub fold: usize,
    pub report: EvalReport,
    pub confusion: ConfusionMatrix,
    /// Indices into the pairs, aligned with `predictions`.
    pub test_indices: Vec<usize>,
    pub predictions: Vec<PredictionRecord>,
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub scheme: ConcatScheme,
    pub folds: FoldAssignment,
    pub fold_results: Vec<FoldResult>,
    pub report: AggregateReport,
    /// Sum of the per-fold confusion matrices.
    pub confusion: ConfusionMatrix,
}

impl CellResult {
    /// Prediction records of every fold, ordered by pair index.
    pub fn predictions(&self) -> Vec<(usize, &PredictionRecord)> {
        let mut all: Vec<_> = self
            .fold_results
            .iter()
            .flat_map(|f| f.test_indices.iter().copied().zip(&f.predictions))
            .collect();
        all.sort_by_key(|(i, _)| *i);
        all
    }
}

/// Stratified k-fold train/evaluate for one scheme.
pub fn run_cell<T: Scalar>(
    pairs: &[LabeledPair],
    docs: &DocVectorTable<T>,
    cfg: &ExperimentConfig,
) -> Result<CellResult> {
    let features = pair_features(pairs, docs, cfg.scheme)?;
    let labels: Vec<RelationClass> = pairs.iter().map(|p| p.label).collect();
    let folds = stratified_kfold(&labels, cfg.k, cfg.rng_seed)?;

    let run_fold = |fold: usize| -> Result<FoldResult> {
        let train_set: Vec<(Vec<T>, RelationClass)> = folds
            .train_indices(fold)
            .into_iter()
            .map(|i| (features[i].clone(), labels[i]))
            .collect();
        let model = MlpModel::init(cfg.fold_mlp(docs.dim(), fold))?;
        let (model, loss_trace) = train(model, &train_set)?;
        let test_indices = folds.test_indices(fold);
        let mut confusion = ConfusionMatrix::for_relations();
        let mut predictions = Vec::with_capacity(test_indices.len());
        for &i in &test_indices {
            let p = predict(&model, &features[i])?;
            confusion.add(labels[i].index(), p.label().index());
            predictions.push(PredictionRecord::new(
                &pairs[i].seed_id,
                &pairs[i].target_id,
                Some(labels[i]),
                &p,
            ));
        }
        log::info!(
            "{} fold {}: micro-F1 {:.4}",
            cfg.scheme,
            fold,
            prf_scores(&confusion).micro.f1
        );
        Ok(FoldResult {
            fold,
            report: prf_scores(&confusion),
            confusion,
            test_indices,
            predictions,
            loss_trace,
        })
    };
    let fold_results: Vec<FoldResult> = if cfg.parallel {
        (0..cfg.k).into_par_iter().map(run_fold).collect::<Result<_>>()?
    } else {
        (0..cfg.k).map(run_fold).collect::<Result<_>>()?
    };

    let reports: Vec<EvalReport> = fold_results.iter().map(|f| f.report.clone()).collect();
    let mut confusion = ConfusionMatrix::for_relations();
    for f in &fold_results {
        confusion.merge(&f.confusion)?;
    }
    Ok(CellResult {
        scheme: cfg.scheme,
        folds,
        report: aggregate_folds(&reports)?,
        fold_results,
        confusion,
    })
}

/// Runs [`run_cell`] once per concatenation scheme.
pub fn run_grid<T: Scalar>(
    pairs: &[LabeledPair],
    docs: &DocVectorTable<T>,
    cfg: &ExperimentConfig,
) -> Result<Vec<CellResult>> {
    ConcatScheme::ALL
        .iter()
        .map(|&scheme| run_cell(pairs, docs, &ExperimentConfig { scheme, ..cfg.clone() }))
        .collect()
}

/// Trains one model on every pair, e.g. for a deployable checkpoint.
pub fn train_full<T: Scalar>(
    pairs: &[LabeledPair],
    docs: &DocVectorTable<T>,
    cfg: &ExperimentConfig,
) -> Result<(MlpModel<T>, Vec<f64>)> {
    let features = pair_features(pairs, docs, cfg.scheme)?;
    let samples: Vec<_> = features.into_iter().zip(pairs.iter().map(|p| p.label)).collect();
    let mlp = MlpConfig {
        input_dim: cfg.scheme.output_dim(docs.dim()),
        ..cfg.mlp.clone()
    };
    train(MlpModel::init(mlp)?, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_vectors_are_listed() {
        let mut docs = DocVectorTable::<f32>::new(2);
        docs.insert("a", vec![1.0, 0.0]).unwrap();
        let pairs = vec![LabeledPair::new("a", "b", RelationClass::Employer)];
        let err = pair_features(&pairs, &docs, ConcatScheme::Uv).unwrap_err();
        assert!(matches!(&err, Error::MissingDocs(ids) if ids == &["b"]));
    }

    #[test]
    fn fold_configs_differ_only_in_seed_and_width() {
        let cfg = ExperimentConfig::default();
        let a = cfg.fold_mlp(200, 0);
        let b = cfg.fold_mlp(200, 1);
        assert_eq!(a.input_dim, 800);
        assert_ne!(a.rng_seed, b.rng_seed);
        assert_eq!(a.hidden_layers, b.hidden_layers);
    }
}
