//! Paragraph vectors, distributed bag-of-words variant, trained with
//! negative sampling.
//!
//! Each document vector is trained to predict the words of its document
//! against noise words drawn from the unigram distribution raised to 0.75.
//! Word vectors are not trained; only the document vectors and the output
//! weights are updated.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tokenize::tokens;
use super::vectors::DocVectorTable;
use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::scalar::{dot, sigmoid, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PvdbowConfig {
    pub dim: usize,
    /// Context window. Pure DBOW trains no word vectors, so this only matters
    /// for compatibility with configurations that do.
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub min_word_count: usize,
    pub initial_learning_rate: f64,
    pub min_learning_rate: f64,
    /// Frequent-word downsampling threshold; 0 disables it.
    pub downsample: f64,
    pub rng_seed: u64,
}

impl Default for PvdbowConfig {
    fn default() -> Self {
        Self {
            dim: 200,
            window: 5,
            negative_samples: 5,
            epochs: 10,
            min_word_count: 5,
            initial_learning_rate: 0.025,
            min_learning_rate: 0.0001,
            downsample: 1e-3,
            rng_seed: 1,
        }
    }
}

impl PvdbowConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim", self.dim),
            ("window", self.window),
            ("negative_samples", self.negative_samples),
            ("epochs", self.epochs),
            ("min_word_count", self.min_word_count),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if self.initial_learning_rate.is_nan() || self.initial_learning_rate <= 0.0 || self.min_learning_rate < 0.0 {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        if self.downsample < 0.0 {
            return Err(Error::Config("downsample must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PvdbowOutput<T> {
    pub vectors: DocVectorTable<T>,
    /// Mean negative-sampling loss per epoch.
    pub epoch_loss: Vec<f64>,
    /// Documents with no in-vocabulary token; they keep their initial vector.
    pub untrained: Vec<String>,
    pub vocab_size: usize,
}

struct Vocab {
    index: HashMap<String, usize>,
    counts: Vec<u64>,
}

impl Vocab {
    fn build(docs: &[Vec<String>], min_count: usize) -> Self {
        let mut raw: HashMap<&str, u64> = HashMap::new();
        for d in docs {
            for w in d {
                *raw.entry(w).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = raw.into_iter().filter(|&(_, c)| c >= min_count as u64).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        Self {
            index: kept.iter().enumerate().map(|(i, (w, _))| (w.to_string(), i)).collect(),
            counts: kept.iter().map(|&(_, c)| c).collect(),
        }
    }

    fn len(&self) -> usize {
        self.counts.len()
    }
}

/// Cumulative unigram^0.75 weights for noise sampling.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

/// Trains one vector per corpus document. Deterministic for a given
/// `rng_seed`; documents are visited in doc id order every epoch.
pub fn train_pvdbow<T: Scalar>(corpus: &Corpus, cfg: &PvdbowConfig) -> Result<PvdbowOutput<T>> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::Invalid(
            "cannot train document vectors on an empty corpus".into(),
        ));
    }
    let ids: Vec<&str> = corpus.ids().collect();
    let texts: Vec<Vec<String>> = corpus.iter().map(|d| tokens(&d.text)).collect();
    let vocab = Vocab::build(&texts, cfg.min_word_count);
    let docs: Vec<Vec<usize>> = texts
        .iter()
        .map(|t| t.iter().filter_map(|w| vocab.index.get(w).copied()).collect())
        .collect();
    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let scale = 0.5 / dim as f64;
    let mut doc_vecs: Vec<Vec<T>> = (0..ids.len())
        .map(|_| (0..dim).map(|_| T::of(rng.gen_range(-scale..scale))).collect())
        .collect();
    let untrained: Vec<String> = ids
        .iter()
        .zip(&docs)
        .filter(|(_, d)| d.is_empty())
        .map(|(id, _)| id.to_string())
        .collect();

    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    if vocab.len() > 0 {
        let mut out_weights = vec![T::zero(); vocab.len() * dim];
        let noise = NoiseTable::new(&vocab.counts);
        let keep_prob = keep_probabilities(&vocab.counts, cfg.downsample);
        let words_per_epoch: usize = docs.iter().map(Vec::len).sum();
        let total_words = (words_per_epoch * cfg.epochs).max(1) as f64;
        let mut processed = 0usize;
        let mut grad = vec![T::zero(); dim];

        for _epoch in 0..cfg.epochs {
            let mut loss_sum = 0.0;
            let mut predictions = 0usize;
            for (d, words) in docs.iter().enumerate() {
                let progress = processed as f64 / total_words;
                let lr = cfg.initial_learning_rate - (cfg.initial_learning_rate - cfg.min_learning_rate) * progress;
                let lr = T::of(lr.max(cfg.min_learning_rate));
                processed += words.len();
                let dv = &mut doc_vecs[d];
                for &w in words {
                    if keep_prob[w] < 1.0 && keep_prob[w] < rng.gen::<f64>() {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = T::zero());
                    for k in 0..=cfg.negative_samples {
                        let (target, label) = if k == 0 {
                            (w, T::one())
                        } else {
                            let n = noise.sample(&mut rng);
                            if n == w {
                                continue;
                            }
                            (n, T::zero())
                        };
                        let row = &mut out_weights[target * dim..(target + 1) * dim];
                        let score = dot(dv, row);
                        let p = sigmoid(score);
                        let l = if label == T::one() { p } else { T::one() - p };
                        loss_sum -= l.as_f64().max(1e-30).ln();
                        let g = (label - p) * lr;
                        for ((gi, r), &x) in grad.iter_mut().zip(row.iter_mut()).zip(dv.iter()) {
                            *gi += g * *r;
                            *r += g * x;
                        }
                        predictions += 1;
                    }
                    for (x, &gi) in dv.iter_mut().zip(&grad) {
                        *x += gi;
                    }
                }
            }
            let mean = if predictions > 0 {
                loss_sum / predictions as f64
            } else {
                0.0
            };
            log::debug!("pvdbow epoch {}: loss {mean:.5}", epoch_loss.len() + 1);
            epoch_loss.push(mean);
        }
    }
    if !untrained.is_empty() {
        log::warn!(
            "{} document(s) have no in-vocabulary words and were not trained",
            untrained.len()
        );
    }

    let mut vectors = DocVectorTable::new(dim);
    for (id, v) in ids.into_iter().zip(doc_vecs) {
        vectors.insert(id, v)?;
    }
    Ok(PvdbowOutput {
        vectors,
        epoch_loss,
        untrained,
        vocab_size: vocab.len(),
    })
}

/// Probability of keeping each occurrence of a word under frequent-word
/// downsampling with threshold `sample`.
fn keep_probabilities(counts: &[u64], sample: f64) -> Vec<f64> {
    if sample <= 0.0 {
        return vec![1.0; counts.len()];
    }
    let total: u64 = counts.iter().sum();
    let threshold = sample * total as f64;
    counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            (((c / threshold).sqrt() + 1.0) * threshold / c).min(1.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Document;

    fn corpus(texts: &[&str]) -> Corpus {
        let c: Result<Corpus> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document {
                doc_id: format!("d{i:02}"),
                qid: None,
                title: String::new(),
                text: t.to_string(),
            })
            .collect();
        c.unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(PvdbowConfig::default().validate().is_ok());
        let bad = PvdbowConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(m)) if m.contains("epochs")));
        let bad = PvdbowConfig {
            initial_learning_rate: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noise_sampling_follows_weights() {
        let table = NoiseTable::new(&[16, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let n = 20_000;
        let zeros = (0..n).filter(|_| table.sample(&mut rng) == 0).count();
        // 16^0.75 = 8, so P(0) = 8/9
        let p = zeros as f64 / n as f64;
        assert!((p - 8.0 / 9.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn downsampling_keeps_rare_words() {
        let keep = keep_probabilities(&[1_000_000, 10], 1e-3);
        assert!(keep[0] < 0.1);
        assert_eq!(keep[1], 1.0);
        assert_eq!(keep_probabilities(&[5, 5], 0.0), vec![1.0, 1.0]);
    }

    #[test]
    fn empty_doc_is_flagged_untrained() {
        let c = corpus(&["alpha beta gamma alpha beta", "!!", "gamma beta alpha"]);
        let cfg = PvdbowConfig {
            dim: 8,
            min_word_count: 1,
            epochs: 2,
            ..Default::default()
        };
        let out = train_pvdbow::<f64>(&c, &cfg).unwrap();
        assert_eq!(out.untrained, vec!["d01".to_string()]);
        assert_eq!(out.vectors.len(), 3);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(train_pvdbow::<f32>(&Corpus::new(), &PvdbowConfig::default()).is_err());
    }
}
