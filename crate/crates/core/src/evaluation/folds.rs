use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::RelationClass;

/// Fold index for every sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub rng_seed: u64,
    pub folds: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct FoldLine {
    pair_index: usize,
    fold: usize,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let lines: Vec<FoldLine> = self
            .folds
            .iter()
            .enumerate()
            .map(|(pair_index, &fold)| FoldLine { pair_index, fold })
            .collect();
        crate::io::write_jsonl(path, &lines)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let lines: Vec<FoldLine> = crate::io::read_jsonl(path)?;
        let mut folds = vec![usize::MAX; lines.len()];
        for l in &lines {
            if l.pair_index >= folds.len() || folds[l.pair_index] != usize::MAX {
                return Err(Error::Invalid(format!(
                    "fold file: bad or repeated pair_index {}",
                    l.pair_index
                )));
            }
            folds[l.pair_index] = l.fold;
        }
        let k = folds.iter().max().map_or(0, |m| m + 1);
        Ok(Self { k, rng_seed: 0, folds })
    }
}

/// Stratified k-fold split: samples of each class are shuffled with
/// `rng_seed` and dealt round-robin over the folds. The dealing position
/// carries over from one class to the next, so fold sizes differ by at most
/// one overall as well as per class.
///
/// Every class that occurs must have at least `k` samples.
pub fn stratified_kfold(labels: &[RelationClass], k: usize, rng_seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::Config("k must be at least 2".into()));
    }
    let mut by_class: BTreeMap<RelationClass, Vec<usize>> = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    if let Some((c, idx)) = by_class.iter().find(|(_, idx)| idx.len() < k) {
        return Err(Error::ClassTooSmall {
            class: c.name().to_string(),
            count: idx.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for (_, mut idx) in by_class {
        idx.shuffle(&mut rng);
        for i in idx {
            folds[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, rng_seed, folds })
}
