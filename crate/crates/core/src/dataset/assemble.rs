use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::Corpus;
use super::pairs::{class_counts, LabeledPair};
use crate::error::{Error, Result};
use crate::relation::RelationClass;

/// Summary written next to the pairs file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub counts: BTreeMap<RelationClass, usize>,
    pub total: usize,
    pub harvested_at: String,
    pub endpoint: String,
    pub rng_seed: u64,
}

impl DatasetManifest {
    pub fn positives(&self) -> usize {
        self.counts
            .iter()
            .filter(|(c, _)| c.is_positive())
            .map(|(_, n)| n)
            .sum()
    }

    pub fn count(&self, class: RelationClass) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }
}

/// Where the dataset came from; recorded verbatim in the manifest.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    pub endpoint: String,
    pub harvested_at: String,
}

/// Joins positives and negatives, checks every id against the corpus and
/// shuffles with `rng_seed`.
pub fn assemble_dataset(
    positives: Vec<LabeledPair>,
    negatives: Vec<LabeledPair>,
    corpus: &Corpus,
    rng_seed: u64,
    provenance: Provenance,
) -> Result<(Vec<LabeledPair>, DatasetManifest)> {
    let mut pairs = positives;
    pairs.extend(negatives);
    let mut missing: Vec<String> = pairs
        .iter()
        .flat_map(|p| [&p.seed_id, &p.target_id])
        .filter(|id| !corpus.contains(id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::MissingDocs(missing));
    }
    pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let manifest = DatasetManifest {
        counts: class_counts(&pairs),
        total: pairs.len(),
        harvested_at: provenance.harvested_at,
        endpoint: provenance.endpoint,
        rng_seed,
    };
    Ok((pairs, manifest))
}

pub fn write_pairs(path: impl AsRef<Path>, pairs: &[LabeledPair]) -> Result<()> {
    crate::io::write_jsonl(path, pairs)
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<LabeledPair>> {
    crate::io::read_jsonl(path)
}

pub fn write_manifest(path: impl AsRef<Path>, manifest: &DatasetManifest) -> Result<()> {
    crate::io::write_json(path, manifest)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    crate::io::read_json(path)
}
