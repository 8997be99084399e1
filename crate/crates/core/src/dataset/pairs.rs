use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::corpus::Corpus;
use super::sparql::RelationTriple;
use crate::relation::RelationClass;

/// A labeled ordered document pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledPair {
    pub seed_id: String,
    pub target_id: String,
    pub label: RelationClass,
}

impl LabeledPair {
    pub fn new(seed: impl Into<String>, target: impl Into<String>, label: RelationClass) -> Self {
        Self {
            seed_id: seed.into(),
            target_id: target.into(),
            label,
        }
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.seed_id, &self.target_id)
    }
}

/// Collapses exact duplicates and removes every ordered pair that carries two
/// or more distinct properties. Output keeps first-occurrence order.
pub fn filter_triples(triples: &[RelationTriple]) -> Vec<LabeledPair> {
    let mut labels: HashMap<(&str, &str), HashSet<RelationClass>> = HashMap::new();
    for t in triples {
        labels
            .entry((t.seed_qid.as_str(), t.target_qid.as_str()))
            .or_default()
            .insert(t.pid);
    }
    let mut emitted = HashSet::new();
    triples
        .iter()
        .filter(|t| {
            let key = (t.seed_qid.as_str(), t.target_qid.as_str());
            labels[&key].len() == 1 && emitted.insert(key)
        })
        .map(|t| LabeledPair::new(&t.seed_qid, &t.target_qid, t.pid))
        .collect()
}

/// Rewrites item ids to corpus doc ids via the corpus' qid index. Triples
/// touching an item without a document are dropped; their count is returned.
pub fn resolve_to_corpus(triples: &[RelationTriple], corpus: &Corpus) -> (Vec<RelationTriple>, usize) {
    let index = corpus.qid_index();
    let lookup = |q: &str| -> Option<String> {
        match index.get(q) {
            Some(id) => Some(id.to_string()),
            None => corpus.contains(q).then(|| q.to_string()),
        }
    };
    let mut dropped = 0;
    let resolved = triples
        .iter()
        .filter_map(|t| match (lookup(&t.seed_qid), lookup(&t.target_qid)) {
            (Some(s), Some(d)) => Some(RelationTriple::new(s, d, t.pid)),
            _ => {
                dropped += 1;
                None
            }
        })
        .collect();
    (resolved, dropped)
}

pub fn class_counts<'a>(pairs: impl IntoIterator<Item = &'a LabeledPair>) -> BTreeMap<RelationClass, usize> {
    let mut counts: BTreeMap<RelationClass, usize> = RelationClass::ALL.into_iter().map(|c| (c, 0)).collect();
    for p in pairs {
        *counts.get_mut(&p.label).unwrap() += 1;
    }
    counts
}
