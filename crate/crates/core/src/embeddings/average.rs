//! Count-weighted average of pretrained word vectors.

use super::tokenize::{tokenize_counts, Stopwords};
use super::vectors::{DocVectorTable, WordVectorTable};
use crate::dataset::Corpus;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct AvgEmbedding<T> {
    pub vector: Vec<T>,
    /// Token occurrences found in the table.
    pub covered: usize,
    /// Token occurrences after stopword removal.
    pub total: usize,
}

impl<T> AvgEmbedding<T> {
    /// Set when no token was in the table; `vector` is then all zeros.
    pub fn zero_coverage(&self) -> bool {
        self.covered == 0
    }
}

/// `(Σ c_i w_i) / Σ c_i` over the in-vocabulary tokens of `text`, where
/// `c_i` is the occurrence count of word `i`. Out-of-vocabulary tokens are
/// skipped.
pub fn avg_glove_embed<T: Scalar>(text: &str, table: &WordVectorTable<T>, stopwords: &Stopwords) -> AvgEmbedding<T> {
    let counts = tokenize_counts(text, stopwords);
    let mut sum = vec![T::zero(); table.dim()];
    let mut covered = 0usize;
    let mut total = 0usize;
    for (word, &c) in &counts {
        total += c;
        if let Some(w) = table.get(word) {
            let weight = T::of(c as f64);
            for (s, &x) in sum.iter_mut().zip(w) {
                *s += weight * x;
            }
            covered += c;
        }
    }
    if covered > 0 {
        let n = T::of(covered as f64);
        for s in &mut sum {
            *s /= n;
        }
    }
    AvgEmbedding {
        vector: sum,
        covered,
        total,
    }
}

/// Embeds every corpus document. Returns the table and the ids of documents
/// with zero coverage.
pub fn embed_corpus<T: Scalar>(
    corpus: &Corpus,
    table: &WordVectorTable<T>,
    stopwords: &Stopwords,
) -> Result<(DocVectorTable<T>, Vec<String>)> {
    let mut out = DocVectorTable::new(table.dim());
    let mut flagged = Vec::new();
    for doc in corpus.iter() {
        let e = avg_glove_embed(&doc.text, table, stopwords);
        if e.zero_coverage() {
            flagged.push(doc.doc_id.clone());
        }
        out.insert(doc.doc_id.clone(), e.vector)?;
    }
    if !flagged.is_empty() {
        log::warn!("{} document(s) have no in-vocabulary tokens", flagged.len());
    }
    Ok((out, flagged))
}
