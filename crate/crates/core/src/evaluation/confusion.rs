use serde::{Deserialize, Serialize};

use crate::classifier::PredictionRecord;
use crate::error::{Error, Result};
use crate::relation::{RelationClass, NUM_CLASSES};

/// Square count matrix; rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let n = classes.len();
        Self {
            classes,
            counts: vec![0; n * n],
        }
    }

    /// Empty 10x10 matrix over the relation classes in their fixed order.
    pub fn for_relations() -> Self {
        Self::new(RelationClass::ALL.iter().map(|c| c.name().to_string()).collect())
    }

    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        let n = self.n();
        self.counts[truth * n + predicted] += 1;
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.n() + predicted]
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        let n = self.n();
        &self.counts[truth * n..(truth + 1) * n]
    }

    /// Test support of a class.
    pub fn row_sum(&self, truth: usize) -> u64 {
        self.row(truth).iter().sum()
    }

    pub fn col_sum(&self, predicted: usize) -> u64 {
        (0..self.n()).map(|t| self.get(t, predicted)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n()).map(|i| self.get(i, i)).sum()
    }

    /// Each row divided by its sum; rows without support stay zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|t| {
                let s = self.row_sum(t);
                self.row(t)
                    .iter()
                    .map(|&c| if s == 0 { 0.0 } else { c as f64 / s as f64 })
                    .collect()
            })
            .collect()
    }

    /// Element-wise sum with a matrix over the same classes.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.classes != other.classes {
            return Err(Error::Invalid(
                "cannot merge confusion matrices over different classes".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (RelationClass, RelationClass)>) -> Self {
        let mut m = Self::for_relations();
        for (t, p) in pairs {
            m.add(t.index(), p.index());
        }
        m
    }
}

/// Tallies prediction records; every record needs a true label.
pub fn confusion(records: &[PredictionRecord]) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::for_relations();
    debug_assert_eq!(m.n(), NUM_CLASSES);
    for r in records {
        let truth = r.truth()?.ok_or_else(|| {
            Error::Invalid(format!(
                "prediction for ({}, {}) has no true_label",
                r.seed_id, r.target_id
            ))
        })?;
        m.add(truth.index(), r.predicted()?.index());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelationClass::*;

    fn record(truth: &str, ranked_first: &str) -> PredictionRecord {
        let mut ranked: Vec<String> = RelationClass::ALL.iter().map(|c| c.label().to_string()).collect();
        let pos = ranked.iter().position(|l| l == ranked_first).unwrap_or(0);
        ranked.swap(0, pos);
        ranked[0] = ranked_first.to_string();
        PredictionRecord {
            seed_id: "s".into(),
            target_id: "t".into(),
            true_label: Some(truth.into()),
            scores: vec![0.5; 10],
            ranked_labels: ranked,
        }
    }

    #[test]
    fn perfect_predictions_are_diagonal() {
        let recs: Vec<_> = RelationClass::ALL
            .iter()
            .map(|c| record(c.label(), c.label()))
            .collect();
        let m = confusion(&recs).unwrap();
        for t in 0..10 {
            for p in 0..10 {
                assert_eq!(m.get(t, p), u64::from(t == p));
            }
        }
    }

    #[test]
    fn hand_tally() {
        let m = confusion(&[record("P69", "P108"), record("P69", "P69"), record("none", "P69")]).unwrap();
        assert_eq!(m.get(EducatedAt.index(), Employer.index()), 1);
        assert_eq!(m.get(EducatedAt.index(), EducatedAt.index()), 1);
        assert_eq!(m.get(None.index(), EducatedAt.index()), 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.row_sum(EducatedAt.index()), 2);
        let norm = m.row_normalized();
        assert_eq!(norm[EducatedAt.index()][Employer.index()], 0.5);
        assert!(norm[Symptoms.index()].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn normalized_row_shares() {
        // 100 "educated at" samples, 27 predicted "employer"
        let pairs = (0..100).map(|i| (EducatedAt, if i < 27 { Employer } else { EducatedAt }));
        let m = ConfusionMatrix::from_pairs(pairs);
        let row = &m.row_normalized()[EducatedAt.index()];
        assert!((row[Employer.index()] - 0.27).abs() < 1e-12);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_or_missing_labels_fail() {
        assert!(matches!(confusion(&[record("P5", "P69")]), Err(Error::UnknownLabel(_))));
        let mut r = record("P69", "P69");
        r.true_label = Option::None;
        assert!(confusion(&[r]).is_err());
    }
}
