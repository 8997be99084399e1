//! Precision, recall and F1 from a confusion matrix, and their aggregation
//! over cross-validation folds.

use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(tp: u64, fp: u64, fn_: u64) -> (Self, bool, bool) {
        let p_undef = tp + fp == 0;
        let r_undef = tp + fn_ == 0;
        let precision = if p_undef { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if r_undef { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        (Self::new(precision, recall), p_undef, r_undef)
    }

    /// F1 is the harmonic mean of `precision` and `recall`, 0 when both are 0.
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub class: String,
    #[serde(flatten)]
    pub scores: Prf,
    pub support: u64,
    /// No sample was predicted as this class; precision was set to 0.
    pub precision_undefined: bool,
    /// The class has no test samples; recall was set to 0.
    pub recall_undefined: bool,
}

/// Scores of one evaluation (one fold).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: Vec<ClassScores>,
    pub micro: Prf,
    pub macro_avg: Prf,
    pub support: u64,
}

/// Per-class, micro- and macro-averaged scores. Macro averages are the
/// unweighted means of the per-class values over every class of the matrix.
pub fn prf_scores(conf: &ConfusionMatrix) -> EvalReport {
    let n = conf.n();
    let per_class: Vec<ClassScores> = (0..n)
        .map(|c| {
            let tp = conf.get(c, c);
            let fp = conf.col_sum(c) - tp;
            let fn_ = conf.row_sum(c) - tp;
            let (scores, p_undef, r_undef) = Prf::from_counts(tp, fp, fn_);
            ClassScores {
                class: conf.classes[c].clone(),
                scores,
                support: conf.row_sum(c),
                precision_undefined: p_undef,
                recall_undefined: r_undef,
            }
        })
        .collect();
    let tp = conf.trace();
    let total = conf.total();
    // every sample has exactly one prediction, so pooled FP = pooled FN
    let (micro, _, _) = Prf::from_counts(tp, total - tp, total - tp);
    let mean = |f: fn(&Prf) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_class.iter().map(|c| f(&c.scores)).sum::<f64>() / n as f64
        }
    };
    let macro_avg = Prf {
        precision: mean(|p| p.precision),
        recall: mean(|p| p.recall),
        f1: mean(|p| p.f1),
    };
    EvalReport {
        per_class,
        micro,
        macro_avg,
        support: total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Arithmetic mean and sample (n - 1) standard deviation; the std is 0
    /// for fewer than two values.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrfSummary {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
}

impl PrfSummary {
    fn of<'a>(items: impl Iterator<Item = &'a Prf> + Clone) -> Self {
        let col = |f: fn(&Prf) -> f64| MeanStd::of(&items.clone().map(f).collect::<Vec<_>>());
        Self {
            precision: col(|p| p.precision),
            recall: col(|p| p.recall),
            f1: col(|p| p.f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    #[serde(flatten)]
    pub scores: PrfSummary,
    /// Mean test support per fold.
    pub support: f64,
}

/// Fold reports with mean and standard deviation of every metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub folds: Vec<EvalReport>,
    pub per_class: Vec<ClassSummary>,
    pub micro: PrfSummary,
    pub macro_avg: PrfSummary,
    /// Mean test-set size per fold.
    pub support: f64,
    /// Fewer than two folds: standard deviations are reported as 0.
    pub std_undefined: bool,
}

impl AggregateReport {
    pub fn empty() -> Self {
        Self {
            folds: Vec::new(),
            per_class: Vec::new(),
            micro: PrfSummary::default(),
            macro_avg: PrfSummary::default(),
            support: 0.0,
            std_undefined: true,
        }
    }
}

/// Mean and sample standard deviation of every metric over the folds.
pub fn aggregate_folds(reports: &[EvalReport]) -> Result<AggregateReport> {
    let Some(first) = reports.first() else {
        return Ok(AggregateReport::empty());
    };
    let classes: Vec<&str> = first.per_class.iter().map(|c| c.class.as_str()).collect();
    for r in reports {
        if !r.per_class.iter().map(|c| c.class.as_str()).eq(classes.iter().copied()) {
            return Err(Error::Invalid("fold reports disagree on the class set".into()));
        }
    }
    let folds = reports.len() as f64;
    let per_class = classes
        .iter()
        .enumerate()
        .map(|(i, name)| ClassSummary {
            class: name.to_string(),
            scores: PrfSummary::of(reports.iter().map(|r| &r.per_class[i].scores)),
            support: reports.iter().map(|r| r.per_class[i].support as f64).sum::<f64>() / folds,
        })
        .collect();
    Ok(AggregateReport {
        folds: reports.to_vec(),
        per_class,
        micro: PrfSummary::of(reports.iter().map(|r| &r.micro)),
        macro_avg: PrfSummary::of(reports.iter().map(|r| &r.macro_avg)),
        support: reports.iter().map(|r| r.support as f64).sum::<f64>() / folds,
        std_undefined: reports.len() < 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_class(rows: [[u64; 2]; 2]) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::new(vec!["a".into(), "b".into()]);
        for (t, row) in rows.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    m.add(t, p);
                }
            }
        }
        m
    }

    #[test]
    fn diagonal_scores_one() {
        let r = prf_scores(&two_class([[3, 0], [0, 5]]));
        for c in &r.per_class {
            assert_eq!((c.scores.precision, c.scores.recall, c.scores.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.micro.f1, 1.0);
        assert_eq!(r.macro_avg.f1, 1.0);
    }

    #[test]
    fn hand_computed_two_class() {
        let r = prf_scores(&two_class([[1, 1], [0, 2]]));
        let a = &r.per_class[0];
        assert_relative_eq!(a.scores.precision, 1.0);
        assert_relative_eq!(a.scores.recall, 0.5);
        assert_relative_eq!(a.scores.f1, 2.0 / 3.0);
        assert_relative_eq!(r.micro.f1, 0.75);
        assert_relative_eq!(r.micro.precision, r.micro.recall);
        // class b: P = 2/3, R = 1, F1 = 0.8
        assert_relative_eq!(r.macro_avg.f1, (2.0 / 3.0 + 0.8) / 2.0);
        assert_eq!(r.support, 4);
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let r = prf_scores(&two_class([[2, 0], [0, 0]]));
        let b = &r.per_class[1];
        assert!(b.precision_undefined && b.recall_undefined);
        assert_eq!(b.scores.f1, 0.0);
        assert!(!r.per_class[0].precision_undefined);
    }

    #[test]
    fn fold_std_is_sample_std() {
        let m = MeanStd::of(&[0.9, 1.0]);
        assert_relative_eq!(m.mean, 0.95);
        assert_relative_eq!(m.std, 0.070710678118654, epsilon = 1e-12);
        assert_eq!(MeanStd::of(&[0.5, 0.5, 0.5]).std, 0.0);
        assert_eq!(MeanStd::of(&[0.7]).std, 0.0);
    }

    #[test]
    fn aggregate_identical_folds() {
        let r = prf_scores(&two_class([[1, 1], [0, 2]]));
        let agg = aggregate_folds(&[r.clone(), r.clone(), r]).unwrap();
        assert_relative_eq!(agg.micro.f1.mean, 0.75);
        assert_eq!(agg.micro.f1.std, 0.0);
        assert!(!agg.std_undefined);
        assert_eq!(agg.per_class[0].support, 2.0);
    }

    #[test]
    fn single_fold_flags_std() {
        let r = prf_scores(&two_class([[1, 1], [0, 2]]));
        let agg = aggregate_folds(&[r]).unwrap();
        assert!(agg.std_undefined);
        assert_eq!(agg.micro.f1.std, 0.0);
    }

    #[test]
    fn mismatched_classes_rejected() {
        let a = prf_scores(&two_class([[1, 0], [0, 1]]));
        let b = prf_scores(&ConfusionMatrix::for_relations());
        assert!(aggregate_folds(&[a, b]).is_err());
    }
}
