use serde::{Deserialize, Serialize};

use super::mlp::{MlpModel, Mode};
use crate::error::Result;
use crate::relation::{RelationClass, NUM_CLASSES};
use crate::scalar::Scalar;

/// Class scores and the classes ranked by descending score.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub scores: Vec<T>,
    pub ranked: Vec<RelationClass>,
}

impl<T: Scalar> Prediction<T> {
    /// Ranks classes by score; equal scores keep the fixed class order.
    pub fn from_scores(scores: Vec<T>) -> Self {
        debug_assert_eq!(scores.len(), NUM_CLASSES);
        let mut ranked = RelationClass::ALL.to_vec();
        ranked.sort_by(|a, b| {
            scores[b.index()]
                .partial_cmp(&scores[a.index()])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self { scores, ranked }
    }

    pub fn label(&self) -> RelationClass {
        self.ranked[0]
    }

    pub fn score(&self, class: RelationClass) -> T {
        self.scores[class.index()]
    }

    pub fn top(&self, k: usize) -> impl Iterator<Item = (RelationClass, T)> + '_ {
        self.ranked.iter().take(k).map(|&c| (c, self.score(c)))
    }
}

/// Inference in evaluation mode (no dropout).
pub fn predict<T: Scalar>(model: &MlpModel<T>, x: &[T]) -> Result<Prediction<T>> {
    Ok(Prediction::from_scores(model.forward(x, Mode::Eval)?))
}

/// One line of a predictions file; shared by every model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub seed_id: String,
    pub target_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_label: Option<String>,
    pub scores: Vec<f64>,
    pub ranked_labels: Vec<String>,
}

impl PredictionRecord {
    pub fn new<T: Scalar>(seed_id: &str, target_id: &str, truth: Option<RelationClass>, p: &Prediction<T>) -> Self {
        Self {
            seed_id: seed_id.to_string(),
            target_id: target_id.to_string(),
            true_label: truth.map(|c| c.label().to_string()),
            scores: p.scores.iter().map(|s| s.as_f64()).collect(),
            ranked_labels: p.ranked.iter().map(|c| c.label().to_string()).collect(),
        }
    }

    pub fn predicted(&self) -> Result<RelationClass> {
        match self.ranked_labels.first() {
            Some(l) => l.parse(),
            None => Err(crate::Error::Invalid(format!(
                "prediction for ({}, {}) has no ranked labels",
                self.seed_id, self.target_id
            ))),
        }
    }

    pub fn truth(&self) -> Result<Option<RelationClass>> {
        self.true_label.as_deref().map(str::parse).transpose()
    }

    /// Checks the record against the shared contract: ten finite scores in
    /// [0, 1] and a ranking that is a permutation of the ten labels.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| crate::Error::Invalid(format!("record ({}, {}): {m}", self.seed_id, self.target_id));
        if self.scores.len() != NUM_CLASSES {
            return Err(bad("expected 10 scores"));
        }
        if self.scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(bad("scores must lie in [0, 1]"));
        }
        let mut ranked = self
            .ranked_labels
            .iter()
            .map(|l| l.parse::<RelationClass>())
            .collect::<Result<Vec<_>>>()?;
        ranked.sort();
        if ranked != RelationClass::ALL {
            return Err(bad("ranked_labels must be a permutation of the ten labels"));
        }
        self.truth()?;
        Ok(())
    }

    /// The `top` best classes as `1st: has effect (0.87), 2nd: none (0.22)`.
    pub fn describe(&self, top: usize) -> Result<String> {
        let mut parts = Vec::with_capacity(top);
        for (rank, label) in self.ranked_labels.iter().take(top).enumerate() {
            let class: RelationClass = label.parse()?;
            let score = self.scores.get(class.index()).copied().unwrap_or(f64::NAN);
            parts.push(format!("{}: {} ({score:.2})", ordinal(rank + 1), class.name()));
        }
        Ok(parts.join(", "))
    }
}

/// English ordinal: 1st, 2nd, 3rd, 4th, ..., 11th, 12th, 13th, 21st.
pub fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::mlp::MlpConfig;

    #[test]
    fn ordinals() {
        let got: Vec<String> = [1, 2, 3, 4, 10, 11, 12, 13, 21, 22, 111]
            .into_iter()
            .map(ordinal)
            .collect();
        assert_eq!(
            got,
            ["1st", "2nd", "3rd", "4th", "10th", "11th", "12th", "13th", "21st", "22nd", "111th"]
        );
    }

    #[test]
    fn describe_top_two() {
        let mut scores = vec![0.01; NUM_CLASSES];
        scores[RelationClass::HasEffect.index()] = 0.87;
        scores[RelationClass::None.index()] = 0.22;
        let p = Prediction::from_scores(scores);
        let r = PredictionRecord::new("Alcoholism", "Cirrhosis", None, &p);
        assert_eq!(r.describe(2).unwrap(), "1st: has effect (0.87), 2nd: none (0.22)");
        assert_eq!(r.describe(0).unwrap(), "");
    }

    #[test]
    fn ties_resolve_to_first_class() {
        let cfg = MlpConfig {
            input_dim: 3,
            hidden_layers: vec![2],
            ..Default::default()
        };
        let p = predict(&MlpModel::<f64>::zeros(cfg).unwrap(), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.scores, vec![0.5; 10]);
        assert_eq!(p.label(), RelationClass::CountryOfCitizenship);
        assert_eq!(p.ranked, RelationClass::ALL.to_vec());
    }

    #[test]
    fn ranking_is_a_permutation_in_score_order() {
        let scores = vec![0.1, 0.9, 0.3, 0.3, 0.05, 0.87, 0.2, 0.01, 0.4, 0.22];
        let p = Prediction::from_scores(scores);
        assert_eq!(p.label(), RelationClass::DifferentFrom);
        let top: Vec<_> = p.top(2).map(|(c, _)| c).collect();
        assert_eq!(top, vec![RelationClass::DifferentFrom, RelationClass::HasEffect]);
        // equal scores: EducatedAt (2) before Employer (3)
        let i = p.ranked.iter().position(|&c| c == RelationClass::EducatedAt).unwrap();
        assert_eq!(p.ranked[i + 1], RelationClass::Employer);
        let mut sorted = p.ranked.clone();
        sorted.sort();
        assert_eq!(sorted, RelationClass::ALL.to_vec());
    }

    #[test]
    fn record_round_trip_and_validation() {
        let p = Prediction::from_scores(vec![0.2f32; 10]);
        let r = PredictionRecord::new("a", "b", Some(RelationClass::HasEffect), &p);
        r.validate().unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.starts_with(r#"{"seed_id":"a","target_id":"b","true_label":"P1542","scores":["#));
        let back: PredictionRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        let mut broken = r.clone();
        broken.ranked_labels[3] = "P27".into();
        assert!(broken.validate().is_err());
        let mut broken = r;
        broken.true_label = Some("P9".into());
        assert!(broken.validate().is_err());
    }
}
