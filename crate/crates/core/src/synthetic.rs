//! Synthetic pair datasets with a planted class signal, for end-to-end
//! checks of the pipeline without a real corpus.
//!
//! Words come in four kinds, each with its own toy vector:
//! * topic words, clustered around a per-topic direction; every topic has an
//!   antitopic whose words sit around the opposite direction,
//! * marker words, planted in seed (and optionally target) documents,
//! * filler words, small random vectors added as noise.
//!
//! The nine positive classes form three groups of three. Within a group the
//! target's topic is the seed's topic, its antitopic, or an unrelated topic.
//! Seed markers are drawn from a group-shared vocabulary except with
//! probability `marker_specificity`, when a class-specific marker is used.
//! `None` pairs carry no markers and unrelated topics.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Corpus, Document, LabeledPair};
use crate::embeddings::WordVectorTable;
use crate::error::Result;
use crate::relation::RelationClass;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub pairs: usize,
    pub dim: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    pub markers_per_class: usize,
    /// Topic words in each document.
    pub topic_tokens: usize,
    /// Marker tokens in each seed document.
    pub marker_tokens: usize,
    /// Also plant class-specific markers in target documents.
    pub target_markers: bool,
    pub filler_vocab: usize,
    pub filler_tokens: usize,
    /// Probability that a seed marker is class-specific rather than shared
    /// with the other classes of its group. 1.0 gives disjoint marker
    /// vocabularies.
    pub marker_specificity: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            pairs: 2000,
            dim: 50,
            topics: 12,
            words_per_topic: 8,
            markers_per_class: 6,
            topic_tokens: 8,
            marker_tokens: 6,
            target_markers: true,
            filler_vocab: 300,
            filler_tokens: 12,
            marker_specificity: 1.0,
            seed: 7,
        }
    }
}

impl SyntheticConfig {
    /// Disjoint class markers on both sides: linearly separable classes.
    pub fn separable() -> Self {
        Self::default()
    }

    /// Seed markers mostly shared within a group and no target markers, so
    /// classes inside a group differ mainly in how the two topics relate.
    /// Fewer topic words and more filler make that relation noisier.
    pub fn overlapping() -> Self {
        Self {
            target_markers: false,
            marker_specificity: 0.25,
            topic_tokens: 4,
            filler_tokens: 20,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TopicRelation {
    Same,
    Opposite,
    Unrelated,
}

fn topic_relation(class: RelationClass) -> TopicRelation {
    match class.index() % 3 {
        _ if class == RelationClass::None => TopicRelation::Unrelated,
        0 => TopicRelation::Same,
        1 => TopicRelation::Opposite,
        _ => TopicRelation::Unrelated,
    }
}

pub struct SyntheticData<T> {
    pub corpus: Corpus,
    pub pairs: Vec<LabeledPair>,
    pub vectors: WordVectorTable<T>,
}

/// Generates `cfg.pairs` pairs, balanced over the ten classes, with two fresh
/// documents per pair.
pub fn generate<T: Scalar>(cfg: &SyntheticConfig) -> Result<SyntheticData<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dim = cfg.dim;
    let mut vectors = WordVectorTable::<T>::new(dim);
    let random_vec = |rng: &mut ChaCha8Rng, scale: f64| -> Vec<f64> {
        (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal) * scale).collect()
    };
    let to_t = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<T>>();

    // topic t and its antitopic share a center with opposite signs
    let mut topic_words: Vec<Vec<String>> = Vec::new();
    let mut anti_words: Vec<Vec<String>> = Vec::new();
    for t in 0..cfg.topics {
        let center = random_vec(&mut rng, 1.0);
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for w in 0..cfg.words_per_topic {
            let noise = random_vec(&mut rng, 0.3);
            let p: Vec<f64> = center.iter().zip(&noise).map(|(c, n)| c + n).collect();
            let noise = random_vec(&mut rng, 0.3);
            let n: Vec<f64> = center.iter().zip(&noise).map(|(c, n)| -c + n).collect();
            let (pw, nw) = (format!("topic{t}w{w}"), format!("anti{t}w{w}"));
            vectors.insert(pw.clone(), to_t(&p))?;
            vectors.insert(nw.clone(), to_t(&n))?;
            pos.push(pw);
            neg.push(nw);
        }
        topic_words.push(pos);
        anti_words.push(neg);
    }
    let mut vocab = |prefix: String, n: usize, scale: f64, rng: &mut ChaCha8Rng| -> Result<Vec<String>> {
        (0..n)
            .map(|i| {
                let w = format!("{prefix}{i}");
                vectors.insert(w.clone(), to_t(&random_vec(rng, scale)))?;
                Ok(w)
            })
            .collect()
    };
    let mut seed_markers = Vec::new();
    let mut target_markers = Vec::new();
    for c in RelationClass::POSITIVE {
        seed_markers.push(vocab(
            format!("mark{}s", c.index()),
            cfg.markers_per_class,
            1.0,
            &mut rng,
        )?);
        target_markers.push(vocab(
            format!("mark{}t", c.index()),
            cfg.markers_per_class,
            1.0,
            &mut rng,
        )?);
    }
    let group_markers: Vec<Vec<String>> = (0..3)
        .map(|g| vocab(format!("group{g}m"), cfg.markers_per_class, 1.0, &mut rng))
        .collect::<Result<_>>()?;
    let filler = vocab("fill".into(), cfg.filler_vocab, 0.5, &mut rng)?;

    let mut corpus = Corpus::new();
    let mut pairs = Vec::with_capacity(cfg.pairs);
    let mut doc_no = 0usize;
    for i in 0..cfg.pairs {
        let class = RelationClass::ALL[i % RelationClass::ALL.len()];
        let seed_topic = rng.gen_range(0..cfg.topics);
        let (target_pool, target_topic) = match topic_relation(class) {
            TopicRelation::Same => (&topic_words, seed_topic),
            TopicRelation::Opposite => (&anti_words, seed_topic),
            TopicRelation::Unrelated => {
                let other = (seed_topic + rng.gen_range(1..cfg.topics)) % cfg.topics;
                (&topic_words, other)
            }
        };
        let mut seed_tokens = sample(&topic_words[seed_topic], cfg.topic_tokens, &mut rng);
        let mut target_tokens = sample(&target_pool[target_topic], cfg.topic_tokens, &mut rng);
        if class.is_positive() {
            let c = class.index();
            for _ in 0..cfg.marker_tokens {
                let pool = if rng.gen::<f64>() < cfg.marker_specificity {
                    &seed_markers[c]
                } else {
                    &group_markers[c / 3]
                };
                seed_tokens.push(pool.choose(&mut rng).unwrap().clone());
                if cfg.target_markers {
                    target_tokens.push(target_markers[c].choose(&mut rng).unwrap().clone());
                }
            }
        }
        seed_tokens.extend(sample(&filler, cfg.filler_tokens, &mut rng));
        target_tokens.extend(sample(&filler, cfg.filler_tokens, &mut rng));
        let mut ids = Vec::with_capacity(2);
        for mut tokens in [seed_tokens, target_tokens] {
            tokens.shuffle(&mut rng);
            doc_no += 1;
            let id = format!("syn{doc_no:06}");
            corpus.insert(Document {
                doc_id: id.clone(),
                qid: None,
                title: id.clone(),
                text: tokens.join(" "),
            })?;
            ids.push(id);
        }
        pairs.push(LabeledPair::new(ids[0].clone(), ids[1].clone(), class));
    }
    pairs.shuffle(&mut rng);
    Ok(SyntheticData { corpus, pairs, vectors })
}

fn sample(pool: &[String], n: usize, rng: &mut impl Rng) -> Vec<String> {
    (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
}
