use docrel::dataset::{Corpus, Document};
use docrel::embeddings::{train_pvdbow, PvdbowConfig};
use docrel::scalar::cosine;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOPICS: [&[&str]; 5] = [
    &["river", "water", "bridge", "flood", "bank", "stream", "valley", "delta"],
    &["guitar", "album", "band", "concert", "song", "singer", "tour", "record"],
    &[
        "planet",
        "orbit",
        "star",
        "telescope",
        "galaxy",
        "comet",
        "moon",
        "solar",
    ],
    &["court", "judge", "law", "trial", "appeal", "verdict", "jury", "statute"],
    &[
        "virus",
        "fever",
        "cough",
        "symptom",
        "infection",
        "patient",
        "vaccine",
        "disease",
    ],
];

/// 50 documents, ten per topic; d00 and d01 are identical.
fn toy_corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut docs = Vec::new();
    for i in 0..50 {
        let topic = TOPICS[i % 5];
        let words: Vec<&str> = (0..60).map(|_| *topic.choose(&mut rng).unwrap()).collect();
        docs.push(words.join(" "));
    }
    docs[1] = docs[0].clone();
    let corpus: docrel::Result<Corpus> = docs
        .into_iter()
        .enumerate()
        .map(|(i, text)| Document {
            doc_id: format!("d{i:02}"),
            qid: None,
            title: format!("doc {i}"),
            text,
        })
        .collect();
    corpus.unwrap()
}

fn cfg() -> PvdbowConfig {
    PvdbowConfig {
        dim: 32,
        min_word_count: 1,
        epochs: 10,
        downsample: 0.0,
        ..Default::default()
    }
}

#[test]
fn epoch_loss_decreases_monotonically() {
    let corpus = toy_corpus();
    for seed in 1..=5 {
        let out = train_pvdbow::<f64>(
            &corpus,
            &PvdbowConfig {
                rng_seed: seed,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(out.epoch_loss.len(), 10);
        for w in out.epoch_loss.windows(2) {
            assert!(w[1] < w[0], "seed {seed}: loss went up: {:?}", out.epoch_loss);
        }
    }
}

#[test]
fn duplicated_documents_end_up_closest() {
    let out = train_pvdbow::<f64>(&toy_corpus(), &cfg()).unwrap();
    let v = |id: &str| out.vectors.get(id).unwrap();
    let twins = cosine(v("d00"), v("d01"));
    // d02 belongs to another topic
    assert!(twins > cosine(v("d00"), v("d02")), "{twins}");
    assert!(twins > cosine(v("d01"), v("d02")));
    // and the twins are closer than a same-topic non-duplicate
    assert!(twins > cosine(v("d00"), v("d05")));
}

#[test]
fn default_dimension_and_full_coverage() {
    let corpus = toy_corpus();
    let out = train_pvdbow::<f32>(
        &corpus,
        &PvdbowConfig {
            epochs: 2,
            min_word_count: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(out.vectors.len(), corpus.len());
    assert_eq!(out.vectors.dim(), 200);
    assert!(out.untrained.is_empty());
}

#[test]
fn same_seed_same_vectors() {
    let corpus = toy_corpus();
    let a = train_pvdbow::<f32>(&corpus, &cfg()).unwrap();
    let b = train_pvdbow::<f32>(&corpus, &cfg()).unwrap();
    assert_eq!(a.vectors, b.vectors);
    assert_eq!(a.epoch_loss, b.epoch_loss);
}
