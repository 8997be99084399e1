//! Labeled pair dataset construction: harvesting, filtering, negative
//! sampling and assembly.

pub mod assemble;
pub mod corpus;
pub mod negative;
pub mod pairs;
pub mod sparql;

pub use assemble::{
    assemble_dataset, read_manifest, read_pairs, write_manifest, write_pairs, DatasetManifest, Provenance,
};
pub use corpus::{load_corpus, write_corpus, Corpus, Document};
pub use negative::{id_pool, negative_sample};
pub use pairs::{class_counts, filter_triples, resolve_to_corpus, LabeledPair};
pub use sparql::{
    expand_missing_relations, fetch_relations, harvest, open_source, sample_balanced, FixtureSource, RelationSource,
    RelationTriple, SampleOrder, SparqlClient, DEFAULT_ENDPOINT, ENDPOINT_ENV,
};
