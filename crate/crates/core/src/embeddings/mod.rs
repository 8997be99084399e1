//! Document embeddings and pair-vector construction.

pub mod average;
pub mod concat;
pub mod pvdbow;
pub mod tokenize;
pub mod vectors;

pub use average::{avg_glove_embed, embed_corpus, AvgEmbedding};
pub use concat::{concat, concat_into, ConcatScheme};
pub use pvdbow::{train_pvdbow, PvdbowConfig, PvdbowOutput};
pub use tokenize::{tokenize_counts, tokens, Stopwords};
pub use vectors::{
    load_word_vectors, load_word_vectors_strict, DocVectorTable, LoadStats, VectorTable, WordVectorTable,
};
