//! CollGram-style phraseological profiling.
//!
//! The pipeline: tokenize documents ([`tokenizer`]), count a reference
//! corpus into a frequency index ([`refindex`]), score each document's
//! bigrams for mutual information and t-score against that index
//! ([`assoc`]), then compare aligned sets of document profiles with paired
//! t-tests under Bonferroni correction ([`stats`]). The [`corpus`] module
//! extracts documents from Europarl-style session files and draws
//! deterministic length-bounded samples.

pub mod assoc;
pub mod corpus;
pub mod refindex;
pub mod stats;
pub mod tokenizer;

pub use assoc::{
    AssociationScores, CountingMode, DocumentProfile, ProfileIndex, MI_THRESHOLD, T_THRESHOLD,
};
pub use corpus::{PairedDocuments, RawDocument, SamplingSpec};
pub use refindex::FrequencyIndex;
pub use stats::{ComparisonMatrix, MatrixCell, PairedComparison};
pub use tokenizer::{BigramOccurrence, ProperNounMode, Token, TokenizedDocument, TokenizerConfig};
