//! Corpus handling: speaker-turn extraction from Europarl-style files,
//! deterministic length-bounded sampling, and document pairing across
//! translation sets.
//!
//! Sampling is reproducible by construction: eligible documents are sorted
//! by doc_id before a partial Fisher-Yates shuffle driven by a seeded
//! ChaCha20 stream, with bounded draws obtained by rejection sampling, so
//! neither input order nor platform word width changes the selection.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// One extracted document (a speaker turn, or a whole file when there is
/// no markup).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
    /// Unicode scalar count of `text`.
    pub char_count: usize,
}

impl RawDocument {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let char_count = text.chars().count();
        Self {
            doc_id: doc_id.into(),
            text,
            char_count,
        }
    }
}

/// Length bounds (inclusive) and draw size for [`sample_documents`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingSpec {
    pub min_chars: usize,
    pub max_chars: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            min_chars: 3_500,
            max_chars: 4_500,
            sample_size: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("sampling spec: min_chars {min} exceeds max_chars {max}")]
    InvalidBounds { min: usize, max: usize },
    #[error("sampling spec: sample_size must be at least 1")]
    ZeroSampleSize,
    #[error("only {eligible} documents in [{min}, {max}] chars, need {required}")]
    InsufficientEligible {
        eligible: usize,
        required: usize,
        min: usize,
        max: usize,
    },
    #[error("duplicate doc_id {doc_id:?}")]
    DuplicateDocId { doc_id: String },
    #[error("documents missing from paired sets: {details}")]
    MissingDocuments { details: String },
}

const SPEAKER_TAG: &str = "<SPEAKER";
const MARKUP_TAGS: [&str; 3] = ["<CHAPTER", SPEAKER_TAG, "<P"];

fn is_markup(line: &str) -> bool {
    MARKUP_TAGS.iter().any(|tag| line.starts_with(tag))
}

/// Splits a Europarl-style file into speaker turns.
///
/// `<SPEAKER ...>` lines open a new document; `<CHAPTER ...>` and `<P>`
/// lines are dropped. Text before the first speaker tag becomes its own
/// document when non-empty, and a file without any markup yields one
/// document. Turn text keeps interior lines joined by single newlines,
/// trimmed at both ends; documents that trim to nothing are dropped.
/// doc_ids are `<source_name>-<NNN>` with a 1-based zero-padded ordinal.
pub fn parse_europarl(text: &str, source_name: &str) -> Vec<RawDocument> {
    let mut docs: Vec<RawDocument> = Vec::new();
    let mut current: Vec<&str> = Vec::new();

    let flush = |lines: &mut Vec<&str>, docs: &mut Vec<RawDocument>| {
        let body = lines.join("\n");
        let trimmed = body.trim();
        if !trimmed.is_empty() {
            let doc_id = format!("{}-{:03}", source_name, docs.len() + 1);
            docs.push(RawDocument::new(doc_id, trimmed));
        }
        lines.clear();
    };

    for line in text.lines() {
        if line.starts_with(SPEAKER_TAG) {
            flush(&mut current, &mut docs);
        } else if !is_markup(line) {
            current.push(line);
        }
    }
    flush(&mut current, &mut docs);
    docs
}

/// Uniform draw in `[0, bound)` by rejection: draws below
/// `2^64 mod bound` fall in the biased remainder zone and are retried, so
/// every residue is equally likely.
fn bounded_u64(rng: &mut ChaCha20Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let v = rng.next_u64();
        if v >= threshold {
            return v % bound;
        }
    }
}

/// Moves a uniformly random `count`-subset into `items[..count]`
/// (partial Fisher-Yates).
fn partial_shuffle<T>(items: &mut [T], count: usize, rng: &mut ChaCha20Rng) {
    debug_assert!(count <= items.len());
    for i in 0..count {
        let j = i + bounded_u64(rng, (items.len() - i) as u64) as usize;
        items.swap(i, j);
    }
}

/// Draws `spec.sample_size` documents uniformly without replacement from
/// those whose `char_count` lies in `[min_chars, max_chars]` (inclusive).
/// The selection depends only on the eligible doc_id set and the seed;
/// the result is sorted by doc_id.
pub fn sample_documents(
    docs: &[RawDocument],
    spec: &SamplingSpec,
) -> Result<Vec<RawDocument>, CorpusError> {
    if spec.min_chars > spec.max_chars {
        return Err(CorpusError::InvalidBounds {
            min: spec.min_chars,
            max: spec.max_chars,
        });
    }
    if spec.sample_size == 0 {
        return Err(CorpusError::ZeroSampleSize);
    }
    let mut seen = std::collections::HashSet::with_capacity(docs.len());
    for doc in docs {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(CorpusError::DuplicateDocId {
                doc_id: doc.doc_id.clone(),
            });
        }
    }

    let mut eligible: Vec<&RawDocument> = docs
        .iter()
        .filter(|d| (spec.min_chars..=spec.max_chars).contains(&d.char_count))
        .collect();
    if eligible.len() < spec.sample_size {
        return Err(CorpusError::InsufficientEligible {
            eligible: eligible.len(),
            required: spec.sample_size,
            min: spec.min_chars,
            max: spec.max_chars,
        });
    }

    eligible.sort_unstable_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if eligible.len() > spec.sample_size {
        let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
        partial_shuffle(&mut eligible, spec.sample_size, &mut rng);
        eligible.truncate(spec.sample_size);
        eligible.sort_unstable_by(|a, b| a.doc_id.cmp(&b.doc_id));
    }
    Ok(eligible.into_iter().cloned().collect())
}

/// A source document aligned with its counterpart from every translation
/// set, in the order the sets were given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedDocuments<'a> {
    pub doc_id: String,
    pub source: &'a RawDocument,
    pub translations: Vec<&'a RawDocument>,
}

/// Aligns translation sets against `source` by doc_id. The source defines
/// the id set; every translation set must contain each source id (extra
/// documents are ignored). Rows come back sorted by doc_id.
pub fn pair_documents<'a>(
    source: &'a [RawDocument],
    translations: &[(&str, &'a [RawDocument])],
) -> Result<Vec<PairedDocuments<'a>>, CorpusError> {
    let mut by_id: Vec<std::collections::HashMap<&str, &RawDocument>> = Vec::new();
    for (label, docs) in translations {
        let mut map = std::collections::HashMap::with_capacity(docs.len());
        for doc in *docs {
            if map.insert(doc.doc_id.as_str(), doc).is_some() {
                return Err(CorpusError::DuplicateDocId {
                    doc_id: format!("{} (in set {})", doc.doc_id, label),
                });
            }
        }
        by_id.push(map);
    }

    let mut ordered: Vec<&RawDocument> = source.iter().collect();
    ordered.sort_unstable_by(|a, b| a.doc_id.cmp(&b.doc_id));

    let mut complaints = Vec::new();
    for ((label, _), map) in translations.iter().zip(&by_id) {
        let missing: Vec<&str> = ordered
            .iter()
            .map(|d| d.doc_id.as_str())
            .filter(|id| !map.contains_key(id))
            .collect();
        if !missing.is_empty() {
            complaints.push(format!(
                "set {:?} is missing [{}]",
                label,
                missing.join(", ")
            ));
        }
    }
    if !complaints.is_empty() {
        return Err(CorpusError::MissingDocuments {
            details: complaints.join("; "),
        });
    }

    Ok(ordered
        .into_iter()
        .map(|doc| PairedDocuments {
            doc_id: doc.doc_id.clone(),
            source: doc,
            translations: by_id.iter().map(|m| m[doc.doc_id.as_str()]).collect(),
        })
        .collect())
}
