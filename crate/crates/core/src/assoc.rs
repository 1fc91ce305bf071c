//! Bigram association scoring and per-document collocational profiles.
//!
//! For an observed bigram count `O`, member unigram counts `f1` and `f2`
//! and corpus size `N`, the expected count is `E = f1 * f2 / N` and the two
//! association measures are
//!
//! ```text
//! MI = log2(O * N / (f1 * f2))        t = (O - E) / sqrt(O)
//! ```
//!
//! A bigram is highly collocational when `MI >= 5` or when `t >= 6`; a
//! document's profile is the share of its scored bigrams clearing each
//! threshold, plus the ratio of the two shares.

use std::collections::HashSet;
use std::io;

use thiserror::Error;

use crate::refindex::FrequencyIndex;
use crate::tokenizer::{extract_bigrams, TokenizedDocument, TokenizerConfig};

pub const MI_THRESHOLD: f64 = 5.0;
pub const T_THRESHOLD: f64 = 6.0;

/// Association measures for one bigram, together with the frequencies they
/// were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationScores {
    pub observed: u64,
    pub f1: u64,
    pub f2: u64,
    pub n: u64,
    pub expected: f64,
    pub mi: f64,
    pub t: f64,
}

/// How bigrams are tallied in a profile: every occurrence, or each distinct
/// pair once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingMode {
    #[default]
    Occurrences,
    Types,
}

/// Per-document phraseological profile. Percentage fields are absent when
/// no bigram could be scored; the ratio is additionally absent when
/// `pct_high_mi` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentProfile {
    pub doc_id: String,
    pub bigrams_total: u64,
    pub bigrams_scored: u64,
    pub high_mi: u64,
    pub high_t: u64,
    pub pct_high_mi: Option<f64>,
    pub pct_high_t: Option<f64>,
    pub ratio: Option<f64>,
}

/// The three per-document indexes that profiles expose for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileIndex {
    PctHighMi,
    PctHighT,
    Ratio,
}

impl ProfileIndex {
    pub const ALL: [ProfileIndex; 3] = [
        ProfileIndex::PctHighMi,
        ProfileIndex::PctHighT,
        ProfileIndex::Ratio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileIndex::PctHighMi => "pct_high_mi",
            ProfileIndex::PctHighT => "pct_high_t",
            ProfileIndex::Ratio => "ratio",
        }
    }
}

impl std::fmt::Display for ProfileIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl DocumentProfile {
    pub fn index_value(&self, index: ProfileIndex) -> Option<f64> {
        match index {
            ProfileIndex::PctHighMi => self.pct_high_mi,
            ProfileIndex::PctHighT => self.pct_high_t,
            ProfileIndex::Ratio => self.ratio,
        }
    }
}

#[derive(Debug, Error)]
pub enum AssocError {
    #[error("inconsistent frequencies: observed={observed} f1={f1} f2={f2} n={n}")]
    InconsistentFrequencies {
        observed: u64,
        f1: u64,
        f2: u64,
        n: u64,
    },
    #[error("tokenizer mismatch: index fingerprint {expected}, document fingerprint {actual}")]
    TokenizerMismatch { expected: String, actual: String },
    #[error("profile CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("profile CSV: expected header {expected:?}, found {found:?}")]
    ProfileCsvHeader {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("profile CSV record {record}: {reason}")]
    ProfileCsvField { record: usize, reason: String },
}

/// Scores one bigram. All frequencies must be positive and mutually
/// consistent: `observed <= min(f1, f2)` and `f1, f2 <= n`.
pub fn score_bigram(
    observed: u64,
    f1: u64,
    f2: u64,
    n: u64,
) -> Result<AssociationScores, AssocError> {
    let consistent = observed >= 1 && f1 >= observed && f2 >= observed && n >= f1 && n >= f2;
    if !consistent {
        return Err(AssocError::InconsistentFrequencies {
            observed,
            f1,
            f2,
            n,
        });
    }
    let o = observed as f64;
    let (f1f, f2f, nf) = (f1 as f64, f2 as f64, n as f64);
    let expected = f1f * f2f / nf;
    let mi = (o * nf / (f1f * f2f)).log2();
    let t = (o - expected) / o.sqrt();
    Ok(AssociationScores {
        observed,
        f1,
        f2,
        n,
        expected,
        mi,
        t,
    })
}

/// The threshold comparisons are inclusive: a score exactly at the
/// threshold counts as highly collocational.
pub fn is_highly_collocational_mi(scores: &AssociationScores) -> bool {
    scores.mi >= MI_THRESHOLD
}

pub fn is_highly_collocational_t(scores: &AssociationScores) -> bool {
    scores.t >= T_THRESHOLD
}

/// Profiles one tokenized document against a reference index.
///
/// `config` must be the configuration the document was tokenized with; its
/// fingerprint is checked against the index so scores are never computed
/// across differing token rules.
pub fn profile_document(
    doc: &TokenizedDocument,
    config: &TokenizerConfig,
    index: &FrequencyIndex,
    counting: CountingMode,
) -> Result<DocumentProfile, AssocError> {
    let expected = index.tokenizer_fingerprint();
    let actual = config.fingerprint();
    if expected != actual {
        return Err(AssocError::TokenizerMismatch {
            expected: expected.to_string(),
            actual,
        });
    }

    let occurrences = extract_bigrams(doc);
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut bigrams_total = 0u64;
    let mut bigrams_scored = 0u64;
    let mut high_mi = 0u64;
    let mut high_t = 0u64;

    for occ in &occurrences {
        if counting == CountingMode::Types && !seen.insert((&occ.w1, &occ.w2)) {
            continue;
        }
        bigrams_total += 1;
        let Some(observed) = index.lookup_bigram(&occ.w1, &occ.w2) else {
            continue;
        };
        let f1 = index
            .unigram_count(&occ.w1)
            .expect("indexed bigram member has a unigram count");
        let f2 = index
            .unigram_count(&occ.w2)
            .expect("indexed bigram member has a unigram count");
        let scores = score_bigram(observed, f1, f2, index.total_tokens())?;
        bigrams_scored += 1;
        if is_highly_collocational_mi(&scores) {
            high_mi += 1;
        }
        if is_highly_collocational_t(&scores) {
            high_t += 1;
        }
    }

    let pct = |high: u64| (bigrams_scored > 0).then(|| 100.0 * high as f64 / bigrams_scored as f64);
    let pct_high_mi = pct(high_mi);
    let pct_high_t = pct(high_t);
    let ratio = match (pct_high_mi, pct_high_t) {
        (Some(mi), Some(t)) if mi > 0.0 => Some(t / mi),
        _ => None,
    };

    Ok(DocumentProfile {
        doc_id: doc.doc_id.clone(),
        bigrams_total,
        bigrams_scored,
        high_mi,
        high_t,
        pct_high_mi,
        pct_high_t,
        ratio,
    })
}

pub const PROFILE_CSV_HEADER: [&str; 8] = [
    "doc_id",
    "bigrams_total",
    "bigrams_scored",
    "high_mi",
    "high_t",
    "pct_high_mi",
    "pct_high_t",
    "ratio",
];

/// Six decimals, round-half-even; the standard formatter already rounds
/// exact halves to the even digit.
pub(crate) fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_opt6(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

/// Writes profiles in the fixed CSV layout; absent values become empty
/// fields.
pub fn write_profiles_csv<W: io::Write>(
    profiles: &[DocumentProfile],
    writer: W,
) -> Result<(), AssocError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PROFILE_CSV_HEADER)?;
    for p in profiles {
        w.write_record([
            p.doc_id.as_str(),
            &p.bigrams_total.to_string(),
            &p.bigrams_scored.to_string(),
            &p.high_mi.to_string(),
            &p.high_t.to_string(),
            &fmt_opt6(p.pct_high_mi),
            &fmt_opt6(p.pct_high_t),
            &fmt_opt6(p.ratio),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a profile CSV produced by [`write_profiles_csv`].
pub fn read_profiles_csv<R: io::Read>(reader: R) -> Result<Vec<DocumentProfile>, AssocError> {
    let mut r = csv::Reader::from_reader(reader);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != PROFILE_CSV_HEADER {
        return Err(AssocError::ProfileCsvHeader {
            expected: PROFILE_CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }

    let mut profiles = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let field_err = |reason: String| AssocError::ProfileCsvField {
            record: i + 1,
            reason,
        };
        if record.len() != PROFILE_CSV_HEADER.len() {
            return Err(field_err(format!("{} fields", record.len())));
        }
        let int = |idx: usize| -> Result<u64, AssocError> {
            record[idx].parse().map_err(|_| {
                field_err(format!(
                    "{}: {:?} is not an integer",
                    PROFILE_CSV_HEADER[idx], &record[idx]
                ))
            })
        };
        let opt = |idx: usize| -> Result<Option<f64>, AssocError> {
            let s = &record[idx];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| {
                field_err(format!(
                    "{}: {:?} is not a number",
                    PROFILE_CSV_HEADER[idx], s
                ))
            })
        };
        profiles.push(DocumentProfile {
            doc_id: record[0].to_string(),
            bigrams_total: int(1)?,
            bigrams_scored: int(2)?,
            high_mi: int(3)?,
            high_t: int(4)?,
            pct_high_mi: opt(5)?,
            pct_high_t: opt(6)?,
            ratio: opt(7)?,
        });
    }
    Ok(profiles)
}
