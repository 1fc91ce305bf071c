//! Reference-corpus frequency index: unigram and bigram counts over folded
//! word tokens, with a sorted-TSV on-disk form that is byte-reproducible.
//!
//! Counting is defined by the tokenizer module with proper-noun detection
//! off. Document order never affects the result: shards are counted
//! independently and merged by addition, and the saved files are sorted.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::{adjacent_word_pairs, tokenize, TokenizerConfig};

const META_FILE: &str = "meta.json";
const UNIGRAM_FILE: &str = "unigrams.tsv";
const BIGRAM_FILE: &str = "bigrams.tsv";
const FORMAT_NAME: &str = "collgram-index";
const FORMAT_VERSION: u32 = 1;

/// Frequency index over a reference corpus. Words are interned; lookups go
/// through the folded form produced by the tokenizer.
#[derive(Debug, Clone)]
pub struct FrequencyIndex {
    total_tokens: u64,
    min_bigram_count: u64,
    tokenizer_fingerprint: String,
    words: Vec<String>,
    word_ids: HashMap<String, u32>,
    unigram_counts: Vec<u64>,
    bigram_counts: HashMap<(u32, u32), u64>,
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("empty reference corpus")]
    EmptyCorpus,
    #[error("min_bigram_count must be at least 1")]
    InvalidMinCount,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported index format in {path}")]
    UnsupportedFormat { path: PathBuf },
    #[error("{path}: {reason}")]
    MalformedMeta { path: PathBuf, reason: String },
    #[error("{path}:{line}: {reason}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}: unigram counts sum to {sum} but total_tokens is {expected}")]
    TokenTotalMismatch {
        path: PathBuf,
        sum: u64,
        expected: u64,
    },
}

#[derive(Serialize, Deserialize)]
struct IndexMeta {
    format: String,
    version: u32,
    total_tokens: u64,
    min_bigram_count: u64,
    tokenizer_fingerprint: String,
}

impl FrequencyIndex {
    /// Total word tokens counted, `N` in the association formulas.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn min_bigram_count(&self) -> u64 {
        self.min_bigram_count
    }

    pub fn tokenizer_fingerprint(&self) -> &str {
        &self.tokenizer_fingerprint
    }

    pub fn unigram_type_count(&self) -> usize {
        self.words.len()
    }

    pub fn bigram_type_count(&self) -> usize {
        self.bigram_counts.len()
    }

    pub fn unigram_count(&self, word: &str) -> Option<u64> {
        self.word_ids
            .get(word)
            .map(|&id| self.unigram_counts[id as usize])
    }

    /// All unigrams, in unspecified order.
    pub fn unigrams(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.words
            .iter()
            .zip(&self.unigram_counts)
            .map(|(w, &c)| (w.as_str(), c))
    }

    /// All bigrams, in unspecified order.
    pub fn bigrams(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.bigram_counts.iter().map(|(&(a, b), &c)| {
            (
                self.words[a as usize].as_str(),
                self.words[b as usize].as_str(),
                c,
            )
        })
    }

    /// Count of the ordered pair `(w1, w2)`; `None` when unseen or dropped
    /// by the frequency floor.
    pub fn lookup_bigram(&self, w1: &str, w2: &str) -> Option<u64> {
        let a = *self.word_ids.get(w1)?;
        let b = *self.word_ids.get(w2)?;
        self.bigram_counts.get(&(a, b)).copied()
    }

    fn sorted_unigrams(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<(&str, u64)> = self.unigrams().collect();
        rows.sort_unstable_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
        rows
    }

    fn sorted_bigrams(&self) -> Vec<(&str, &str, u64)> {
        let mut rows: Vec<(&str, &str, u64)> = self.bigrams().collect();
        rows.sort_unstable_by(|x, y| {
            (x.0.as_bytes(), x.1.as_bytes()).cmp(&(y.0.as_bytes(), y.1.as_bytes()))
        });
        rows
    }
}

/// Logical equality: interning order is ignored, counts and metadata must
/// match exactly.
impl PartialEq for FrequencyIndex {
    fn eq(&self, other: &Self) -> bool {
        self.total_tokens == other.total_tokens
            && self.min_bigram_count == other.min_bigram_count
            && self.tokenizer_fingerprint == other.tokenizer_fingerprint
            && self.sorted_unigrams() == other.sorted_unigrams()
            && self.sorted_bigrams() == other.sorted_bigrams()
    }
}

impl Eq for FrequencyIndex {}

/// Counts accumulated over one shard of documents. Shards intern words
/// independently; `merge` remaps ids, so merging in any order yields the
/// same counts.
#[derive(Default)]
struct ShardCounts {
    words: Vec<String>,
    word_ids: HashMap<String, u32>,
    unigram_counts: Vec<u64>,
    bigram_counts: HashMap<(u32, u32), u64>,
    total_tokens: u64,
}

impl ShardCounts {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.word_ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.word_ids.insert(word.to_string(), id);
        self.unigram_counts.push(0);
        id
    }

    fn add_document(&mut self, text: &str, config: &TokenizerConfig) {
        let doc = tokenize("", text, config);
        for token in doc.tokens.iter().filter(|t| t.is_word) {
            let id = self.intern(&token.folded);
            self.unigram_counts[id as usize] += 1;
            self.total_tokens += 1;
        }
        for (_, a, b) in adjacent_word_pairs(&doc) {
            let ia = self.intern(&a.folded);
            let ib = self.intern(&b.folded);
            *self.bigram_counts.entry((ia, ib)).or_insert(0) += 1;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let remap: Vec<u32> = other.words.iter().map(|w| self.intern(w)).collect();
        for (id, count) in other.unigram_counts.into_iter().enumerate() {
            self.unigram_counts[remap[id] as usize] += count;
        }
        for ((a, b), count) in other.bigram_counts {
            *self
                .bigram_counts
                .entry((remap[a as usize], remap[b as usize]))
                .or_insert(0) += count;
        }
        self.total_tokens += other.total_tokens;
        self
    }
}

/// Counts unigrams and bigrams over `docs` and applies the bigram frequency
/// floor. Proper-noun detection is always off here: the index must count
/// every adjacent word pair.
pub fn build_index<I>(
    docs: I,
    config: &TokenizerConfig,
    min_bigram_count: u64,
) -> Result<FrequencyIndex, IndexError>
where
    I: IntoIterator<Item = String>,
{
    if min_bigram_count == 0 {
        return Err(IndexError::InvalidMinCount);
    }
    let docs: Vec<String> = docs.into_iter().collect();
    let counts = docs
        .par_iter()
        .with_min_len(64)
        .fold(ShardCounts::default, |mut shard, text| {
            shard.add_document(text, config);
            shard
        })
        .reduce(ShardCounts::default, ShardCounts::merge);

    if counts.total_tokens == 0 {
        return Err(IndexError::EmptyCorpus);
    }

    let mut bigram_counts = counts.bigram_counts;
    if min_bigram_count > 1 {
        bigram_counts.retain(|_, c| *c >= min_bigram_count);
    }

    Ok(FrequencyIndex {
        total_tokens: counts.total_tokens,
        min_bigram_count,
        tokenizer_fingerprint: config.fingerprint(),
        words: counts.words,
        word_ids: counts.word_ids,
        unigram_counts: counts.unigram_counts,
        bigram_counts,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IndexError + '_ {
    move |source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `meta.json`, `unigrams.tsv` and `bigrams.tsv` under `dir`.
/// Rows are sorted by word bytes, so equal indexes save byte-identically.
pub fn save_index(index: &FrequencyIndex, dir: &Path) -> Result<(), IndexError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let meta = IndexMeta {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        total_tokens: index.total_tokens,
        min_bigram_count: index.min_bigram_count,
        tokenizer_fingerprint: index.tokenizer_fingerprint.clone(),
    };
    let meta_path = dir.join(META_FILE);
    let mut meta_json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    meta_json.push('\n');
    fs::write(&meta_path, meta_json).map_err(io_err(&meta_path))?;

    let uni_path = dir.join(UNIGRAM_FILE);
    let mut w = BufWriter::new(fs::File::create(&uni_path).map_err(io_err(&uni_path))?);
    for (word, count) in index.sorted_unigrams() {
        writeln!(w, "{word}\t{count}").map_err(io_err(&uni_path))?;
    }
    w.flush().map_err(io_err(&uni_path))?;

    let bi_path = dir.join(BIGRAM_FILE);
    let mut w = BufWriter::new(fs::File::create(&bi_path).map_err(io_err(&bi_path))?);
    for (w1, w2, count) in index.sorted_bigrams() {
        writeln!(w, "{w1}\t{w2}\t{count}").map_err(io_err(&bi_path))?;
    }
    w.flush().map_err(io_err(&bi_path))?;
    Ok(())
}

/// Reads an index saved by [`save_index`], validating internal consistency.
pub fn load_index(dir: &Path) -> Result<FrequencyIndex, IndexError> {
    let meta_path = dir.join(META_FILE);
    let meta_text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    let meta: IndexMeta =
        serde_json::from_str(&meta_text).map_err(|e| IndexError::MalformedMeta {
            path: meta_path.clone(),
            reason: e.to_string(),
        })?;
    if meta.format != FORMAT_NAME || meta.version != FORMAT_VERSION {
        return Err(IndexError::UnsupportedFormat { path: meta_path });
    }

    let uni_path = dir.join(UNIGRAM_FILE);
    let reader = BufReader::new(fs::File::open(&uni_path).map_err(io_err(&uni_path))?);
    let mut words = Vec::new();
    let mut word_ids = HashMap::new();
    let mut unigram_counts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(&uni_path))?;
        let malformed = |reason: &str| IndexError::MalformedLine {
            path: uni_path.clone(),
            line: i + 1,
            reason: reason.to_string(),
        };
        let (word, count) = line
            .split_once('\t')
            .ok_or_else(|| malformed("expected word<TAB>count"))?;
        let count: u64 = count
            .parse()
            .map_err(|_| malformed("count is not an integer"))?;
        if word_ids.contains_key(word) {
            return Err(malformed("duplicate word"));
        }
        word_ids.insert(word.to_string(), words.len() as u32);
        words.push(word.to_string());
        unigram_counts.push(count);
    }

    let sum: u64 = unigram_counts.iter().sum();
    if sum != meta.total_tokens {
        return Err(IndexError::TokenTotalMismatch {
            path: uni_path,
            sum,
            expected: meta.total_tokens,
        });
    }

    let bi_path = dir.join(BIGRAM_FILE);
    let reader = BufReader::new(fs::File::open(&bi_path).map_err(io_err(&bi_path))?);
    let mut bigram_counts = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(&bi_path))?;
        let malformed = |reason: String| IndexError::MalformedLine {
            path: bi_path.clone(),
            line: i + 1,
            reason,
        };
        let mut fields = line.split('\t');
        let (Some(w1), Some(w2), Some(count), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed("expected w1<TAB>w2<TAB>count".to_string()));
        };
        let count: u64 = count
            .parse()
            .map_err(|_| malformed("count is not an integer".to_string()))?;
        let resolve = |w: &str| {
            word_ids
                .get(w)
                .copied()
                .ok_or_else(|| malformed(format!("unknown word {w:?}")))
        };
        let key = (resolve(w1)?, resolve(w2)?);
        if bigram_counts.insert(key, count).is_some() {
            return Err(malformed("duplicate bigram".to_string()));
        }
    }

    Ok(FrequencyIndex {
        total_tokens: meta.total_tokens,
        min_bigram_count: meta.min_bigram_count,
        tokenizer_fingerprint: meta.tokenizer_fingerprint,
        words,
        word_ids,
        unigram_counts,
        bigram_counts,
    })
}
