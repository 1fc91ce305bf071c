//! Rule-based tokenization, sentence segmentation, proper-noun flagging and
//! bigram enumeration.
//!
//! A word token is a maximal run of Unicode letters and digits, optionally
//! including apostrophes that have a letter on both sides. Every other
//! non-whitespace character becomes a single-character punctuation token.
//! Sentences split after `.`, `!` or `?` when followed by whitespace and an
//! uppercase- or digit-initial token, and at paragraph breaks (two or more
//! newlines between tokens).

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// How proper nouns are detected before bigram extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProperNounMode {
    /// Flag uppercase-initial words via positional evidence within the document.
    #[default]
    Heuristic,
    /// Read flags from a sidecar tag file, one `0`/`1` line per token.
    TagFile,
    /// Leave every token unflagged.
    Off,
}

impl ProperNounMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "heuristic" => Some(Self::Heuristic),
            "tag-file" | "tag_file" => Some(Self::TagFile),
            "off" => Some(Self::Off),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub case_fold: bool,
    pub keep_internal_apostrophes: bool,
    pub proper_noun_mode: ProperNounMode,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            case_fold: true,
            keep_internal_apostrophes: true,
            proper_noun_mode: ProperNounMode::Heuristic,
        }
    }
}

impl TokenizerConfig {
    /// Fingerprint of everything that shapes the folded token stream.
    ///
    /// An index records this at build time and profiling re-checks it, so
    /// documents can never be scored against an index produced under
    /// different token or folding rules. The proper-noun mode is excluded:
    /// indexes are always built with detection off, and profiled documents
    /// pick their own mode.
    pub fn fingerprint(&self) -> String {
        let desc = format!(
            "collgram-tokenizer:v1;case_fold={};keep_internal_apostrophes={}",
            self.case_fold, self.keep_internal_apostrophes
        );
        let digest = Sha256::digest(desc.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lookup form: lowercased surface when case folding is on.
    pub folded: String,
    pub sentence_index: usize,
    /// False for punctuation and number-only tokens.
    pub is_word: bool,
    pub is_proper_noun: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    pub sentence_count: usize,
}

impl TokenizedDocument {
    pub fn word_token_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word).count()
    }
}

/// One candidate bigram: adjacent word tokens in the same sentence, neither
/// flagged as a proper noun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigramOccurrence {
    pub w1: String,
    pub w2: String,
    /// Token index of the first member.
    pub position: usize,
}

#[derive(Debug, Error)]
pub enum TokenizeError {
    #[error("tag file for {doc_id}: {tags} tags for {tokens} tokens")]
    TagFileLengthMismatch {
        doc_id: String,
        tokens: usize,
        tags: usize,
    },
    #[error("tag file for {doc_id}: line {line} is {content:?}, expected 0 or 1")]
    TagFileInvalidLine {
        doc_id: String,
        line: usize,
        content: String,
    },
    #[error("tag file for {doc_id} required in tag-file mode")]
    TagFileMissing { doc_id: String },
    #[error("reading tag file for {doc_id}: {source}")]
    TagFileRead {
        doc_id: String,
        #[source]
        source: std::io::Error,
    },
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || c.is_numeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_sentence_terminator(s: &str) -> bool {
    matches!(s, "." | "!" | "?")
}

struct RawToken {
    surface: String,
    space_before: bool,
    paragraph_before: bool,
}

fn scan(text: &str, config: &TokenizerConfig) -> Vec<RawToken> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut raw: Vec<RawToken> = Vec::new();
    let mut run = String::new();
    // Gap state since the previous token.
    let mut space_before = false;
    let mut newlines = 0usize;

    let mut push = |surface: String, space: &mut bool, nl: &mut usize| {
        raw.push(RawToken {
            surface,
            space_before: *space,
            paragraph_before: *nl >= 2,
        });
        *space = false;
        *nl = 0;
    };

    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let continues_run = is_word_char(c)
            || (is_apostrophe(c)
                && config.keep_internal_apostrophes
                && run.chars().next_back().is_some_and(|p| p.is_alphabetic())
                && chars.peek().is_some_and(|n| n.is_alphabetic()));
        if continues_run {
            run.push(c);
        } else {
            if !run.is_empty() {
                push(std::mem::take(&mut run), &mut space_before, &mut newlines);
            }
            if c.is_whitespace() {
                space_before = true;
                if c == '\n' {
                    newlines += 1;
                }
            } else {
                push(c.to_string(), &mut space_before, &mut newlines);
                space_before = false;
            }
        }
    }
    if !run.is_empty() {
        push(run, &mut space_before, &mut newlines);
    }
    raw
}

/// Splits `text` into sentence-indexed tokens. Proper-noun flags start out
/// false; apply [`detect_proper_nouns`] afterwards.
pub fn tokenize(doc_id: &str, text: &str, config: &TokenizerConfig) -> TokenizedDocument {
    let raw = scan(text, config);

    let mut tokens = Vec::with_capacity(raw.len());
    let mut sentence = 0usize;
    for (i, rt) in raw.iter().enumerate() {
        if i > 0 {
            let after_terminator = is_sentence_terminator(&raw[i - 1].surface)
                && rt.space_before
                && rt
                    .surface
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_uppercase() || c.is_numeric());
            if rt.paragraph_before || after_terminator {
                sentence += 1;
            }
        }
        let is_word = rt.surface.chars().any(|c| c.is_alphabetic());
        let folded = if config.case_fold {
            rt.surface.to_lowercase()
        } else {
            rt.surface.clone()
        };
        tokens.push(Token {
            surface: rt.surface.clone(),
            folded,
            sentence_index: sentence,
            is_word,
            is_proper_noun: false,
        });
    }

    let sentence_count = if tokens.is_empty() { 0 } else { sentence + 1 };
    TokenizedDocument {
        doc_id: doc_id.to_string(),
        tokens,
        sentence_count,
    }
}

/// Index of the first word token in each sentence, by sentence.
fn sentence_initial_flags(doc: &TokenizedDocument) -> Vec<bool> {
    let mut flags = vec![false; doc.tokens.len()];
    let mut seen_word_in = usize::MAX;
    for (i, tok) in doc.tokens.iter().enumerate() {
        if tok.is_word && tok.sentence_index != seen_word_in {
            flags[i] = true;
            seen_word_in = tok.sentence_index;
        }
    }
    flags
}

fn uppercase_initial(surface: &str) -> bool {
    surface.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Sets `is_proper_noun` flags according to `mode`.
///
/// Heuristic: a word is flagged iff it is uppercase-initial at a
/// non-sentence-initial position, or it is sentence-initial and the same
/// word (case-insensitively) occurs uppercase-initial at a non-initial
/// position elsewhere in the document.
pub fn detect_proper_nouns(
    mut doc: TokenizedDocument,
    mode: ProperNounMode,
    tag_file: Option<&Path>,
) -> Result<TokenizedDocument, TokenizeError> {
    match mode {
        ProperNounMode::Off => {
            for tok in &mut doc.tokens {
                tok.is_proper_noun = false;
            }
        }
        ProperNounMode::Heuristic => {
            let initial = sentence_initial_flags(&doc);
            let mut mid_sentence_capitalized: HashSet<String> = HashSet::new();
            for (i, tok) in doc.tokens.iter().enumerate() {
                if tok.is_word && !initial[i] && uppercase_initial(&tok.surface) {
                    mid_sentence_capitalized.insert(tok.surface.to_lowercase());
                }
            }
            for (i, tok) in doc.tokens.iter_mut().enumerate() {
                tok.is_proper_noun = tok.is_word
                    && if initial[i] {
                        mid_sentence_capitalized.contains(&tok.surface.to_lowercase())
                    } else {
                        uppercase_initial(&tok.surface)
                    };
            }
        }
        ProperNounMode::TagFile => {
            let path = tag_file.ok_or_else(|| TokenizeError::TagFileMissing {
                doc_id: doc.doc_id.clone(),
            })?;
            let content =
                fs::read_to_string(path).map_err(|source| TokenizeError::TagFileRead {
                    doc_id: doc.doc_id.clone(),
                    source,
                })?;
            apply_tag_lines(&mut doc, &content)?;
        }
    }
    Ok(doc)
}

fn apply_tag_lines(doc: &mut TokenizedDocument, content: &str) -> Result<(), TokenizeError> {
    let tags: Vec<&str> = content.lines().collect();
    if tags.len() != doc.tokens.len() {
        return Err(TokenizeError::TagFileLengthMismatch {
            doc_id: doc.doc_id.clone(),
            tokens: doc.tokens.len(),
            tags: tags.len(),
        });
    }
    for (i, (tok, tag)) in doc.tokens.iter_mut().zip(&tags).enumerate() {
        let flagged = match tag.trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(TokenizeError::TagFileInvalidLine {
                    doc_id: doc.doc_id.clone(),
                    line: i + 1,
                    content: other.to_string(),
                })
            }
        };
        tok.is_proper_noun = flagged && tok.is_word;
    }
    Ok(())
}

/// Adjacent word-word pairs within a sentence where neither member is a
/// proper noun. Punctuation tokens and sentence boundaries break adjacency.
pub(crate) fn adjacent_word_pairs(
    doc: &TokenizedDocument,
) -> impl Iterator<Item = (usize, &Token, &Token)> {
    doc.tokens.windows(2).enumerate().filter_map(|(i, pair)| {
        let (a, b) = (&pair[0], &pair[1]);
        let eligible = a.sentence_index == b.sentence_index
            && a.is_word
            && b.is_word
            && !a.is_proper_noun
            && !b.is_proper_noun;
        eligible.then_some((i, a, b))
    })
}

/// Enumerates every candidate bigram occurrence in document order.
pub fn extract_bigrams(doc: &TokenizedDocument) -> Vec<BigramOccurrence> {
    adjacent_word_pairs(doc)
        .map(|(position, a, b)| BigramOccurrence {
            w1: a.folded.clone(),
            w2: b.folded.clone(),
            position,
        })
        .collect()
}
