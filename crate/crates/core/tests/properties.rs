//! Randomized invariant checks across the library.

use std::collections::HashSet;

use proptest::prelude::*;

use collgram_core::assoc::{self, CountingMode, DocumentProfile};
use collgram_core::corpus::{self, RawDocument, SamplingSpec};
use collgram_core::refindex;
use collgram_core::stats;
use collgram_core::tokenizer::{self, ProperNounMode, TokenizerConfig};

fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        5 => "[a-z]{1,8}",
        1 => "[A-Z][a-z]{0,7}",
        1 => "[0-9]{1,4}",
        1 => Just("it's".to_string()),
        1 => Just(".".to_string()),
        1 => Just(",".to_string()),
        1 => Just("!".to_string()),
        1 => Just("\n\n".to_string()),
    ]
}

fn wordy_text() -> impl Strategy<Value = String> {
    prop::collection::vec(token(), 0..60).prop_map(|t| t.join(" "))
}

fn pure_word_text() -> impl Strategy<Value = String> {
    prop::collection::vec("[a-z]{1,8}", 1..60).prop_map(|t| t.join(" "))
}

/// Two-letter alphabet so profiled documents actually hit the index.
fn tiny_vocab_text() -> impl Strategy<Value = String> {
    prop::collection::vec("[ab]{1,2}", 1..40).prop_map(|t| t.join(" "))
}

mod tokenizer_props {
    use super::*;

    proptest! {
        #[test]
        fn tokenize_is_deterministic(text in any::<String>()) {
            let config = TokenizerConfig::default();
            let a = tokenizer::tokenize("d", &text, &config);
            let b = tokenizer::tokenize("d", &text, &config);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn case_fold_changes_only_folded_forms(text in wordy_text()) {
            let folded = tokenizer::tokenize("d", &text, &TokenizerConfig::default());
            let config = TokenizerConfig { case_fold: false, ..TokenizerConfig::default() };
            let raw = tokenizer::tokenize("d", &text, &config);
            prop_assert_eq!(folded.tokens.len(), raw.tokens.len());
            prop_assert_eq!(folded.sentence_count, raw.sentence_count);
            for (a, b) in folded.tokens.iter().zip(&raw.tokens) {
                prop_assert_eq!(&a.surface, &b.surface);
                prop_assert_eq!(a.sentence_index, b.sentence_index);
                prop_assert_eq!(a.is_word, b.is_word);
            }
        }

        #[test]
        fn sentence_indices_are_contiguous(text in any::<String>()) {
            let doc = tokenizer::tokenize("d", &text, &TokenizerConfig::default());
            let mut prev = 0usize;
            for (i, tok) in doc.tokens.iter().enumerate() {
                if i == 0 {
                    prop_assert_eq!(tok.sentence_index, 0);
                }
                prop_assert!(tok.sentence_index == prev || tok.sentence_index == prev + 1);
                prev = tok.sentence_index;
            }
            let expected = if doc.tokens.is_empty() { 0 } else { prev + 1 };
            prop_assert_eq!(doc.sentence_count, expected);
        }

        #[test]
        fn proper_noun_flags_imply_words(text in wordy_text()) {
            let doc = tokenizer::tokenize("d", &text, &TokenizerConfig::default());
            let doc = tokenizer::detect_proper_nouns(doc, ProperNounMode::Heuristic, None).unwrap();
            for tok in &doc.tokens {
                if tok.is_proper_noun {
                    prop_assert!(tok.is_word);
                }
            }
        }

        #[test]
        fn bigram_count_is_bounded(text in wordy_text()) {
            let doc = tokenizer::tokenize("d", &text, &TokenizerConfig::default());
            let doc = tokenizer::detect_proper_nouns(doc, ProperNounMode::Heuristic, None).unwrap();
            let bigrams = tokenizer::extract_bigrams(&doc);
            let words = doc.tokens.iter().filter(|t| t.is_word).count();
            let sentences_with_words = doc
                .tokens
                .iter()
                .filter(|t| t.is_word)
                .map(|t| t.sentence_index)
                .collect::<HashSet<_>>()
                .len();
            prop_assert!(bigrams.len() + sentences_with_words <= words);
            for pair in bigrams.windows(2) {
                prop_assert!(pair[0].position < pair[1].position);
            }
        }

        #[test]
        fn bigram_count_is_exact_for_plain_words(text in pure_word_text()) {
            // One sentence of word tokens only: every adjacency counts.
            let doc = tokenizer::tokenize("d", &text, &TokenizerConfig::default());
            let bigrams = tokenizer::extract_bigrams(&doc);
            prop_assert_eq!(bigrams.len(), doc.tokens.len() - 1);
        }
    }
}

mod refindex_props {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn counts_are_internally_consistent(
            docs in prop::collection::vec(wordy_text(), 1..8),
            min in 1u64..4,
        ) {
            let config = TokenizerConfig::default();
            let Ok(index) = refindex::build_index(docs, &config, min) else {
                // Only the empty corpus fails here.
                return Ok(());
            };
            let total: u64 = index.unigrams().map(|(_, c)| c).sum();
            prop_assert_eq!(total, index.total_tokens());
            for (w1, w2, count) in index.bigrams() {
                prop_assert!(count >= min);
                prop_assert!(index.unigram_count(w1).unwrap() >= count);
                prop_assert!(index.unigram_count(w2).unwrap() >= count);
            }
        }

        #[test]
        fn document_order_never_matters(
            docs in prop::collection::vec(pure_word_text(), 1..8),
            rotation in 0usize..8,
        ) {
            let config = TokenizerConfig::default();
            let mut permuted = docs.clone();
            permuted.rotate_left(rotation % docs.len().max(1));
            permuted.reverse();
            let a = refindex::build_index(docs, &config, 1).unwrap();
            let b = refindex::build_index(permuted, &config, 1).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn save_load_round_trips(docs in prop::collection::vec(wordy_text(), 1..6)) {
            let config = TokenizerConfig::default();
            let Ok(index) = refindex::build_index(docs, &config, 1) else {
                return Ok(());
            };
            let dir = tempfile::tempdir().unwrap();
            refindex::save_index(&index, dir.path()).unwrap();
            let loaded = refindex::load_index(dir.path()).unwrap();
            prop_assert_eq!(index, loaded);
        }
    }
}

mod assoc_props {
    use super::*;

    fn frequencies() -> impl Strategy<Value = (u64, u64, u64)> {
        (10u64..1_000_000).prop_flat_map(|n| (1..=n.min(10_000), 1..=n.min(10_000), Just(n)))
    }

    proptest! {
        #[test]
        fn scores_increase_with_observed(
            (f1, f2, n) in frequencies(),
            seed in any::<u64>(),
        ) {
            let max_o = f1.min(f2);
            prop_assume!(max_o >= 2);
            let o1 = seed % max_o + 1;
            let o2 = (seed / 7) % max_o + 1;
            prop_assume!(o1 != o2);
            let (lo, hi) = if o1 < o2 { (o1, o2) } else { (o2, o1) };
            let a = assoc::score_bigram(lo, f1, f2, n).unwrap();
            let b = assoc::score_bigram(hi, f1, f2, n).unwrap();
            prop_assert!(b.mi > a.mi);
            prop_assert!(b.t > a.t);
        }

        #[test]
        fn independence_means_zero(u in 1u64..1000, v in 1u64..1000, seed in any::<u64>()) {
            // O = m, f1 = m*u, f2 = v, N = u*v satisfies O*N == f1*f2 for
            // any m <= v, so both measures must vanish exactly.
            let m = seed % v + 1;
            let scores = assoc::score_bigram(m, m * u, v, u * v).unwrap();
            prop_assert_eq!(scores.mi, 0.0);
            prop_assert_eq!(scores.t, 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn profile_counts_are_ordered(
            corpus_docs in prop::collection::vec(tiny_vocab_text(), 1..6),
            doc_text in tiny_vocab_text(),
            types in any::<bool>(),
        ) {
            let config = TokenizerConfig::default();
            let index = refindex::build_index(corpus_docs, &config, 1).unwrap();
            let doc = tokenizer::tokenize("p", &doc_text, &config);
            let mode = if types { CountingMode::Types } else { CountingMode::Occurrences };
            let p = assoc::profile_document(&doc, &config, &index, mode).unwrap();

            prop_assert!(p.high_mi <= p.bigrams_scored);
            prop_assert!(p.high_t <= p.bigrams_scored);
            prop_assert!(p.bigrams_scored <= p.bigrams_total);
            match p.pct_high_mi {
                Some(v) => {
                    prop_assert!(p.bigrams_scored > 0);
                    prop_assert!((0.0..=100.0).contains(&v));
                }
                None => prop_assert_eq!(p.bigrams_scored, 0),
            }
            match (p.pct_high_mi, p.pct_high_t, p.ratio) {
                (Some(mi), Some(_), Some(r)) => {
                    prop_assert!(mi > 0.0);
                    prop_assert!(r.is_finite() && r >= 0.0);
                }
                (Some(mi), Some(_), None) => prop_assert_eq!(mi, 0.0),
                (None, None, None) => {}
                other => prop_assert!(false, "inconsistent presence: {other:?}"),
            }
        }

        #[test]
        fn type_counting_never_exceeds_occurrence_counting(
            corpus_docs in prop::collection::vec(tiny_vocab_text(), 1..6),
            doc_text in tiny_vocab_text(),
        ) {
            let config = TokenizerConfig::default();
            let index = refindex::build_index(corpus_docs, &config, 1).unwrap();
            let doc = tokenizer::tokenize("p", &doc_text, &config);
            let occ = assoc::profile_document(&doc, &config, &index, CountingMode::Occurrences).unwrap();
            let typ = assoc::profile_document(&doc, &config, &index, CountingMode::Types).unwrap();
            prop_assert!(typ.bigrams_total <= occ.bigrams_total);
            prop_assert!(typ.bigrams_scored <= occ.bigrams_scored);
        }
    }

    fn six_decimal() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![
            1 => Just(None),
            4 => (0u32..6_400_000).prop_map(|k| Some(k as f64 / 64.0)),
        ]
    }

    proptest! {
        #[test]
        fn profile_csv_round_trips(
            rows in prop::collection::vec(
                ("[a-z][a-z0-9-]{0,12}", 0u64..1000, 0u64..1000, 0u64..1000, 0u64..1000,
                 six_decimal(), six_decimal(), six_decimal()),
                0..12,
            ),
        ) {
            let profiles: Vec<DocumentProfile> = rows
                .into_iter()
                .enumerate()
                .map(|(i, (id, total, scored, mi, t, pmi, pt, ratio))| DocumentProfile {
                    doc_id: format!("{id}-{i}"),
                    bigrams_total: total,
                    bigrams_scored: scored,
                    high_mi: mi,
                    high_t: t,
                    pct_high_mi: pmi,
                    pct_high_t: pt,
                    ratio,
                })
                .collect();
            let mut bytes = Vec::new();
            assoc::write_profiles_csv(&profiles, &mut bytes).unwrap();
            let back = assoc::read_profiles_csv(bytes.as_slice()).unwrap();
            prop_assert_eq!(back, profiles);
        }
    }
}

mod stats_props {
    use super::*;

    proptest! {
        #[test]
        fn t_cdf_is_a_cdf(t in -50.0f64..50.0, shift in 0.0f64..10.0, df in 1u64..300) {
            let lo = stats::t_cdf(t, df);
            let hi = stats::t_cdf(t + shift, df);
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!((0.0..=1.0).contains(&hi));
            prop_assert!(lo <= hi);
        }

        #[test]
        fn t_cdf_is_symmetric(t in -40.0f64..40.0, df in 1u64..300) {
            let sum = stats::t_cdf(t, df) + stats::t_cdf(-t, df);
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn bonferroni_never_exceeds_alpha(alpha in 0.0011f64..0.5, m in 1usize..200) {
            let thr = stats::bonferroni_threshold(alpha, m);
            prop_assert_eq!(thr, alpha / m as f64);
            prop_assert!(thr <= alpha);
        }
    }

    fn paired_samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..24).prop_flat_map(|n| {
            (
                prop::collection::vec(-1e3f64..1e3, n),
                prop::collection::vec(-1e3f64..1e3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn paired_test_is_antisymmetric((x, y) in paired_samples()) {
            let diffs: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            prop_assume!(diffs.windows(2).any(|w| w[0] != w[1]));

            let (t_xy, df_xy, p_xy) = stats::paired_t_test(&x, &y).unwrap();
            let (t_yx, df_yx, p_yx) = stats::paired_t_test(&y, &x).unwrap();
            prop_assert_eq!(df_xy, df_yx);
            prop_assert!((t_xy + t_yx).abs() < 1e-9 * t_xy.abs().max(1.0));
            prop_assert!((p_xy - p_yx).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p_xy));

            let d_xy = stats::cohens_d(&x, &y).unwrap();
            let d_yx = stats::cohens_d(&y, &x).unwrap();
            prop_assert!((d_xy + d_yx).abs() < 1e-9 * d_xy.abs().max(1.0));

            let q_xy = stats::sign_proportion(&x, &y);
            let q_yx = stats::sign_proportion(&y, &x);
            prop_assert!((0.5..=1.0).contains(&q_xy));
            prop_assert_eq!(q_xy, q_yx);
        }
    }
}

mod corpus_props {
    use super::*;

    fn sampling_case() -> impl Strategy<Value = (Vec<RawDocument>, usize)> {
        prop::collection::vec(3_000usize..5_000, 5..50).prop_flat_map(|counts| {
            let eligible = counts
                .iter()
                .filter(|c| (3_500..=4_500).contains(*c))
                .count();
            let docs: Vec<RawDocument> = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| RawDocument::new(format!("d-{i:03}"), "x".repeat(c)))
                .collect();
            (Just(docs), 0..=eligible)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sampling_contract((docs, size) in sampling_case(), seed in any::<u64>()) {
            let spec = SamplingSpec {
                min_chars: 3_500,
                max_chars: 4_500,
                sample_size: size,
                seed,
            };
            let result = corpus::sample_documents(&docs, &spec);
            if size == 0 {
                prop_assert!(result.is_err());
                return Ok(());
            }
            let chosen = result.unwrap();
            prop_assert_eq!(chosen.len(), size);
            for pair in chosen.windows(2) {
                prop_assert!(pair[0].doc_id < pair[1].doc_id);
            }
            for doc in &chosen {
                prop_assert!((3_500..=4_500).contains(&doc.char_count));
            }

            // Same seed, shuffled input: identical selection.
            let mut shuffled = docs.clone();
            shuffled.reverse();
            let again = corpus::sample_documents(&shuffled, &spec).unwrap();
            prop_assert_eq!(chosen, again);
        }
    }

    fn file_text() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop_oneof![
                4 => "[a-z ]{0,30}",
                1 => Just("<SPEAKER ID=1 NAME=\"X\">".to_string()),
                1 => Just("<CHAPTER ID=2>".to_string()),
                1 => Just("<P>".to_string()),
                1 => Just(String::new()),
            ],
            0..30,
        )
        .prop_map(|lines| lines.join("\n"))
    }

    proptest! {
        #[test]
        fn parsed_documents_are_clean(text in file_text()) {
            let docs = corpus::parse_europarl(&text, "f");
            let mut ids = HashSet::new();
            for (i, doc) in docs.iter().enumerate() {
                prop_assert!(ids.insert(doc.doc_id.clone()));
                prop_assert_eq!(&doc.doc_id, &format!("f-{:03}", i + 1));
                prop_assert_eq!(doc.text.trim(), doc.text.as_str());
                prop_assert!(!doc.text.is_empty());
                prop_assert_eq!(doc.char_count, doc.text.chars().count());
                for line in doc.text.lines() {
                    prop_assert!(!line.starts_with("<SPEAKER"));
                    prop_assert!(!line.starts_with("<CHAPTER"));
                    prop_assert!(!line.starts_with("<P"));
                }
            }
        }
    }
}
