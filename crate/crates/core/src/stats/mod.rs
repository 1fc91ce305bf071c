//! Paired comparison of profile sets: per-pair Student's t-tests over
//! aligned documents, Bonferroni-corrected significance, and two effect
//! sizes (Cohen's d for paired samples and a sign-agreement proportion).

pub mod report;
mod tdist;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::assoc::{DocumentProfile, ProfileIndex};

pub use tdist::t_cdf;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("insufficient pairs: {got}, need at least 2")]
    InsufficientPairs { got: usize },
    #[error("degenerate paired sample: every difference equals {diff}")]
    DegenerateSample { diff: f64 },
    #[error("mismatched sample lengths: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least two profile sets, got {got}")]
    TooFewSets { got: usize },
    #[error("duplicate doc_id {doc_id:?} in set {label:?}")]
    DuplicateDocId { label: String, doc_id: String },
    #[error("doc_id misalignment: {details}")]
    Misaligned { details: String },
    #[error("report CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("alpha must be in (0, 1), got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("number of tests m must be at least 1")]
    InvalidM,
    #[error("comparing {col} against {row} on {index}")]
    CellComparison {
        row: String,
        col: String,
        index: String,
        #[source]
        source: Box<StatsError>,
    },
}

/// One paired comparison between two aligned sets of values.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedComparison {
    pub n: usize,
    pub mean_diff: f64,
    pub t_stat: f64,
    pub df: usize,
    pub p_two_tailed: f64,
    pub cohens_d: f64,
    /// Sign-agreement proportion, folded into [0.5, 1.0].
    pub prop_effect: f64,
    /// Aligned pairs skipped because the index value was absent on either
    /// side.
    pub dropped_pairs: usize,
}

/// One cell of a comparison matrix; the difference direction is column
/// minus row.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub row: String,
    pub col: String,
    pub comparison: PairedComparison,
    pub significant: bool,
}

/// All pairwise comparisons between the labeled sets on one profile index.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    pub index: ProfileIndex,
    pub labels: Vec<String>,
    pub alpha: f64,
    pub bonferroni_m: usize,
    pub threshold: f64,
    pub cells: Vec<MatrixCell>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn differences(x: &[f64], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a - b).collect())
}

fn all_equal(diffs: &[f64]) -> bool {
    diffs.windows(2).all(|w| w[0] == w[1])
}

fn sample_sd(diffs: &[f64], mean: f64) -> f64 {
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() as f64 - 1.0);
    var.sqrt()
}

/// Two-sided paired t-test on element-wise differences `x - y`.
/// Returns `(t, df, p)`. An all-zero difference vector is reported as
/// `t = 0, p = 1`; a constant nonzero one has no defined statistic.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<(f64, usize, f64), StatsError> {
    let diffs = differences(x, y)?;
    let n = diffs.len();
    if n < 2 {
        return Err(StatsError::InsufficientPairs { got: n });
    }
    let df = n - 1;
    if all_equal(&diffs) {
        if diffs[0] == 0.0 {
            return Ok((0.0, df, 1.0));
        }
        return Err(StatsError::DegenerateSample { diff: diffs[0] });
    }
    let m = mean(&diffs);
    let sd = sample_sd(&diffs, m);
    let t = m / (sd / (n as f64).sqrt());
    let p = (2.0 * (1.0 - t_cdf(t.abs(), df as u64))).clamp(0.0, 1.0);
    Ok((t, df, p))
}

/// Cohen's d for paired samples: mean difference over the standard
/// deviation of the differences. Zero when the samples are identical.
pub fn cohens_d(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let diffs = differences(x, y)?;
    let n = diffs.len();
    if n < 2 {
        return Err(StatsError::InsufficientPairs { got: n });
    }
    if all_equal(&diffs) {
        if diffs[0] == 0.0 {
            return Ok(0.0);
        }
        return Err(StatsError::DegenerateSample { diff: diffs[0] });
    }
    let m = mean(&diffs);
    Ok(m / sample_sd(&diffs, m))
}

/// Share of pairs whose difference agrees in sign with the mean difference,
/// counting zero differences as half. The raw share is folded to
/// `max(q, 1 - q)` so the result always reads as directional consistency
/// in [0.5, 1.0]; a zero mean difference yields exactly 0.5.
pub fn sign_proportion(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired samples must align");
    assert!(!x.is_empty(), "sign proportion needs at least one pair");
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let m = mean(&diffs);
    if m == 0.0 {
        return 0.5;
    }
    let agree = diffs
        .iter()
        .filter(|&&d| if m > 0.0 { d > 0.0 } else { d < 0.0 })
        .count() as f64;
    let ties = diffs.iter().filter(|&&d| d == 0.0).count() as f64;
    let q = (agree + 0.5 * ties) / diffs.len() as f64;
    q.max(1.0 - q)
}

/// Per-test significance threshold under Bonferroni correction: exactly
/// `alpha / m`, never a rounded form of it.
pub fn bonferroni_threshold(alpha: f64, m: usize) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
    assert!(m >= 1, "m must be at least 1");
    alpha / m as f64
}

/// A p-value exactly at the threshold is not significant.
pub fn is_significant(p: f64, threshold: f64) -> bool {
    p < threshold
}

/// Runs all pairwise comparisons between the labeled profile sets on each
/// of the three indexes.
///
/// Sets must cover identical doc_id collections; values are paired by
/// doc_id in sorted order. Cell differences are column minus row, where
/// columns are later sets. `m` defaults to three indexes times the number
/// of set pairs.
pub fn compare_sets(
    sets: &[(String, Vec<DocumentProfile>)],
    alpha: f64,
    m: Option<usize>,
) -> Result<Vec<ComparisonMatrix>, StatsError> {
    let k = sets.len();
    if k < 2 {
        return Err(StatsError::TooFewSets { got: k });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha { alpha });
    }
    let m = m.unwrap_or(ProfileIndex::ALL.len() * k * (k - 1) / 2);
    if m == 0 {
        return Err(StatsError::InvalidM);
    }
    let threshold = bonferroni_threshold(alpha, m);

    let mut by_id: Vec<HashMap<&str, &DocumentProfile>> = Vec::with_capacity(k);
    for (label, profiles) in sets {
        let mut map = HashMap::with_capacity(profiles.len());
        for p in profiles {
            if map.insert(p.doc_id.as_str(), p).is_some() {
                return Err(StatsError::DuplicateDocId {
                    label: label.clone(),
                    doc_id: p.doc_id.clone(),
                });
            }
        }
        by_id.push(map);
    }

    let union: BTreeSet<&str> = by_id.iter().flat_map(|m| m.keys().copied()).collect();
    let mut complaints = Vec::new();
    for ((label, _), map) in sets.iter().zip(&by_id) {
        let missing: Vec<&str> = union
            .iter()
            .copied()
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
        return Err(StatsError::Misaligned {
            details: complaints.join("; "),
        });
    }
    let ids: Vec<&str> = union.into_iter().collect();
    let labels: Vec<String> = sets.iter().map(|(l, _)| l.clone()).collect();

    let mut matrices = Vec::with_capacity(ProfileIndex::ALL.len());
    for index in ProfileIndex::ALL {
        let mut cells = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                let wrap = |source: StatsError| StatsError::CellComparison {
                    row: labels[i].clone(),
                    col: labels[j].clone(),
                    index: index.name().to_string(),
                    source: Box::new(source),
                };
                let mut col_values = Vec::with_capacity(ids.len());
                let mut row_values = Vec::with_capacity(ids.len());
                let mut dropped = 0usize;
                for id in &ids {
                    let col = by_id[j][id].index_value(index);
                    let row = by_id[i][id].index_value(index);
                    match (col, row) {
                        (Some(c), Some(r)) => {
                            col_values.push(c);
                            row_values.push(r);
                        }
                        _ => dropped += 1,
                    }
                }
                if col_values.len() < 2 {
                    return Err(wrap(StatsError::InsufficientPairs {
                        got: col_values.len(),
                    }));
                }
                let diffs = differences(&col_values, &row_values).expect("aligned by id");
                let (t_stat, df, p) = paired_t_test(&col_values, &row_values).map_err(wrap)?;
                let d = cohens_d(&col_values, &row_values).map_err(wrap)?;
                let prop = sign_proportion(&col_values, &row_values);
                cells.push(MatrixCell {
                    row: labels[i].clone(),
                    col: labels[j].clone(),
                    comparison: PairedComparison {
                        n: col_values.len(),
                        mean_diff: mean(&diffs),
                        t_stat,
                        df,
                        p_two_tailed: p,
                        cohens_d: d,
                        prop_effect: prop,
                        dropped_pairs: dropped,
                    },
                    significant: is_significant(p, threshold),
                });
            }
        }
        matrices.push(ComparisonMatrix {
            index,
            labels: labels.clone(),
            alpha,
            bonferroni_m: m,
            threshold,
            cells,
        });
    }
    Ok(matrices)
}
