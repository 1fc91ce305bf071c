//! Comparison report emitters: a machine-readable CSV, a plot-data CSV
//! with per-translator means and standard errors, and a compact text table
//! (upper triangle per index, difference read as column minus row).

use std::fmt::Write as _;
use std::io;

use crate::assoc::{DocumentProfile, ProfileIndex};
use crate::stats::{ComparisonMatrix, MatrixCell, StatsError};

pub const REPORT_CSV_HEADER: [&str; 12] = [
    "index",
    "row_translator",
    "col_translator",
    "n",
    "dropped",
    "mean_diff",
    "t",
    "df",
    "p",
    "d",
    "prop",
    "significant",
];

pub const PLOT_CSV_HEADER: [&str; 4] = ["translator", "index", "mean", "stderr"];

fn fmt6(v: f64) -> String {
    crate::assoc::fmt6(v)
}

/// p-values keep six decimals but switch to scientific notation below
/// 1e-4 so small values never round to a flat zero.
fn fmt_p(p: f64) -> String {
    if p != 0.0 && p < 1e-4 {
        format!("{p:.6e}")
    } else {
        fmt6(p)
    }
}

/// Writes every cell of every matrix as one CSV row.
pub fn write_comparison_csv<W: io::Write>(
    matrices: &[ComparisonMatrix],
    writer: W,
) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_CSV_HEADER)?;
    for matrix in matrices {
        for cell in &matrix.cells {
            let c = &cell.comparison;
            w.write_record([
                matrix.index.name(),
                &cell.row,
                &cell.col,
                &c.n.to_string(),
                &c.dropped_pairs.to_string(),
                &fmt6(c.mean_diff),
                &fmt6(c.t_stat),
                &c.df.to_string(),
                &fmt_p(c.p_two_tailed),
                &fmt6(c.cohens_d),
                &fmt6(c.prop_effect),
                if cell.significant { "true" } else { "false" },
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-translator mean and standard error of each index over present
/// values; one row per (translator, index).
pub fn write_plot_data_csv<W: io::Write>(
    sets: &[(String, Vec<DocumentProfile>)],
    writer: W,
) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PLOT_CSV_HEADER)?;
    for (label, profiles) in sets {
        for index in ProfileIndex::ALL {
            let values: Vec<f64> = profiles
                .iter()
                .filter_map(|p| p.index_value(index))
                .collect();
            let (mean, stderr) = match values.len() {
                0 => (String::new(), String::new()),
                1 => (fmt6(values[0]), String::new()),
                n => {
                    let m = values.iter().sum::<f64>() / n as f64;
                    let var =
                        values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
                    (fmt6(m), fmt6(var.sqrt() / (n as f64).sqrt()))
                }
            };
            w.write_record([label.as_str(), index.name(), &mean, &stderr])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn find_cell<'a>(matrix: &'a ComparisonMatrix, row: &str, col: &str) -> Option<&'a MatrixCell> {
    matrix.cells.iter().find(|c| c.row == row && c.col == col)
}

/// Renders the upper triangle of each matrix. Per row label, the lines show
/// the mean difference (starred when significant), Cohen's d, the
/// sign-agreement proportion, and the pair count.
pub fn render_comparison_text(matrices: &[ComparisonMatrix]) -> String {
    let mut out = String::new();
    for matrix in matrices {
        let labels = &matrix.labels;
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(9) + 2;
        let _ = writeln!(
            out,
            "{} (alpha={}, m={}, threshold={:.6})",
            matrix.index, matrix.alpha, matrix.bonferroni_m, matrix.threshold
        );
        let _ = write!(out, "{:<6}{:<5}", "", "");
        for col in &labels[1..] {
            let _ = write!(out, "{col:>width$}");
        }
        out.push('\n');
        for row in &labels[..labels.len() - 1] {
            for (line, value) in [("diff", 0usize), ("d", 1), ("prop", 2), ("n", 3)] {
                let head = if value == 0 { row.as_str() } else { "" };
                let _ = write!(out, "{head:<6}{line:<5}");
                for col in &labels[1..] {
                    let text = match find_cell(matrix, row, col) {
                        None => String::new(),
                        Some(cell) => {
                            let c = &cell.comparison;
                            match value {
                                0 => format!(
                                    "{:.2}{}",
                                    c.mean_diff,
                                    if cell.significant { "*" } else { "" }
                                ),
                                1 => format!("{:.2}", c.cohens_d),
                                2 => format!("{:.2}", c.prop_effect),
                                _ => format!("{}", c.n),
                            }
                        }
                    };
                    let _ = write!(out, "{text:>width$}");
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "* p below the Bonferroni-corrected threshold; diff is column minus row"
    );
    out
}
