//! `collgram`: build reference indexes, profile documents, compare profile
//! sets, and prepare corpora from the command line.
//!
//! Exit codes: 0 on success, 1 on internal failure, 2 on user or input
//! error. Data outputs are deterministic given identical inputs and flags;
//! timestamps appear only in run manifests.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use collgram_core::tokenizer::ProperNounMode;

/// Marks a failure caused by user input or input files rather than a bug,
/// so `main` can map it to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error(transparent)]
pub struct UserError(#[from] anyhow::Error);

/// Tags `err` as a user error. Attach context before tagging.
pub fn user(err: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(UserError(err.into()))
}

#[derive(Parser)]
#[command(
    name = "collgram",
    version,
    about = "Phraseological profiling of texts against a reference corpus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a reference frequency index from a directory of text files.
    BuildIndex(BuildIndexArgs),
    /// Profile documents against a reference index.
    Profile(ProfileArgs),
    /// Compare labeled profile sets pairwise on all three indices.
    Compare(CompareArgs),
    /// Randomly select length-bounded documents from a corpus.
    Sample(SampleArgs),
    /// Split corpus files into per-document text files.
    Ingest(IngestArgs),
}

#[derive(Args)]
pub struct BuildIndexArgs {
    /// Directory of reference corpus text files, one document per file.
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    /// Directory the index files are written into.
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    /// Drop bigrams occurring fewer than this many times.
    #[arg(long, value_name = "K", default_value_t = 1)]
    pub min_count: u64,
    /// Count surface forms without case folding.
    #[arg(long)]
    pub no_lowercase: bool,
}

#[derive(Args)]
pub struct ProfileArgs {
    /// Index directory produced by build-index.
    #[arg(long, value_name = "DIR")]
    pub index: PathBuf,
    /// Directory of documents to profile, one document per file.
    #[arg(long, value_name = "DIR")]
    pub docs: PathBuf,
    /// Profile CSV to write, one row per document.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Proper-noun detection: heuristic, tag-file, or off.
    #[arg(long, value_name = "MODE", default_value = "heuristic", value_parser = parse_pn_mode)]
    pub pn_mode: ProperNounMode,
    /// Count each distinct bigram once instead of once per occurrence.
    #[arg(long)]
    pub type_level: bool,
    /// Tokenize without case folding; must match the index.
    #[arg(long)]
    pub no_lowercase: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Comma-separated profile CSV paths, one per set.
    #[arg(long, value_name = "FILES", value_delimiter = ',', required = true)]
    pub profiles: Vec<PathBuf>,
    /// Comma-separated set labels aligned with --profiles.
    #[arg(long, value_name = "NAMES", value_delimiter = ',', required = true)]
    pub labels: Vec<String>,
    /// Family-wise significance level before correction.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bonferroni correction count; defaults to indices times set pairs.
    #[arg(long, value_name = "M")]
    pub m: Option<usize>,
    /// Comparison report CSV to write, one row per matrix cell.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Per-set mean and standard error CSV for plotting.
    #[arg(long, value_name = "FILE")]
    pub plot_data: PathBuf,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Directory of corpus source files.
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    /// Minimum document length in characters.
    #[arg(long, value_name = "N", default_value_t = 3_500)]
    pub min_chars: usize,
    /// Maximum document length in characters.
    #[arg(long, value_name = "N", default_value_t = 4_500)]
    pub max_chars: usize,
    /// Number of documents to select.
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub n: usize,
    /// Seed for the deterministic selection.
    #[arg(long, value_name = "S", default_value_t = 0)]
    pub seed: u64,
    /// Directory the sampled documents are written into.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct IngestArgs {
    /// Directory of corpus source files.
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    /// Directory the extracted documents are written into.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

fn parse_pn_mode(s: &str) -> Result<ProperNounMode, String> {
    ProperNounMode::parse(s)
        .ok_or_else(|| format!("expected heuristic, tag-file, or off, got {s:?}"))
}

fn configure_threads() -> anyhow::Result<()> {
    let raw = match std::env::var("COLLGRAM_THREADS") {
        Ok(raw) => raw,
        Err(_) => return Ok(()),
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        user(anyhow::anyhow!(
            "COLLGRAM_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    if threads == 0 {
        return Err(user(anyhow::anyhow!(
            "COLLGRAM_THREADS must be a positive integer, got 0"
        )));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run() -> anyhow::Result<()> {
    configure_threads()?;
    match Cli::parse().command {
        Command::BuildIndex(args) => commands::build_index(&args),
        Command::Profile(args) => commands::profile(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Sample(args) => commands::sample(&args),
        Command::Ingest(args) => commands::ingest(&args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.chain().any(|cause| cause.is::<UserError>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
