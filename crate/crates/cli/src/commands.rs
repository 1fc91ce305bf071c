//! One function per subcommand, plus the directory-walking helpers they
//! share. Every function returns `Ok(())` on success; failures caused by
//! inputs are tagged with [`crate::user`] so they exit with code 2.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};

use collgram_core::assoc::{self, CountingMode};
use collgram_core::corpus::{self, RawDocument, SamplingSpec};
use collgram_core::refindex;
use collgram_core::stats::{self, report};
use collgram_core::tokenizer::{self, ProperNounMode, TokenizerConfig};

use crate::manifest::{sha256_hex, RunManifest};
use crate::user;
use crate::{BuildIndexArgs, CompareArgs, IngestArgs, ProfileArgs, SampleArgs};

const INDEX_FILES: [&str; 3] = ["meta.json", "unigrams.tsv", "bigrams.tsv"];

/// Regular files under `dir` in name order. Hidden files and `.pn` tag
/// sidecars are not documents and are skipped.
fn input_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))
        .map_err(user)?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry
            .with_context(|| format!("reading directory {}", dir.display()))
            .map_err(user)?;
        let path = entry.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(str::to_string)
            .ok_or_else(|| user(anyhow!("non-UTF-8 file name in {}", dir.display())))?;
        if name.starts_with('.') || name.ends_with(".pn") || !path.is_file() {
            continue;
        }
        files.push(path);
    }
    files.sort();
    Ok(files)
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(user)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Digest map key: the path relative to the directory it was found under.
fn rel_name(base: &Path, path: &Path) -> String {
    path.strip_prefix(base)
        .unwrap_or(path)
        .display()
        .to_string()
}

fn create_output_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(user)
}

fn create_output_file(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(user)?;
    Ok(BufWriter::new(file))
}

fn pn_mode_name(mode: ProperNounMode) -> &'static str {
    match mode {
        ProperNounMode::Heuristic => "heuristic",
        ProperNounMode::TagFile => "tag-file",
        ProperNounMode::Off => "off",
    }
}

pub fn build_index(args: &BuildIndexArgs) -> anyhow::Result<()> {
    let config = TokenizerConfig {
        case_fold: !args.no_lowercase,
        ..TokenizerConfig::default()
    };

    let mut digests = BTreeMap::new();
    let mut docs = Vec::new();
    for path in input_files(&args.input)? {
        let text = read_text(&path)?;
        digests.insert(rel_name(&args.input, &path), sha256_hex(text.as_bytes()));
        docs.push(text);
    }

    let index = refindex::build_index(docs, &config, args.min_count).map_err(user)?;
    create_output_dir(&args.output)?;
    refindex::save_index(&index, &args.output).map_err(user)?;

    let flags = BTreeMap::from([
        ("input".to_string(), args.input.display().to_string()),
        ("output".to_string(), args.output.display().to_string()),
        ("min-count".to_string(), args.min_count.to_string()),
        ("no-lowercase".to_string(), args.no_lowercase.to_string()),
    ]);
    RunManifest::new("build-index", flags, digests).write_into_dir(&args.output)?;

    println!(
        "indexed {} tokens ({} unigram types, {} bigram types) into {}",
        index.total_tokens(),
        index.unigram_type_count(),
        index.bigram_type_count(),
        args.output.display()
    );
    Ok(())
}

pub fn profile(args: &ProfileArgs) -> anyhow::Result<()> {
    let index = refindex::load_index(&args.index).map_err(user)?;
    let config = TokenizerConfig {
        case_fold: !args.no_lowercase,
        proper_noun_mode: args.pn_mode,
        ..TokenizerConfig::default()
    };
    let counting = if args.type_level {
        CountingMode::Types
    } else {
        CountingMode::Occurrences
    };

    let mut digests = BTreeMap::new();
    for name in INDEX_FILES {
        let path = args.index.join(name);
        let bytes = fs::read(&path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(user)?;
        digests.insert(format!("index/{name}"), sha256_hex(&bytes));
    }

    let mut seen = BTreeSet::new();
    let mut profiles = Vec::new();
    for path in input_files(&args.docs)? {
        let doc_id = file_stem(&path);
        if !seen.insert(doc_id.clone()) {
            return Err(user(anyhow!(
                "duplicate doc_id {doc_id:?} in {}",
                args.docs.display()
            )));
        }
        let text = read_text(&path)?;
        digests.insert(
            format!("docs/{}", rel_name(&args.docs, &path)),
            sha256_hex(text.as_bytes()),
        );

        let doc = tokenizer::tokenize(&doc_id, &text, &config);
        let tag_path = args.docs.join(format!("{doc_id}.pn"));
        if args.pn_mode == ProperNounMode::TagFile {
            let bytes = fs::read(&tag_path)
                .with_context(|| format!("reading tag file {}", tag_path.display()))
                .map_err(user)?;
            digests.insert(
                format!("docs/{}", rel_name(&args.docs, &tag_path)),
                sha256_hex(&bytes),
            );
        }
        let tag_file = (args.pn_mode == ProperNounMode::TagFile).then_some(tag_path.as_path());
        let doc = tokenizer::detect_proper_nouns(doc, args.pn_mode, tag_file).map_err(user)?;
        profiles.push(assoc::profile_document(&doc, &config, &index, counting).map_err(user)?);
    }
    profiles.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

    assoc::write_profiles_csv(&profiles, create_output_file(&args.out)?).map_err(user)?;

    let flags = BTreeMap::from([
        ("index".to_string(), args.index.display().to_string()),
        ("docs".to_string(), args.docs.display().to_string()),
        ("out".to_string(), args.out.display().to_string()),
        (
            "pn-mode".to_string(),
            pn_mode_name(args.pn_mode).to_string(),
        ),
        ("type-level".to_string(), args.type_level.to_string()),
        ("no-lowercase".to_string(), args.no_lowercase.to_string()),
    ]);
    RunManifest::new("profile", flags, digests).write_beside(&args.out)?;

    println!(
        "profiled {} documents into {}",
        profiles.len(),
        args.out.display()
    );
    Ok(())
}

pub fn compare(args: &CompareArgs) -> anyhow::Result<()> {
    if args.profiles.len() != args.labels.len() {
        return Err(user(anyhow!(
            "got {} profile files but {} labels",
            args.profiles.len(),
            args.labels.len()
        )));
    }
    let mut unique = BTreeSet::new();
    for label in &args.labels {
        if !unique.insert(label) {
            return Err(user(anyhow!("duplicate label {label:?}")));
        }
    }

    let mut digests = BTreeMap::new();
    let mut sets = Vec::new();
    for (path, label) in args.profiles.iter().zip(&args.labels) {
        let bytes = fs::read(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(user)?;
        digests.insert(path.display().to_string(), sha256_hex(&bytes));
        let profiles = assoc::read_profiles_csv(bytes.as_slice())
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(user)?;
        sets.push((label.clone(), profiles));
    }

    let matrices = stats::compare_sets(&sets, args.alpha, args.m).map_err(user)?;
    report::write_comparison_csv(&matrices, create_output_file(&args.out)?).map_err(user)?;
    report::write_plot_data_csv(&sets, create_output_file(&args.plot_data)?).map_err(user)?;
    print!("{}", report::render_comparison_text(&matrices));

    let flags = BTreeMap::from([
        (
            "profiles".to_string(),
            args.profiles
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("labels".to_string(), args.labels.join(",")),
        ("alpha".to_string(), args.alpha.to_string()),
        (
            "m".to_string(),
            args.m
                .map_or_else(|| "default".to_string(), |m| m.to_string()),
        ),
        ("out".to_string(), args.out.display().to_string()),
        (
            "plot-data".to_string(),
            args.plot_data.display().to_string(),
        ),
    ]);
    RunManifest::new("compare", flags, digests).write_beside(&args.out)?;
    Ok(())
}

struct LoadedCorpus {
    docs: Vec<RawDocument>,
    /// doc_id to the relative source file it was parsed from.
    sources: BTreeMap<String, String>,
    digests: BTreeMap<String, String>,
}

fn load_corpus(dir: &Path) -> anyhow::Result<LoadedCorpus> {
    let mut docs = Vec::new();
    let mut sources = BTreeMap::new();
    let mut digests = BTreeMap::new();
    for path in input_files(dir)? {
        let text = read_text(&path)?;
        let rel = rel_name(dir, &path);
        digests.insert(rel.clone(), sha256_hex(text.as_bytes()));
        for doc in corpus::parse_europarl(&text, &file_stem(&path)) {
            if sources.insert(doc.doc_id.clone(), rel.clone()).is_some() {
                return Err(user(anyhow!(
                    "duplicate doc_id {:?} from {}",
                    doc.doc_id,
                    path.display()
                )));
            }
            docs.push(doc);
        }
    }
    Ok(LoadedCorpus {
        docs,
        sources,
        digests,
    })
}

/// Writes one `<doc_id>.txt` per document plus a `manifest.csv` listing
/// doc_id, char_count, and source file.
fn export_documents(
    docs: &[RawDocument],
    sources: &BTreeMap<String, String>,
    out: &Path,
) -> anyhow::Result<()> {
    create_output_dir(out)?;
    let manifest_path = out.join("manifest.csv");
    let mut w = csv::Writer::from_writer(create_output_file(&manifest_path)?);
    let csv_err = |e: csv::Error| user(anyhow!("writing {}: {e}", manifest_path.display()));
    w.write_record(["doc_id", "char_count", "source_file"])
        .map_err(csv_err)?;
    for doc in docs {
        let doc_path = out.join(format!("{}.txt", doc.doc_id));
        fs::write(&doc_path, format!("{}\n", doc.text))
            .with_context(|| format!("writing {}", doc_path.display()))
            .map_err(user)?;
        let source = sources.get(&doc.doc_id).map_or("", String::as_str);
        w.write_record([doc.doc_id.as_str(), &doc.char_count.to_string(), source])
            .map_err(csv_err)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", manifest_path.display()))
        .map_err(user)?;
    Ok(())
}

pub fn sample(args: &SampleArgs) -> anyhow::Result<()> {
    let loaded = load_corpus(&args.input)?;
    let spec = SamplingSpec {
        min_chars: args.min_chars,
        max_chars: args.max_chars,
        sample_size: args.n,
        seed: args.seed,
    };
    let chosen = corpus::sample_documents(&loaded.docs, &spec).map_err(user)?;
    export_documents(&chosen, &loaded.sources, &args.out)?;

    let flags = BTreeMap::from([
        ("input".to_string(), args.input.display().to_string()),
        ("min-chars".to_string(), args.min_chars.to_string()),
        ("max-chars".to_string(), args.max_chars.to_string()),
        ("n".to_string(), args.n.to_string()),
        ("seed".to_string(), args.seed.to_string()),
        ("out".to_string(), args.out.display().to_string()),
    ]);
    RunManifest::new("sample", flags, loaded.digests).write_into_dir(&args.out)?;

    println!(
        "sampled {} of {} documents into {}",
        chosen.len(),
        loaded.docs.len(),
        args.out.display()
    );
    Ok(())
}

pub fn ingest(args: &IngestArgs) -> anyhow::Result<()> {
    let loaded = load_corpus(&args.input)?;
    let mut docs = loaded.docs;
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    export_documents(&docs, &loaded.sources, &args.out)?;

    let flags = BTreeMap::from([
        ("input".to_string(), args.input.display().to_string()),
        ("out".to_string(), args.out.display().to_string()),
    ]);
    RunManifest::new("ingest", flags, loaded.digests).write_into_dir(&args.out)?;

    println!(
        "extracted {} documents into {}",
        docs.len(),
        args.out.display()
    );
    Ok(())
}
