//! Command-line front end: `synth`, `index`, `retrieve`, `generate`, `eval`.
//!
//! Every command takes an optional JSON config (`--config`); flags override
//! values from the file, and the effective config is written next to every
//! output. Exit codes: 0 success, 1 usage or config error, 2 failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{benchmark_with, parse_hypotheses, BenchOptions, BenchReport};
use crate::groundtruth::{emit_dataset, parse_text_layer, RecordKind, Split, MANIFEST_FILE};
use crate::imaging::load_gray;
use crate::llah::{
    fit_bin_edges, raw_invariants, retrieve, DescriptorMode, DocId, LlahParams, LlahStore,
    StoreBuilder, StoreStats,
};
use crate::pipeline::{
    process_captures, CaptureInput, CaptureStatus, PageData, PageSource, PipelineParams,
};
use crate::synth::{write_corpus, CaptureRegime, CorpusManifest, CorpusSpec, CORPUS_MANIFEST};

/// Effective configuration of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub corpus: CorpusSpec,
    pub llah: LlahParams,
    pub pipeline: PipelineParams,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).at(path))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| {
                Error::Parse {
                    pointer: crate::groundtruth::json_pointer(e.path()),
                    message: e.inner().to_string(),
                }
                .at(path)
            })
    }

    pub fn validate(&self) -> Result<()> {
        self.corpus.validate()?;
        self.llah.validate()?;
        self.pipeline.matching.validate()
    }
}

/// Name of the effective-config file written into output trees.
pub const CONFIG_FILE: &str = "config.json";
/// Per-capture log written by `generate`.
pub const GENERATE_LOG: &str = "generate_log.jsonl";
/// Invariant samples used when refitting bin edges.
pub const REFIT_SAMPLES: usize = 100_000;

#[derive(Parser, Debug)]
#[command(name = "camgt", version, about = "Ground truth for camera-captured documents")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a synthetic corpus of pages, text layers and captures.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        pages: Option<usize>,
        #[arg(long)]
        captures_per_page: Option<usize>,
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
    },
    /// Build the hash store from the pages of a corpus.
    Index {
        /// Corpus directory holding corpus.json.
        #[arg(long)]
        corpus: PathBuf,
        /// Store file to write.
        #[arg(long)]
        out: PathBuf,
        /// Refit the invariant bin edges on the indexed pages.
        #[arg(long)]
        refit_bin_edges: bool,
        #[arg(long)]
        feature_sigma: Option<f64>,
    },
    /// Retrieve the page shown in each image and print the match.
    Retrieve {
        #[arg(long)]
        store: PathBuf,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Run the full pipeline on captures and write a dataset.
    Generate {
        #[arg(long)]
        store: PathBuf,
        /// Corpus directory supplying the indexed pages and their text layers.
        #[arg(long)]
        corpus: PathBuf,
        /// Dataset directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Capture images; defaults to every capture listed in the corpus.
        captures: Vec<PathBuf>,
    },
    /// Score OCR hypotheses (`record_id<TAB>text` lines) against a dataset.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, value_enum, default_value = "word")]
        kind: KindArg,
        /// Only score these splits (repeatable).
        #[arg(long, value_enum)]
        split: Vec<SplitArg>,
        /// Also write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Mild,
    Retrieval,
    SevereBlur,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Word,
    Char,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(Error),
    Failure(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Failure(e) => e.fmt(f),
        }
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e)
}

fn failure(e: Error) -> CliError {
    CliError::Failure(e)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::from(e).at(path))
}

/// Render the corpus described by `config.corpus` into `out`.
pub fn cmd_synth(config: &Config, out: &Path) -> std::result::Result<CorpusManifest, CliError> {
    config.validate().map_err(usage)?;
    let manifest = write_corpus(&config.corpus, out).map_err(failure)?;
    write_json(&out.join(CONFIG_FILE), config).map_err(failure)?;
    Ok(manifest)
}

fn load_corpus(corpus: &Path) -> std::result::Result<CorpusManifest, CliError> {
    CorpusManifest::load(corpus.join(CORPUS_MANIFEST)).map_err(usage)
}

/// Index the corpus pages with `config.llah`, optionally refitting the bin
/// edges first, and save the store to `out` (with `<out>.json` holding the
/// effective config and statistics).
pub fn cmd_index(
    config: &Config,
    corpus: &Path,
    out: &Path,
    refit_bin_edges: bool,
) -> std::result::Result<StoreStats, CliError> {
    config.llah.validate().map_err(usage)?;
    let manifest = load_corpus(corpus)?;
    if manifest.pages.is_empty() {
        return Err(usage(Error::InvalidInput(format!(
            "{} lists no pages",
            corpus.join(CORPUS_MANIFEST).display()
        ))));
    }
    let mut params = config.llah.clone();

    let loaded: Vec<(DocId, Result<crate::imaging::GrayImage>)> = manifest
        .pages
        .par_iter()
        .map(|p| (p.doc_id, load_gray(corpus.join(&p.image))))
        .collect();
    let mut images = Vec::with_capacity(loaded.len());
    let mut failed = Vec::new();
    for (doc, r) in loaded {
        match r {
            Ok(img) => images.push((doc, img)),
            Err(e) => failed.push(format!("document {doc}: {e}")),
        }
    }
    if !failed.is_empty() {
        for f in &failed {
            eprintln!("unreadable page: {f}");
        }
        return Err(failure(Error::InvalidInput(format!("{} pages could not be read", failed.len()))));
    }

    if refit_bin_edges {
        params.bin_edges = refit_edges(&images, &params).map_err(failure)?;
    }
    let prepared: Vec<_> = images
        .par_iter()
        .map(|(_, img)| StoreBuilder::prepare_page(img, &params))
        .collect::<Result<_>>()
        .map_err(failure)?;
    let mut builder = StoreBuilder::new(params.clone()).map_err(usage)?;
    for ((doc, _), p) in images.iter().zip(prepared) {
        builder.insert_prepared(*doc, p);
    }
    let store = builder.finish();
    let stats = store.stats();
    store.save(out).map_err(failure)?;

    let mut effective = config.clone();
    effective.llah = params;
    let mut sidecar = out.as_os_str().to_owned();
    sidecar.push(".json");
    write_json(
        Path::new(&sidecar),
        &serde_json::json!({ "config": effective, "stats": stats }),
    )
    .map_err(failure)?;
    Ok(stats)
}

/// Equal-frequency edges over a fixed-seed sample of page invariants.
fn refit_edges(pages: &[(DocId, crate::imaging::GrayImage)], params: &LlahParams) -> Result<Vec<f64>> {
    let per_page: Vec<Vec<f64>> = pages
        .par_iter()
        .map(|(_, img)| -> Result<Vec<f64>> {
            let points = crate::llah::extract_feature_points(img, params)?;
            let mut v = Vec::new();
            for k in 0..points.len() {
                v.extend(raw_invariants(k, &points, params, DescriptorMode::Query)?);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut values: Vec<f64> = per_page.into_iter().flatten().collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    values.shuffle(&mut rng);
    values.truncate(REFIT_SAMPLES);
    fit_bin_edges(&values, params.q_levels)
}

/// Pages of a corpus directory, loaded on first use.
pub struct CorpusPages {
    root: PathBuf,
    manifest: CorpusManifest,
    cache: Vec<OnceLock<std::result::Result<PageData, String>>>,
}

impl CorpusPages {
    pub fn open(corpus: &Path) -> Result<CorpusPages> {
        let manifest = CorpusManifest::load(corpus.join(CORPUS_MANIFEST))?;
        let cache = (0..manifest.pages.len()).map(|_| OnceLock::new()).collect();
        Ok(CorpusPages {
            root: corpus.to_path_buf(),
            manifest,
            cache,
        })
    }

    pub fn manifest(&self) -> &CorpusManifest {
        &self.manifest
    }
}

impl PageSource for CorpusPages {
    fn page(&self, doc_id: DocId) -> Result<PageData> {
        let i = self
            .manifest
            .pages
            .iter()
            .position(|p| p.doc_id == doc_id)
            .ok_or_else(|| Error::InvalidInput(format!("corpus has no page for document {doc_id}")))?;
        let entry = &self.manifest.pages[i];
        self.cache[i]
            .get_or_init(|| {
                let image = load_gray(self.root.join(&entry.image)).map_err(|e| e.to_string())?;
                let layer = parse_text_layer(self.root.join(&entry.layer)).map_err(|e| e.to_string())?;
                Ok(PageData {
                    page_id: entry.page_id.clone(),
                    image: Arc::new(image),
                    layer: Arc::new(layer),
                })
            })
            .clone()
            .map_err(Error::InvalidInput)
    }
}

/// Counts from one `generate` run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub captures: usize,
    pub ok: usize,
    pub no_match: usize,
    pub failed: usize,
    pub word_records: usize,
    pub char_records: usize,
}

/// Run the pipeline on `captures` (or every capture of the corpus when
/// empty) and write the dataset, `generate_log.jsonl` and `config.json`
/// into `out`.
pub fn cmd_generate(
    config: &Config,
    store: &Path,
    corpus: &Path,
    captures: &[PathBuf],
    out: &Path,
) -> std::result::Result<GenerateSummary, CliError> {
    config.pipeline.matching.validate().map_err(usage)?;
    if out.join(MANIFEST_FILE).exists() {
        return Err(usage(Error::InvalidInput(format!(
            "{} already holds a dataset",
            out.display()
        ))));
    }
    let store = LlahStore::load(store).map_err(usage)?;
    let pages = CorpusPages::open(corpus).map_err(usage)?;

    let paths: Vec<(String, PathBuf)> = if captures.is_empty() {
        pages
            .manifest()
            .captures
            .iter()
            .map(|c| (c.capture_id.clone(), corpus.join(&c.image)))
            .collect()
    } else {
        captures
            .iter()
            .map(|p| {
                let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                (id, p.clone())
            })
            .collect()
    };
    if paths.is_empty() {
        return Err(usage(Error::InvalidInput("no captures to process".into())));
    }
    let inputs: Vec<CaptureInput> = paths
        .iter()
        .map(|(id, path)| CaptureInput {
            capture_id: id.clone(),
            load: Box::new(move || load_gray(path)),
        })
        .collect();

    let outcomes =
        process_captures(&inputs, &store, &pages, &config.pipeline, config.workers).map_err(usage)?;
    let mut summary = GenerateSummary {
        captures: outcomes.len(),
        ..Default::default()
    };
    let mut log = String::new();
    let mut records = Vec::new();
    for o in outcomes {
        match o.log.status {
            CaptureStatus::Ok => summary.ok += 1,
            CaptureStatus::NoMatch => summary.no_match += 1,
            CaptureStatus::Failed => summary.failed += 1,
        }
        if let Some(m) = &o.log.message {
            log::warn!("{}: {m}", o.log.capture_id);
        }
        summary.word_records += o.log.word_records;
        summary.char_records += o.log.char_records;
        log.push_str(&serde_json::to_string(&o.log).map_err(|e| failure(e.into()))?);
        log.push('\n');
        records.extend(o.records);
    }

    let mut effective = serde_json::to_value(config).map_err(|e| failure(e.into()))?;
    effective["llah"] = serde_json::to_value(store.params()).map_err(|e| failure(e.into()))?;
    emit_dataset(&records, &effective, out).map_err(failure)?;
    let log_path = out.join(GENERATE_LOG);
    fs::write(&log_path, log).map_err(|e| failure(Error::from(e).at(&log_path)))?;
    write_json(&out.join(CONFIG_FILE), &effective).map_err(failure)?;

    if summary.ok == 0 {
        return Err(failure(Error::InvalidInput(format!(
            "all {} captures failed",
            summary.captures
        ))));
    }
    Ok(summary)
}

/// Score the hypothesis file against the dataset.
pub fn cmd_eval(
    dataset: &Path,
    hyp: &Path,
    options: &BenchOptions,
) -> std::result::Result<BenchReport, CliError> {
    let text = fs::read_to_string(hyp).map_err(|e| usage(Error::from(e).at(hyp)))?;
    if !dataset.join(MANIFEST_FILE).exists() {
        return Err(usage(Error::InvalidInput(format!(
            "{} has no {MANIFEST_FILE}",
            dataset.display()
        ))));
    }
    benchmark_with(dataset, &parse_hypotheses(&text), options).map_err(failure)
}

fn effective_config(cli: &Cli) -> std::result::Result<Config, CliError> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p).map_err(usage)?,
        None => Config::default(),
    };
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    match &cli.command {
        Command::Synth {
            seed,
            pages,
            captures_per_page,
            regime,
            ..
        } => {
            if let Some(s) = seed {
                config.corpus.seed = *s;
            }
            if let Some(p) = pages {
                config.corpus.pages = *p;
            }
            if let Some(c) = captures_per_page {
                config.corpus.captures_per_page = *c;
            }
            if let Some(r) = regime {
                config.corpus.regime = match r {
                    RegimeArg::Mild => CaptureRegime::mild(),
                    RegimeArg::Retrieval => CaptureRegime::retrieval(),
                    RegimeArg::SevereBlur => CaptureRegime::severe_blur(),
                };
            }
        }
        Command::Index { feature_sigma: Some(s), .. } => config.llah.feature_sigma = *s,
        _ => {}
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn dispatch(cli: Cli) -> std::result::Result<(), CliError> {
    let config = effective_config(&cli)?;
    let mut stdout = std::io::stdout().lock();
    let mut print = |s: String| {
        let _ = writeln!(stdout, "{s}");
    };
    match cli.command {
        Command::Synth { out, .. } => {
            let m = cmd_synth(&config, &out)?;
            print(format!("wrote {} pages and {} captures to {}", m.pages.len(), m.captures.len(), out.display()));
        }
        Command::Index {
            corpus,
            out,
            refit_bin_edges,
            ..
        } => {
            let stats = cmd_index(&config, &corpus, &out, refit_bin_edges)?;
            print(serde_json::to_string_pretty(&stats).map_err(|e| failure(e.into()))?);
        }
        Command::Retrieve { store, images } => {
            let store = LlahStore::load(&store).map_err(usage)?;
            let mut hits = 0;
            for path in &images {
                let line = match load_gray(path).and_then(|img| retrieve(&img, &store)) {
                    Ok(r) => {
                        hits += 1;
                        serde_json::json!({
                            "image": path,
                            "doc_id": r.doc_id,
                            "score": r.score,
                            "runner_up_score": r.runner_up_score,
                            "correspondences": r.correspondences.len(),
                            "region": r.region.vertices,
                        })
                    }
                    Err(e) => serde_json::json!({ "image": path, "error": e.to_string() }),
                };
                print(line.to_string());
            }
            if hits == 0 {
                return Err(failure(Error::InvalidInput("no image matched".into())));
            }
        }
        Command::Generate {
            store,
            corpus,
            out,
            captures,
        } => {
            let s = cmd_generate(&config, &store, &corpus, &captures, &out)?;
            print(format!(
                "{} captures: {} ok, {} no match, {} failed; {} word and {} char records",
                s.captures, s.ok, s.no_match, s.failed, s.word_records, s.char_records
            ));
        }
        Command::Eval {
            dataset,
            hyp,
            kind,
            split,
            report,
        } => {
            let options = BenchOptions {
                kind: match kind {
                    KindArg::Word => RecordKind::Word,
                    KindArg::Char => RecordKind::Char,
                },
                splits: split
                    .iter()
                    .map(|s| match s {
                        SplitArg::Train => Split::Train,
                        SplitArg::Val => Split::Val,
                        SplitArg::Test => Split::Test,
                    })
                    .collect(),
            };
            let r = cmd_eval(&dataset, &hyp, &options)?;
            if let Some(p) = report {
                write_json(&p, &r).map_err(failure)?;
            }
            print(r.table());
        }
    }
    Ok(())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_and_fills_defaults() {
        let c: Config = serde_json::from_str(r#"{"corpus": {"pages": 4}, "workers": 2}"#).unwrap();
        assert_eq!(c.corpus.pages, 4);
        assert_eq!(c.corpus.captures_per_page, CorpusSpec::default().captures_per_page);
        assert_eq!(c.llah, LlahParams::default());
        let back: Config = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn config_errors_point_at_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"pipeline": {"matching": {"theta_x": 1}}}"#).unwrap();
        let msg = Config::load(&p).unwrap_err().to_string();
        assert!(msg.contains("/pipeline/matching/theta_x"), "{msg}");
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"corpus": {"seed": 3, "pages": 9}, "workers": 1}"#).unwrap();
        let cli = Cli::try_parse_from([
            "camgt", "--config", p.to_str().unwrap(), "--workers", "4", "synth", "--out", "x", "--seed", "5",
        ])
        .unwrap();
        let c = effective_config(&cli).unwrap();
        assert_eq!((c.corpus.seed, c.corpus.pages, c.workers), (5, 9, 4));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let cli = Cli::try_parse_from(["camgt", "synth", "--out", "x", "--pages", "0"]).unwrap();
        assert_eq!(effective_config(&cli).unwrap_err().exit_code(), 1);
    }
}
