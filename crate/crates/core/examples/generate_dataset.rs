//! Synthesize a corpus on disk, index it and generate a labeled dataset,
//! the same steps as `camgt synth`, `index` and `generate`.
//!
//! cargo run --example generate_dataset -- [out_dir] [pages]

use std::path::PathBuf;

use camgt::cli::{cmd_generate, cmd_index, cmd_synth, Config};
use camgt::synth::CorpusSpec;

fn main() {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "dataset_out".into()));
    let pages: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let config = Config {
        corpus: CorpusSpec { pages, captures_per_page: 2, ..Default::default() },
        ..Default::default()
    };
    let (corpus, store, ds) = (out.join("corpus"), out.join("store.llah"), out.join("dataset"));

    let run = || -> Result<(), camgt::cli::CliError> {
        cmd_synth(&config, &corpus)?;
        let stats = cmd_index(&config, &corpus, &store, false)?;
        println!("indexed {} pages, {} feature points", stats.documents, stats.feature_points);
        let s = cmd_generate(&config, &store, &corpus, &[], &ds)?;
        println!("{} captures ok of {}: {} word, {} char records in {}", s.ok, s.captures, s.word_records, s.char_records, ds.display());
        Ok(())
    };
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
