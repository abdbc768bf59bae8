//! Build a hash store from rendered pages, save it, load it back and print
//! its statistics.
//!
//! cargo run --example index_pages -- [pages] [store_file]

use camgt::llah::{LlahParams, LlahStore, StoreBuilder};
use camgt::synth::CorpusSpec;

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let pages: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let path = args.next().unwrap_or_else(|| "pages.llah".into());

    let corpus = CorpusSpec { pages, ..Default::default() };
    let mut builder = StoreBuilder::new(LlahParams::default())?;
    for i in 0..pages {
        let (page, _) = corpus.render(i)?;
        let n = builder.index_page(&page, i as u32)?;
        println!("page {i}: {n} feature points");
    }
    let store = builder.finish();
    store.save(&path)?;
    let loaded = LlahStore::load(&path)?;
    assert_eq!(loaded, store);
    println!("{:#?}", loaded.stats());
    println!("saved to {path} ({} bytes)", std::fs::metadata(&path)?.len());
    Ok(())
}
