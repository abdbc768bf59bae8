//! Index synthetic pages and retrieve simulated captures of them.
//!
//! cargo run --example retrieve_captures -- [pages] [captures_per_page] [mild|retrieval|severe]

use std::time::Instant;

use camgt::llah::{extract_feature_points, retrieve, LlahParams, StoreBuilder};
use camgt::synth::{simulate_capture, CaptureRegime, CorpusSpec};
use rayon::prelude::*;

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let pages: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let per_page: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let regime = match args.next().as_deref() {
        Some("mild") => CaptureRegime::mild(),
        Some("severe") => CaptureRegime::severe_blur(),
        _ => CaptureRegime::retrieval(),
    };
    let corpus = CorpusSpec { seed: 11, pages, captures_per_page: per_page, regime, ..Default::default() };
    let params = LlahParams::default();

    let t = Instant::now();
    let rendered: Vec<_> = (0..pages).into_par_iter().map(|i| corpus.render(i)).collect::<camgt::Result<_>>()?;
    let prepared: Vec<_> = rendered
        .par_iter()
        .map(|(img, _)| StoreBuilder::prepare_page(img, &params))
        .collect::<camgt::Result<_>>()?;
    let mut builder = StoreBuilder::new(params.clone())?;
    for (i, p) in prepared.into_iter().enumerate() {
        builder.insert_prepared(i as u32, p);
    }
    let store = builder.finish();
    println!("indexed {pages} pages in {:.1?}: {:?}", t.elapsed(), store.stats());

    let t = Instant::now();
    let outcomes: Vec<(usize, std::result::Result<(u32, u32, u32, usize), String>, usize)> = (0..pages * per_page)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / per_page, k % per_page);
            let (cap, _) = simulate_capture(&rendered[i].0, &corpus.capture_spec(i, j)).unwrap();
            let npts = extract_feature_points(&cap, &params).map(|p| p.len()).unwrap_or(0);
            let r = retrieve(&cap, &store).map_err(|e| e.to_string());
            (i, r.map(|r| (r.doc_id, r.score, r.runner_up_score, r.correspondences.len())), npts)
        })
        .collect();
    let correct = outcomes.iter().filter(|(i, r, _)| matches!(r, Ok((d, ..)) if *d as usize == *i)).count();
    for (i, r, n) in outcomes.iter().filter(|(i, r, _)| !matches!(r, Ok((d, ..)) if *d as usize == *i)) {
        println!("miss: page {i} ({n} points) -> {r:?}");
    }
    let mut scores: Vec<u32> = outcomes.iter().filter_map(|(_, r, _)| r.as_ref().ok().map(|r| r.1)).collect();
    scores.sort_unstable();
    println!(
        "top-1 {correct}/{} in {:.1?}; median score {}",
        outcomes.len(),
        t.elapsed(),
        scores.get(scores.len() / 2).copied().unwrap_or(0)
    );
    Ok(())
}
