//! Fit equal-frequency bin edges for the area-ratio invariant on rendered
//! pages and print them as a Rust constant.
//!
//! cargo run --example fit_bin_edges -- [pages] [samples]

use camgt::llah::{discretize, extract_feature_points, fit_bin_edges, raw_invariants, DescriptorMode, LlahParams};
use camgt::synth::CorpusSpec;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let pages: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let samples: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);

    let params = LlahParams::default();
    let corpus = CorpusSpec { seed: 2024, pages, ..Default::default() };
    let mut values = Vec::new();
    for i in 0..pages {
        let (page, _) = corpus.render(i)?;
        let points = extract_feature_points(&page, &params)?;
        for p in 0..points.len() {
            values.extend(raw_invariants(p, &points, &params, DescriptorMode::Query)?);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    values.shuffle(&mut rng);
    values.truncate(samples);

    let edges = fit_bin_edges(&values, params.q_levels)?;
    let mut counts = vec![0usize; params.q_levels as usize];
    for &v in &values {
        counts[discretize(v, &edges) as usize] += 1;
    }
    let uniform = values.len() as f64 / params.q_levels as f64;
    let worst = counts.iter().map(|&c| (c as f64 / uniform - 1.0).abs()).fold(0.0, f64::max);
    println!("{} invariants from {pages} pages", values.len());
    println!("bin counts {counts:?}, worst deviation from uniform {:.1}%", worst * 100.0);
    println!("pub const DEFAULT_BIN_EDGES: [f64; {}] = [", edges.len());
    for e in &edges {
        println!("    {e:.6},");
    }
    println!("];");
    Ok(())
}
