//! Render one synthetic page and a simulated capture of it.
//!
//! cargo run --example render_page -- [seed] [out_dir]

use std::path::PathBuf;

use camgt::imaging::save_png;
use camgt::synth::{render_page, simulate_capture, CaptureRegime, SynthPageSpec};

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "render_out".into()));
    std::fs::create_dir_all(&out)?;

    let spec = SynthPageSpec { seed, ..Default::default() };
    let (page, layer) = render_page(&spec)?;
    save_png(&page, out.join("page.png"))?;
    std::fs::write(out.join("page.json"), layer.to_json())?;

    let cspec = CaptureRegime::mild().sample(seed);
    let (capture, h) = simulate_capture(&page, &cspec)?;
    save_png(&capture, out.join("capture.png"))?;

    println!("{} words, page {}x{}", layer.words.len(), page.width(), page.height());
    println!("capture {}x{} with {:?}", capture.width(), capture.height(), cspec);
    println!("capture -> page: {h:?}");
    Ok(())
}
