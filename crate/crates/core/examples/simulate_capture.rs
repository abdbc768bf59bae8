//! Render a page and photograph it with the capture simulator.
//!
//! cargo run --example simulate_capture -- [out_dir] [seed]

use std::path::PathBuf;

use camgt::imaging::save_png;
use camgt::synth::{render_page, simulate_capture, CaptureRegime, SynthPageSpec};

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "capture_out".into()));
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    std::fs::create_dir_all(&out)?;

    let (page, _) = render_page(&SynthPageSpec { seed, ..Default::default() })?;
    let spec = CaptureRegime::mild().sample(seed);
    let (capture, h) = simulate_capture(&page, &spec)?;
    save_png(&page, out.join("page.png"))?;
    save_png(&capture, out.join("capture.png"))?;
    println!("{spec:#?}");
    println!("capture -> page homography {:?}", h.to_row_vec());
    println!("wrote {}/page.png and capture.png", out.display());
    Ok(())
}
