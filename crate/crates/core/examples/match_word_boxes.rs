//! Extract word boxes from a rendered page and from a shifted, blurred copy
//! of it, then match them with the centroid and width gates.
//!
//! cargo run --example match_word_boxes -- [shift_px]

use camgt::alignment::{match_words, word_blocks, MatchParams};
use camgt::geometry::Homography;
use camgt::imaging::{gaussian_blur, warp_perspective};
use camgt::synth::{render_page, SynthPageSpec};

fn main() -> camgt::Result<()> {
    let shift: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let (page, layer) = render_page(&SynthPageSpec::default())?;
    let moved = warp_perspective(&page, &Homography::translation(-shift, -shift), page.width(), page.height())?;
    let moved = gaussian_blur(&moved, 1.0)?;

    let params = MatchParams::default();
    let ret = word_blocks(&page, params.smoothing_sigma)?;
    let capt = word_blocks(&moved, params.smoothing_sigma)?;
    let pairs = match_words(&capt, &ret, &params);
    println!(
        "{} layer words, {} page blocks, {} shifted blocks, {} matched",
        layer.words.len(),
        ret.len(),
        capt.len(),
        pairs.len()
    );
    for p in pairs.iter().take(5) {
        println!(
            "  page {:?} <- capture {:?}: d_c {:.2}, d_w {:.2}",
            p.ret.centroid,
            p.capt.centroid,
            p.capt.d_centroid(&p.ret),
            p.capt.d_width(&p.ret)
        );
    }
    Ok(())
}
