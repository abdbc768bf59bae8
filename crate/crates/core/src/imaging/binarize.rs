use super::{GrayImage, BACKGROUND, FOREGROUND};

/// Otsu threshold over the 256-bin histogram. Pixels `<= t` are foreground.
///
/// Returns `None` when the image has a single gray level. Ties resolve to the
/// smallest threshold.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let sum_total: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();

    let mut best: Option<(u8, f64)> = None;
    let mut w0 = 0f64;
    let mut sum0 = 0f64;
    for t in 0..255usize {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 {
            continue;
        }
        if w1 == 0.0 {
            break;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_total - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((t as u8, between));
        }
    }
    best.map(|(t, _)| t)
}

/// Pixels `<= t` become 0, everything else 255; `None` gives all background.
pub fn binarize_at(img: &GrayImage, t: Option<u8>) -> GrayImage {
    let mut out = img.clone();
    match t {
        Some(t) => out
            .pixels_mut()
            .iter_mut()
            .for_each(|p| *p = if *p <= t { FOREGROUND } else { BACKGROUND }),
        None => out.pixels_mut().fill(BACKGROUND),
    }
    out
}

/// Global Otsu binarization: text pixels become 0, everything else 255.
/// A constant image is all background.
pub fn binarize_otsu(img: &GrayImage) -> GrayImage {
    binarize_at(img, otsu_threshold(img))
}
