use super::GrayImage;
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian taps for radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f32>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "blur sigma must be positive, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    Ok(taps.iter().map(|t| (t / total) as f32).collect())
}

/// Separable Gaussian blur with clamp-to-edge borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    let kernel = gaussian_kernel(sigma)?;
    let radius = (kernel.len() / 2) as i64;
    let w = img.width() as usize;
    let h = img.height() as usize;
    let src = img.pixels();

    let mut tmp = vec![0f32; w * h];
    let mut padded = vec![0f32; w + 2 * radius as usize];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (i, v) in padded.iter_mut().enumerate() {
            let x = (i as i64 - radius).clamp(0, w as i64 - 1) as usize;
            *v = row[x] as f32;
        }
        let out = &mut tmp[y * w..(y + 1) * w];
        for (k, weight) in kernel.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&padded[k..k + w]) {
                *o += weight * v;
            }
        }
    }

    let mut out = vec![0u8; w * h];
    let mut acc = vec![0f32; w];
    for y in 0..h {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (k, weight) in kernel.iter().enumerate() {
            let sy = (y as i64 + k as i64 - radius).clamp(0, h as i64 - 1) as usize;
            let row = &tmp[sy * w..(sy + 1) * w];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += weight * v;
            }
        }
        for (o, a) in out[y * w..(y + 1) * w].iter_mut().zip(&acc) {
            *o = a.round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage::from_raw(img.width(), img.height(), out)
}
