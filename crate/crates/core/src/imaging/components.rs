use serde::{Deserialize, Serialize};

use super::{GrayImage, PixelRect, BACKGROUND, FOREGROUND};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// One 8-connected foreground component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub label: u32,
    pub pixel_count: u32,
    /// Mean of the member pixel coordinates.
    pub centroid: Point,
    pub bbox: PixelRect,
}

/// Label the 8-connected foreground (value 0) components of a binary image.
///
/// Blobs are numbered from 1 in raster order of their first pixel.
pub fn connected_components(binary: &GrayImage) -> Result<Vec<Blob>> {
    label_components(binary).map(|(_, blobs)| blobs)
}

/// As [`connected_components`], also returning the row-major label map
/// (0 for background).
pub fn label_components(binary: &GrayImage) -> Result<(Vec<u32>, Vec<Blob>)> {
    if let Some(&v) = binary
        .pixels()
        .iter()
        .find(|&&p| p != FOREGROUND && p != BACKGROUND)
    {
        return Err(Error::InvalidInput(format!(
            "connected components need a binary image, found value {v}"
        )));
    }
    let w = binary.width() as usize;
    let h = binary.height() as usize;
    let px = binary.pixels();
    let mut labels = vec![0u32; w * h];
    let mut blobs = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    for start in 0..w * h {
        if px[start] != FOREGROUND || labels[start] != 0 {
            continue;
        }
        let label = blobs.len() as u32 + 1;
        labels[start] = label;
        stack.push(start);
        let (mut count, mut sx, mut sy) = (0u64, 0u64, 0u64);
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0usize, 0usize);
        while let Some(idx) = stack.pop() {
            let (x, y) = (idx % w, idx / w);
            count += 1;
            sx += x as u64;
            sy += y as u64;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            let ny0 = y.saturating_sub(1);
            let ny1 = (y + 1).min(h - 1);
            let nx0 = x.saturating_sub(1);
            let nx1 = (x + 1).min(w - 1);
            for ny in ny0..=ny1 {
                let row = ny * w;
                for nx in nx0..=nx1 {
                    let n = row + nx;
                    if px[n] == FOREGROUND && labels[n] == 0 {
                        labels[n] = label;
                        stack.push(n);
                    }
                }
            }
        }
        blobs.push(Blob {
            label,
            pixel_count: count as u32,
            centroid: Point::new(sx as f64 / count as f64, sy as f64 / count as f64),
            bbox: PixelRect::new(x0 as i64, y0 as i64, x1 as i64 + 1, y1 as i64 + 1),
        });
    }
    Ok((labels, blobs))
}
