use super::{GrayImage, BACKGROUND};
use crate::error::Result;
use crate::geometry::Homography;

/// Resample `img` into an `out_w x out_h` raster under the map `h`
/// (source -> output).
///
/// Each output pixel samples the source at `h^-1 (x, y)` with bilinear
/// interpolation; taps that fall outside the source read as background.
pub fn warp_perspective(
    img: &GrayImage,
    h: &Homography,
    out_w: u32,
    out_h: u32,
) -> Result<GrayImage> {
    let inv = h.inverse()?;
    let mut out = GrayImage::filled(out_w, out_h, BACKGROUND);
    let (sw, sh) = (img.width() as f64, img.height() as f64);
    let bg = BACKGROUND as f64;
    let row_len = out_w as usize;
    let src = img.pixels();
    let stride = img.width() as usize;
    let (iw, ih) = (img.width() as i64, img.height() as i64);
    for (y, row) in out.pixels_mut().chunks_mut(row_len).enumerate() {
        let [mut u, mut v, mut w] = inv.apply_homogeneous(0.0, y as f64);
        let (du, dv, dw) = (inv.m[0][0], inv.m[1][0], inv.m[2][0]);
        for o in row.iter_mut() {
            let (cu, cv, cw) = (u, v, w);
            u += du;
            v += dv;
            w += dw;
            if cw.abs() < 1e-12 {
                continue;
            }
            let (sx, sy) = (cu / cw, cv / cw);
            if !(sx > -1.0 && sy > -1.0 && sx < sw && sy < sh) {
                continue;
            }
            let fx = sx.floor();
            let fy = sy.floor();
            let ax = sx - fx;
            let ay = sy - fy;
            let (ix, iy) = (fx as i64, fy as i64);
            let (p00, p10, p01, p11) = if ix >= 0 && iy >= 0 && ix + 1 < iw && iy + 1 < ih {
                let at = iy as usize * stride + ix as usize;
                (
                    src[at] as f64,
                    src[at + 1] as f64,
                    src[at + stride] as f64,
                    src[at + stride + 1] as f64,
                )
            } else {
                (
                    img.get_or(ix, iy, BACKGROUND) as f64,
                    img.get_or(ix + 1, iy, BACKGROUND) as f64,
                    img.get_or(ix, iy + 1, BACKGROUND) as f64,
                    img.get_or(ix + 1, iy + 1, BACKGROUND) as f64,
                )
            };
            let top = p00 + (p10 - p00) * ax;
            let bottom = p01 + (p11 - p01) * ax;
            let val = top + (bottom - top) * ay;
            *o = if val.is_finite() {
                val.round().clamp(0.0, 255.0) as u8
            } else {
                bg as u8
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn pattern() -> GrayImage {
        GrayImage::from_fn(40, 30, |x, y| ((x * 7 + y * 13) % 251) as u8)
    }

    #[test]
    fn identity_is_lossless() {
        let img = pattern();
        let out = warp_perspective(&img, &Homography::identity(), 40, 30).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn integer_translation_shifts_exactly() {
        let img = pattern();
        let out = warp_perspective(&img, &Homography::translation(5.0, 3.0), 40, 30).unwrap();
        for y in 0..30 {
            for x in 0..40 {
                let expect = if x >= 5 && y >= 3 { img.get(x - 5, y - 3) } else { BACKGROUND };
                assert_eq!(out.get(x, y), expect, "({x},{y})");
            }
        }
    }

    #[test]
    fn singular_transform_errors() {
        let h = Homography::from_rows([[0.0; 3]; 3]);
        assert!(matches!(
            warp_perspective(&pattern(), &h, 10, 10),
            Err(Error::SingularTransform)
        ));
    }
}
