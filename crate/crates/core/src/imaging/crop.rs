use super::{GrayImage, PixelRect, Quad, BACKGROUND};
use crate::error::{Error, Result};

/// Axis-aligned sub-image, clipped to the raster.
pub fn crop(img: &GrayImage, bbox: &PixelRect) -> Result<GrayImage> {
    let r = bbox.intersect(&img.full_rect());
    if r.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let w = r.width() as usize;
    let mut pixels = Vec::with_capacity(w * r.height() as usize);
    for y in r.y0..r.y1 {
        let row = img.row(y as u32);
        pixels.extend_from_slice(&row[r.x0 as usize..r.x1 as usize]);
    }
    GrayImage::from_raw(w as u32, r.height() as u32, pixels)
}

/// The pixel bounding box of `quad`, with any part outside the raster padded
/// with background. The quad itself is not rectified.
pub fn crop_quad(img: &GrayImage, quad: &Quad) -> Result<GrayImage> {
    if !quad.is_finite() {
        return Err(Error::InvalidInput("quad has non-finite corners".into()));
    }
    let b = quad.pixel_bounds();
    if b.is_empty() || b.intersect(&img.full_rect()).is_empty() {
        return Err(Error::EmptyRegion);
    }
    let (w, h) = (b.width() as u32, b.height() as u32);
    Ok(GrayImage::from_fn(w, h, |x, y| {
        img.get_or(b.x0 + x as i64, b.y0 + y as i64, BACKGROUND)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Rect};

    fn gradient() -> GrayImage {
        GrayImage::from_fn(32, 24, |x, y| (x * 4 + y * 2) as u8)
    }

    #[test]
    fn full_crop_is_identity() {
        let img = gradient();
        assert_eq!(crop(&img, &img.full_rect()).unwrap(), img);
    }

    #[test]
    fn offset_crop() {
        let img = gradient();
        let c = crop(&img, &PixelRect::new(5, 5, 15, 15)).unwrap();
        assert_eq!((c.width(), c.height()), (10, 10));
        assert_eq!(c.get(0, 0), img.get(5, 5));
        assert_eq!(c.get(9, 9), img.get(14, 14));
    }

    #[test]
    fn crop_is_idempotent() {
        let img = gradient();
        let c = crop(&img, &PixelRect::new(-3, 2, 9, 40)).unwrap();
        assert_eq!(crop(&c, &c.full_rect()).unwrap(), c);
    }

    #[test]
    fn disjoint_regions_error() {
        let img = gradient();
        assert!(matches!(
            crop(&img, &PixelRect::new(40, 0, 50, 5)),
            Err(Error::EmptyRegion)
        ));
        let q = Quad::from_rect(&Rect::new(-10.0, -10.0, -2.0, -3.0));
        assert!(matches!(crop_quad(&img, &q), Err(Error::EmptyRegion)));
    }

    #[test]
    fn quad_overhanging_by_one_pixel_is_padded() {
        let img = gradient();
        // Bounding box [-1, 3) x [0, 2): the first column lies outside.
        let q = Quad {
            corners: [
                Point::new(-1.0, 0.0),
                Point::new(3.0, 0.0),
                Point::new(2.5, 2.0),
                Point::new(-0.5, 1.5),
            ],
        };
        let c = crop_quad(&img, &q).unwrap();
        assert_eq!((c.width(), c.height()), (4, 2));
        assert_eq!(c.get(0, 0), BACKGROUND);
        assert_eq!(c.get(0, 1), BACKGROUND);
        assert_eq!(c.get(1, 0), img.get(0, 0));
        assert_eq!(c.get(3, 1), img.get(2, 1));
    }
}
