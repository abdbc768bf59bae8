//! Raster primitives shared by every pipeline stage.
//!
//! Images are 8-bit grayscale with dark text (0) on a light background (255).

mod binarize;
mod blur;
mod components;
mod crop;
mod io;
mod warp;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

pub use binarize::{binarize_at, binarize_otsu, otsu_threshold};
pub use blur::{gaussian_blur, gaussian_kernel};
pub use components::{connected_components, label_components, Blob};
pub use crop::{crop, crop_quad};
pub use io::{load_gray, luminance, save_gray, save_pgm, save_png};
pub use warp::warp_perspective;

/// Background value used for padding and out-of-source samples.
pub const BACKGROUND: u8 = 255;
/// Foreground (text) value of a binarized image.
pub const FOREGROUND: u8 = 0;

/// Row-major 8-bit grayscale raster.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Image of the given size filled with `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        GrayImage {
            width,
            height,
            pixels: vec![value; width as usize * height as usize],
        }
    }

    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidInput(format!(
                "{} pixels do not fill a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut img = GrayImage::filled(width, height, 0);
        for y in 0..height {
            for x in 0..width {
                img.set(x, y, f(x, y));
            }
        }
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = v;
    }

    /// Pixel at signed coordinates, or `fallback` outside the raster.
    #[inline]
    pub fn get_or(&self, x: i64, y: i64, fallback: u8) -> u8 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            fallback
        } else {
            self.pixels[y as usize * self.width as usize + x as usize]
        }
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        &self.pixels[y as usize * w..(y as usize + 1) * w]
    }

    pub fn full_rect(&self) -> PixelRect {
        PixelRect::new(0, 0, self.width as i64, self.height as i64)
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

/// Integer pixel box `[x0, x1) x [y0, y1)`. Coordinates may lie outside an
/// image; operations clip as documented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct PixelRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl PixelRect {
    pub const fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        PixelRect { x0, y0, x1, y1 }
    }

    /// Smallest pixel box covering a real-valued box.
    pub fn enclosing(r: &Rect) -> Self {
        PixelRect::new(
            r.x0.floor() as i64,
            r.y0.floor() as i64,
            r.x1.ceil() as i64,
            r.y1.ceil() as i64,
        )
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    pub fn intersect(&self, other: &PixelRect) -> PixelRect {
        PixelRect::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        )
    }

    pub fn to_rect(&self) -> Rect {
        Rect::new(self.x0 as f64, self.y0 as f64, self.x1 as f64, self.y1 as f64)
    }
}

impl From<[i64; 4]> for PixelRect {
    fn from(v: [i64; 4]) -> Self {
        PixelRect::new(v[0], v[1], v[2], v[3])
    }
}

impl From<PixelRect> for [i64; 4] {
    fn from(r: PixelRect) -> Self {
        [r.x0, r.y0, r.x1, r.y1]
    }
}

/// Quadrilateral whose corners are the images of a rectangle's top-left,
/// top-right, bottom-right and bottom-left corners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub corners: [Point; 4],
}

impl Quad {
    pub fn from_rect(r: &Rect) -> Self {
        Quad {
            corners: r.corners(),
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::bounding(&self.corners).expect("quad has four corners")
    }

    pub fn pixel_bounds(&self) -> PixelRect {
        PixelRect::enclosing(&self.bounds())
    }

    pub fn is_finite(&self) -> bool {
        self.corners.iter().all(Point::is_finite)
    }
}
