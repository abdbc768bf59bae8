use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::GrayImage;
use crate::error::{Error, Result};

/// Luma from 8-bit RGB: `0.299 R + 0.587 G + 0.114 B`, rounded half up.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

fn from_dynamic(img: DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width(), img.height());
    let pixels = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_) => {
            img.to_luma16().pixels().map(|p| (p.0[0] >> 8) as u8).collect()
        }
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
            .collect(),
    };
    GrayImage::from_raw(w, h, pixels)
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let bad = |m: &str| Error::InvalidInput(format!("PGM: {m}"));
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for f in fields.iter_mut() {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *f = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed header"))?;
    }
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PGM is supported"));
    }
    pos += 1;
    let n = w as usize * h as usize;
    let data = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated data"))?;
    let pixels = if maxval == 255 {
        data.to_vec()
    } else {
        data.iter()
            .map(|&v| ((v as u32 * 255 + maxval / 2) / maxval) as u8)
            .collect()
    };
    GrayImage::from_raw(w, h, pixels)
}

/// Load a PNG or binary PGM (P5) file as 8-bit grayscale.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let load = || -> Result<GrayImage> {
        let bytes = fs::read(path)?;
        if bytes.starts_with(b"P5") {
            return parse_pgm(&bytes);
        }
        from_dynamic(image::load_from_memory(&bytes)?)
    };
    load().map_err(|e| e.at(path))
}

pub fn save_png(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer_with_format(
        path,
        img.pixels(),
        img.width(),
        img.height(),
        image::ExtendedColorType::L8,
        ImageFormat::Png,
    )
    .map_err(|e| Error::from(e).at(path))
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let write = || -> Result<()> {
        let mut f = BufWriter::new(fs::File::create(path)?);
        write!(f, "P5\n{} {}\n255\n", img.width(), img.height())?;
        f.write_all(img.pixels())?;
        f.flush()?;
        Ok(())
    };
    write().map_err(|e| e.at(path))
}

/// Save by extension: `.pgm` writes binary PGM, anything else PNG.
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("pgm") => save_pgm(img, path),
        _ => save_png(img, path),
    }
}
