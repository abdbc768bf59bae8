use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{estimate_homography_ls, Homography, Point, PointPair, Rect, RegionPolygon};
use crate::imaging::{gaussian_blur, warp_perspective, GrayImage};

/// Simulated camera capture of part of a page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureSpec {
    pub seed: u64,
    /// Fraction of the page area covered by the capture, in [0.3, 1.0].
    pub crop_fraction: f64,
    /// Maximum displacement of each capture corner on the page, in pixels.
    pub jitter_px: f64,
    /// In-plane rotation of the captured quad about its centre, in degrees.
    #[serde(default)]
    pub rotation_deg: f64,
    pub blur_sigma: f64,
    pub gain: f64,
    pub offset: f64,
    pub noise_sigma: f64,
}

impl Default for CaptureSpec {
    fn default() -> Self {
        CaptureSpec {
            seed: 0,
            crop_fraction: 1.0,
            jitter_px: 0.0,
            rotation_deg: 0.0,
            blur_sigma: 0.0,
            gain: 1.0,
            offset: 0.0,
            noise_sigma: 0.0,
        }
    }
}

impl CaptureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.3..=1.0).contains(&self.crop_fraction)
            && self.jitter_px >= 0.0
            && self.rotation_deg.is_finite()
            && self.blur_sigma >= 0.0
            && self.gain > 0.0
            && self.offset.is_finite()
            && self.noise_sigma >= 0.0;
        if ok && self.jitter_px.is_finite() && self.blur_sigma.is_finite() && self.noise_sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::Spec(format!("invalid capture spec {self:?}")))
        }
    }
}

const MAX_ATTEMPTS: usize = 32;
/// Spread of the capture aspect ratio around the page aspect, as a log factor.
const ASPECT_SPREAD: f64 = 0.3;

/// Bounding box of pixels darker than mid-gray.
fn ink_bounds(page: &GrayImage) -> Option<Rect> {
    let mut r: Option<Rect> = None;
    for y in 0..page.height() {
        for (x, &v) in page.row(y).iter().enumerate() {
            if v < 128 {
                let (x, y) = (x as f64, y as f64);
                r = Some(match r {
                    None => Rect::new(x, y, x + 1.0, y + 1.0),
                    Some(b) => Rect::new(b.x0.min(x), b.y0.min(y), b.x1.max(x + 1.0), b.y1.max(y + 1.0)),
                });
            }
        }
    }
    r
}

/// Offset of a window of `len` within `[0, total]`, keeping its centre over
/// the ink span when there is one.
fn place(rng: &mut ChaCha8Rng, len: f64, total: f64, ink: Option<(f64, f64)>) -> f64 {
    if len >= total {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, total - len);
    if let Some((a, b)) = ink {
        let (clo, chi) = ((a - len / 2.0).max(lo), (b - len / 2.0).min(hi));
        if clo <= chi {
            (lo, hi) = (clo, chi);
        }
    }
    if hi > lo { rng.random_range(lo..=hi) } else { lo }
}

/// Simulate a capture of `page`, centred somewhere over its ink. Returns the capture and the exact
/// capture -> page homography.
pub fn simulate_capture(page: &GrayImage, spec: &CaptureSpec) -> Result<(GrayImage, Homography)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (pw, ph) = (page.width() as f64, page.height() as f64);

    let ink = ink_bounds(page);
    let mut found = None;
    for _ in 0..MAX_ATTEMPTS {
        let area = spec.crop_fraction * pw * ph;
        let aspect = if spec.crop_fraction < 1.0 {
            pw / ph * rng.random_range(-ASPECT_SPREAD..=ASPECT_SPREAD).exp()
        } else {
            pw / ph
        };
        let w = (area * aspect).sqrt().round().clamp(1.0, pw);
        let h = (area / w).round().clamp(1.0, ph);
        let x0 = place(&mut rng, w, pw, ink.map(|r| (r.x0, r.x1)));
        let y0 = place(&mut rng, h, ph, ink.map(|r| (r.y0, r.y1)));

        let (s, c) = spec.rotation_deg.to_radians().sin_cos();
        let centre = Point::new(x0 + w / 2.0, y0 + h / 2.0);
        let capture_corners = [
            Point::new(0.0, 0.0),
            Point::new(w, 0.0),
            Point::new(w, h),
            Point::new(0.0, h),
        ];
        let mut page_corners = [Point::new(0.0, 0.0); 4];
        for (dst, src) in page_corners.iter_mut().zip(&capture_corners) {
            let (dx, dy) = (src.x - w / 2.0, src.y - h / 2.0);
            let (jx, jy) = if spec.jitter_px > 0.0 {
                (
                    rng.random_range(-spec.jitter_px..=spec.jitter_px),
                    rng.random_range(-spec.jitter_px..=spec.jitter_px),
                )
            } else {
                (0.0, 0.0)
            };
            *dst = Point::new(centre.x + c * dx - s * dy + jx, centre.y + s * dx + c * dy + jy);
        }
        let quad = RegionPolygon { vertices: page_corners.to_vec() };
        if !quad.is_convex() || quad.signed_area().abs() < 0.25 * w * h {
            continue;
        }
        let pairs: Vec<PointPair> = capture_corners
            .iter()
            .zip(&page_corners)
            .map(|(a, b)| PointPair::new(*a, *b))
            .collect();
        let Ok(h_true) = estimate_homography_ls(&pairs) else { continue };
        if h_true.inverse().is_err() {
            continue;
        }
        found = Some((h_true, w as u32, h as u32));
        break;
    }
    let (h_true, cw, ch) =
        found.ok_or_else(|| Error::Spec("no valid capture warp after bounded retries".into()))?;

    let mut capture = warp_perspective(page, &h_true.inverse()?, cw, ch)?;
    if spec.blur_sigma > 0.0 {
        capture = gaussian_blur(&capture, spec.blur_sigma)?;
    }
    let photometric = spec.gain != 1.0 || spec.offset != 0.0 || spec.noise_sigma > 0.0;
    if photometric {
        let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Spec(e.to_string()))?;
        for p in capture.pixels_mut() {
            let mut v = spec.gain * *p as f64 + spec.offset;
            if spec.noise_sigma > 0.0 {
                v += noise.sample(&mut rng);
            }
            *p = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok((capture, h_true))
}
