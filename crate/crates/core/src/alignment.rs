//! Word blocks on the page and on the normalized capture, and their
//! one-to-one matching by centroid distance and width difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_polygon_relation, BoxRelation, Point, Rect, RegionPolygon};
use crate::imaging::{binarize_otsu, gaussian_blur, label_components, GrayImage, FOREGROUND};

/// Blobs below this many pixels are noise, not words.
pub const MIN_BLOCK_PIXELS: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordBox {
    pub bbox: Rect,
    pub centroid: Point,
    pub width: f64,
}

impl WordBox {
    pub fn new(bbox: Rect) -> Self {
        WordBox {
            bbox,
            centroid: bbox.center(),
            width: bbox.width(),
        }
    }

    pub fn d_centroid(&self, other: &WordBox) -> f64 {
        self.centroid.dist(&other.centroid)
    }

    pub fn d_width(&self, other: &WordBox) -> f64 {
        (self.width - other.width).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchParams {
    /// Centroid distance must be strictly below this, in pixels.
    pub theta_c: f64,
    /// Width difference must be strictly below this, in pixels.
    pub theta_w: f64,
    /// Blur applied before word-block extraction, in pixels.
    pub smoothing_sigma: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            theta_c: 5.0,
            theta_w: 5.0,
            smoothing_sigma: 4.0,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if pos(self.theta_c) && pos(self.theta_w) && pos(self.smoothing_sigma) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("match parameters must be positive: {self:?}")))
        }
    }

    /// Both gates, with strict inequalities.
    pub fn accepts(&self, capt: &WordBox, ret: &WordBox) -> bool {
        capt.d_centroid(ret) < self.theta_c && capt.d_width(ret) < self.theta_w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordPair {
    /// Box in the normalized capture (page coordinates).
    pub capt: WordBox,
    /// Box on the electronic page.
    pub ret: WordBox,
    pub border: bool,
}

/// Word boxes of `img`.
///
/// The blurred image, binarized, groups glyphs into blocks; each block's box
/// is the tight extent of the unblurred ink inside it, so it does not grow
/// with the blur. Blocks are in label (raster) order.
pub fn word_blocks(img: &GrayImage, smoothing_sigma: f64) -> Result<Vec<WordBox>> {
    let ink = binarize_otsu(img);
    let mask = binarize_otsu(&gaussian_blur(img, smoothing_sigma)?);
    let (labels, blobs) = label_components(&mask)?;
    let w = img.width() as usize;
    let mut extents: Vec<Option<[usize; 4]>> = vec![None; blobs.len()];
    for (idx, (&p, &label)) in ink.pixels().iter().zip(&labels).enumerate() {
        if p != FOREGROUND || label == 0 {
            continue;
        }
        let (x, y) = (idx % w, idx / w);
        let e = &mut extents[label as usize - 1];
        *e = Some(match *e {
            None => [x, y, x + 1, y + 1],
            Some([x0, y0, x1, y1]) => [x0.min(x), y0.min(y), x1.max(x + 1), y1.max(y + 1)],
        });
    }
    Ok(blobs
        .iter()
        .zip(extents)
        .filter(|(b, _)| b.pixel_count >= MIN_BLOCK_PIXELS)
        .filter_map(|(_, e)| e)
        .map(|[x0, y0, x1, y1]| WordBox::new(Rect::new(x0 as f64, y0 as f64, x1 as f64, y1 as f64)))
        .collect())
}

/// One-to-one matching of capture boxes to page boxes.
///
/// Every pair passing both gates is a candidate; candidates are taken
/// greedily by ascending centroid distance, then width difference, then
/// reading order (y, then x) of the page box and of the capture box.
pub fn match_words(capt: &[WordBox], ret: &[WordBox], params: &MatchParams) -> Vec<WordPair> {
    let mut cands: Vec<(f64, f64, usize, usize)> = Vec::new();
    for (ci, c) in capt.iter().enumerate() {
        for (ri, r) in ret.iter().enumerate() {
            if params.accepts(c, r) {
                cands.push((c.d_centroid(r), c.d_width(r), ci, ri));
            }
        }
    }
    let reading = |p: &Point| (p.y, p.x);
    cands.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| {
                let (ra, rb) = (reading(&ret[a.3].centroid), reading(&ret[b.3].centroid));
                ra.0.total_cmp(&rb.0).then(ra.1.total_cmp(&rb.1))
            })
            .then_with(|| {
                let (ca, cb) = (reading(&capt[a.2].centroid), reading(&capt[b.2].centroid));
                ca.0.total_cmp(&cb.0).then(ca.1.total_cmp(&cb.1))
            })
            .then((a.2, a.3).cmp(&(b.2, b.3)))
    });

    let mut capt_used = vec![false; capt.len()];
    let mut ret_used = vec![false; ret.len()];
    let mut pairs = Vec::new();
    for (_, _, ci, ri) in cands {
        if capt_used[ci] || ret_used[ri] {
            continue;
        }
        capt_used[ci] = true;
        ret_used[ri] = true;
        pairs.push(WordPair {
            capt: capt[ci],
            ret: ret[ri],
            border: false,
        });
    }
    pairs
}

/// Flag pairs whose page box is not strictly inside the retrieved region.
pub fn mark_borders(mut pairs: Vec<WordPair>, region: &RegionPolygon) -> Vec<WordPair> {
    for p in &mut pairs {
        p.border = box_polygon_relation(&p.ret.bbox, region) != BoxRelation::Inside;
    }
    pairs
}
