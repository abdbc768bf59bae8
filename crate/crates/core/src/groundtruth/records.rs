use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::TextLayer;
use crate::alignment::WordPair;
use crate::error::{Error, Result};
use crate::geometry::{inverse_transform_box, Homography, Rect};
use crate::imaging::{crop, crop_quad, GrayImage, PixelRect, Quad};
use crate::llah::DocId;

/// A page box must overlap its text-layer word by more than this IoU.
pub const MIN_LABEL_IOU: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Word,
    Char,
}

/// Where a record came from. `homography` maps the original capture into
/// page coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub doc_id: DocId,
    pub page_id: String,
    pub capture_id: String,
    pub homography: Homography,
    pub params: serde_json::Value,
}

/// The three rasters a capture contributes crops from.
pub struct RecordImages<'a> {
    /// Electronic page.
    pub page: &'a GrayImage,
    /// Capture warped into page coordinates.
    pub norm: &'a GrayImage,
    /// Capture as taken.
    pub orig: &'a GrayImage,
}

/// One labeled word or character.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthRecord {
    pub kind: RecordKind,
    pub text: String,
    /// Index of the word in the text layer.
    pub word_index: usize,
    /// Index of the character within its word, for character records.
    pub char_index: Option<usize>,
    /// Crop of the electronic page; words only.
    pub gt_crop: Option<GrayImage>,
    /// Text-layer box on the page; words only.
    pub gt_bbox: Option<Rect>,
    pub norm_crop: GrayImage,
    /// Box of the normalized crop, in page coordinates.
    pub norm_bbox: Rect,
    /// `norm_bbox` mapped back into the original capture.
    pub orig_quad: Quad,
    pub orig_crop: GrayImage,
    pub border: bool,
    pub provenance: Arc<Provenance>,
}

impl GroundTruthRecord {
    pub fn record_id(&self) -> String {
        let cap = &self.provenance.capture_id;
        match self.char_index {
            None => format!("{cap}-w{:04}", self.word_index),
            Some(c) => format!("{cap}-w{:04}-c{c:02}", self.word_index),
        }
    }

    /// Check that the provenance homography carries `orig_quad` back onto
    /// `norm_bbox` within `tol` pixels.
    pub fn verify_provenance(&self, tol: f64) -> Result<()> {
        let h = &self.provenance.homography;
        for (q, b) in self.orig_quad.corners.iter().zip(self.norm_bbox.corners()) {
            let p = h.project(q)?;
            if !(p.dist(&b) <= tol) {
                return Err(Error::NumericalFailure(format!(
                    "record {}: quad corner maps to {p:?}, box corner is {b:?}",
                    self.record_id()
                )));
            }
        }
        let images_ok = self.norm_crop.width() > 0
            && self.orig_crop.width() > 0
            && (self.kind == RecordKind::Char) == self.gt_crop.is_none();
        if !images_ok || self.text.is_empty() {
            return Err(Error::InvalidInput(format!("record {} is incomplete", self.record_id())));
        }
        Ok(())
    }
}

/// Records built from one capture plus the pairs that could not be labeled.
#[derive(Clone, Debug, Default)]
pub struct WordExtraction {
    pub records: Vec<GroundTruthRecord>,
    /// Indices of pairs whose page box matched no text-layer word.
    pub unlabeled: Vec<usize>,
    /// Indices of pairs whose crops fell outside a raster.
    pub clipped: Vec<usize>,
}

/// Index of the layer word with the largest IoU against `bbox`, if that IoU
/// exceeds [`MIN_LABEL_IOU`] and is not shared with another word.
pub fn label_for_box(layer: &TextLayer, bbox: &Rect) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    let mut tied = false;
    for (i, w) in layer.words.iter().enumerate() {
        let iou = w.bbox.iou(bbox);
        match best {
            Some((_, b)) if iou == b => tied = true,
            Some((_, b)) if iou < b => {}
            _ => {
                best = Some((i, iou));
                tied = false;
            }
        }
    }
    match best {
        Some((i, iou)) if iou > MIN_LABEL_IOU && !tied => Some(i),
        _ => None,
    }
}

fn orig_view(norm_bbox: &Rect, images: &RecordImages, h: &Homography) -> Result<(Quad, GrayImage)> {
    let quad = inverse_transform_box(norm_bbox, h)?;
    let crop = crop_quad(images.orig, &quad)?;
    Ok((quad, crop))
}

/// Label each word pair from the text layer and cut its three crops.
pub fn extract_word_records(
    pairs: &[WordPair],
    layer: &TextLayer,
    images: &RecordImages,
    provenance: &Arc<Provenance>,
) -> Result<WordExtraction> {
    let h = &provenance.homography;
    let mut out = WordExtraction::default();
    for (pi, pair) in pairs.iter().enumerate() {
        let Some(wi) = label_for_box(layer, &pair.ret.bbox) else {
            out.unlabeled.push(pi);
            continue;
        };
        let word = &layer.words[wi];
        let norm_bbox = pair.capt.bbox;
        let crops = (|| -> Result<_> {
            let gt = crop(images.page, &PixelRect::enclosing(&word.bbox))?;
            let norm = crop(images.norm, &PixelRect::enclosing(&norm_bbox))?;
            let (quad, orig) = orig_view(&norm_bbox, images, h)?;
            Ok((gt, norm, quad, orig))
        })();
        let (gt, norm, quad, orig) = match crops {
            Ok(c) => c,
            Err(Error::EmptyRegion) => {
                out.clipped.push(pi);
                continue;
            }
            Err(e) => return Err(e),
        };
        out.records.push(GroundTruthRecord {
            kind: RecordKind::Word,
            text: word.text.clone(),
            word_index: wi,
            char_index: None,
            gt_crop: Some(gt),
            gt_bbox: Some(word.bbox),
            norm_crop: norm,
            norm_bbox,
            orig_quad: quad,
            orig_crop: orig,
            border: pair.border,
            provenance: Arc::clone(provenance),
        });
    }
    Ok(out)
}

/// Character records for every labeled word, using the text layer's
/// character boxes. Returns the records and the number of characters skipped
/// because their box fell outside a raster.
pub fn extract_char_records(
    words: &[GroundTruthRecord],
    layer: &TextLayer,
    images: &RecordImages,
) -> Result<(Vec<GroundTruthRecord>, usize)> {
    let mut records = Vec::new();
    let mut skipped = 0;
    for w in words.iter().filter(|w| w.kind == RecordKind::Word) {
        let h = &w.provenance.homography;
        let word = layer.words.get(w.word_index).ok_or_else(|| {
            Error::InvalidInput(format!("word index {} not in text layer", w.word_index))
        })?;
        for (ci, ch) in word.chars.iter().enumerate() {
            let crops = crop(images.norm, &PixelRect::enclosing(&ch.bbox))
                .and_then(|norm| orig_view(&ch.bbox, images, h).map(|(q, o)| (norm, q, o)));
            let (norm, quad, orig) = match crops {
                Ok(c) => c,
                Err(Error::EmptyRegion) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            records.push(GroundTruthRecord {
                kind: RecordKind::Char,
                text: ch.text.clone(),
                word_index: w.word_index,
                char_index: Some(ci),
                gt_crop: None,
                gt_bbox: None,
                norm_crop: norm,
                norm_bbox: ch.bbox,
                orig_quad: quad,
                orig_crop: orig,
                border: w.border,
                provenance: Arc::clone(&w.provenance),
            });
        }
    }
    Ok((records, skipped))
}
