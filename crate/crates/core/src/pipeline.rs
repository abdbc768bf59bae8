//! One capture from photo to labeled records: retrieve the page, estimate
//! and refine the capture -> page homography, normalize the capture, match
//! word blocks and cut the crops.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{mark_borders, match_words, word_blocks, MatchParams};
use crate::error::{Error, Result};
use crate::geometry::{
    box_polygon_relation, estimate_homography_ls, refine_homography_lm_report, reprojection_rmse,
    BoxRelation, Homography, LmSettings,
};
use crate::groundtruth::{
    extract_char_records, extract_word_records, GroundTruthRecord, Provenance, RecordImages,
    TextLayer,
};
use crate::imaging::{warp_perspective, GrayImage};
use crate::llah::{retrieve, DocId, LlahStore};

/// Pipeline settings other than the LLAH parameters, which live in the store.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineParams {
    #[serde(default)]
    pub matching: MatchParams,
    #[serde(default)]
    pub lm: LmSettings,
}

/// Records whose homography does not carry the quad back onto the box
/// within this many pixels are dropped.
pub const PROVENANCE_TOL: f64 = 1e-6;

/// An indexed page with its text layer.
#[derive(Clone, Debug)]
pub struct PageData {
    pub page_id: String,
    pub image: Arc<GrayImage>,
    pub layer: Arc<TextLayer>,
}

/// Supplies the page behind a retrieved document id.
pub trait PageSource: Sync {
    fn page(&self, doc_id: DocId) -> Result<PageData>;
}

/// Pages held in memory, indexed by document id.
impl PageSource for [PageData] {
    fn page(&self, doc_id: DocId) -> Result<PageData> {
        self.get(doc_id as usize)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no page for document {doc_id}")))
    }
}

impl PageSource for Vec<PageData> {
    fn page(&self, doc_id: DocId) -> Result<PageData> {
        self.as_slice().page(doc_id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptureStatus {
    Ok,
    NoMatch,
    Failed,
}

/// One line of the per-capture log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureLog {
    pub capture_id: String,
    pub status: CaptureStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<DocId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_id: Option<String>,
    pub score: u32,
    pub runner_up_score: u32,
    pub correspondences: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmse_dlt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmse_lm: Option<f64>,
    pub lm_iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homography: Option<Homography>,
    pub capture_blocks: usize,
    pub page_blocks: usize,
    pub matched: usize,
    pub border: usize,
    pub unlabeled: usize,
    pub clipped: usize,
    pub provenance_rejected: usize,
    pub word_records: usize,
    pub char_records: usize,
    pub chars_skipped: usize,
}

impl CaptureLog {
    fn new(capture_id: &str) -> Self {
        CaptureLog {
            capture_id: capture_id.to_string(),
            status: CaptureStatus::Ok,
            message: None,
            doc_id: None,
            page_id: None,
            score: 0,
            runner_up_score: 0,
            correspondences: 0,
            rmse_dlt: None,
            rmse_lm: None,
            lm_iterations: 0,
            homography: None,
            capture_blocks: 0,
            page_blocks: 0,
            matched: 0,
            border: 0,
            unlabeled: 0,
            clipped: 0,
            provenance_rejected: 0,
            word_records: 0,
            char_records: 0,
            chars_skipped: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaptureOutcome {
    pub log: CaptureLog,
    pub records: Vec<GroundTruthRecord>,
}

/// Run the full pipeline on one capture. Failures are reported in the log,
/// never as an error, so one bad capture does not stop a batch.
pub fn process_capture(
    capture_id: &str,
    capture: &GrayImage,
    store: &LlahStore,
    pages: &dyn PageSource,
    params: &PipelineParams,
) -> CaptureOutcome {
    let mut log = CaptureLog::new(capture_id);
    match run(capture_id, capture, store, pages, params, &mut log) {
        Ok(records) => CaptureOutcome { log, records },
        Err(e) => {
            log.status = match e {
                Error::NoMatch { .. } | Error::InsufficientPoints { .. } => CaptureStatus::NoMatch,
                _ => CaptureStatus::Failed,
            };
            log.message = Some(e.to_string());
            CaptureOutcome { log, records: Vec::new() }
        }
    }
}

fn run(
    capture_id: &str,
    capture: &GrayImage,
    store: &LlahStore,
    pages: &dyn PageSource,
    params: &PipelineParams,
    log: &mut CaptureLog,
) -> Result<Vec<GroundTruthRecord>> {
    let hit = retrieve(capture, store)?;
    log.doc_id = Some(hit.doc_id);
    log.score = hit.score;
    log.runner_up_score = hit.runner_up_score;
    log.correspondences = hit.correspondences.len();

    let h0 = estimate_homography_ls(&hit.correspondences)?;
    let lm = refine_homography_lm_report(&h0, &hit.correspondences, &params.lm)?;
    let h = lm.homography;
    log.rmse_dlt = Some(reprojection_rmse(&h0, &hit.correspondences));
    log.rmse_lm = Some(reprojection_rmse(&h, &hit.correspondences));
    log.lm_iterations = lm.iterations;
    log.homography = Some(h);

    let page = pages.page(hit.doc_id)?;
    log.page_id = Some(page.page_id.clone());
    let norm = warp_perspective(capture, &h, page.image.width(), page.image.height())?;

    let sigma = params.matching.smoothing_sigma;
    let capt_blocks = word_blocks(&norm, sigma)?;
    let ret_blocks: Vec<_> = word_blocks(&page.image, sigma)?
        .into_iter()
        .filter(|b| box_polygon_relation(&b.bbox, &hit.region) != BoxRelation::Outside)
        .collect();
    log.capture_blocks = capt_blocks.len();
    log.page_blocks = ret_blocks.len();

    let pairs = mark_borders(match_words(&capt_blocks, &ret_blocks, &params.matching), &hit.region);
    log.matched = pairs.len();
    log.border = pairs.iter().filter(|p| p.border).count();

    let provenance = Arc::new(Provenance {
        doc_id: hit.doc_id,
        page_id: page.page_id.clone(),
        capture_id: capture_id.to_string(),
        homography: h,
        params: serde_json::json!({
            "llah": store.params(),
            "matching": params.matching,
            "lm": params.lm,
        }),
    });
    let images = RecordImages {
        page: &page.image,
        norm: &norm,
        orig: capture,
    };
    let words = extract_word_records(&pairs, &page.layer, &images, &provenance)?;
    log.unlabeled = words.unlabeled.len();
    log.clipped = words.clipped.len();
    let (chars, skipped) = extract_char_records(&words.records, &page.layer, &images)?;
    log.chars_skipped = skipped;

    let mut records = Vec::with_capacity(words.records.len() + chars.len());
    for r in words.records.into_iter().chain(chars) {
        if r.verify_provenance(PROVENANCE_TOL).is_ok() {
            records.push(r);
        } else {
            log.provenance_rejected += 1;
        }
    }
    log.word_records = records.iter().filter(|r| r.char_index.is_none()).count();
    log.char_records = records.len() - log.word_records;
    Ok(records)
}

/// A capture to process: its id and a way to obtain the image.
pub struct CaptureInput<'a> {
    pub capture_id: String,
    pub load: Box<dyn Fn() -> Result<GrayImage> + Send + Sync + 'a>,
}

/// Process captures in parallel on `workers` threads (0 = all cores).
/// Outcomes keep the input order.
pub fn process_captures(
    captures: &[CaptureInput],
    store: &LlahStore,
    pages: &dyn PageSource,
    params: &PipelineParams,
    workers: usize,
) -> Result<Vec<CaptureOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| {
        captures
            .par_iter()
            .map(|c| match (c.load)() {
                Ok(img) => process_capture(&c.capture_id, &img, store, pages, params),
                Err(e) => {
                    let mut log = CaptureLog::new(&c.capture_id);
                    log.status = CaptureStatus::Failed;
                    log.message = Some(e.to_string());
                    CaptureOutcome { log, records: Vec::new() }
                }
            })
            .collect()
    }))
}
