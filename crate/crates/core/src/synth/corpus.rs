use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{render_page, simulate_capture, CaptureSpec, SynthPageSpec};
use crate::error::{Error, Result};
use crate::geometry::Homography;
use crate::groundtruth::TextLayer;
use crate::imaging::{save_png, GrayImage};
use crate::llah::DocId;

/// Ranges from which capture distortions are drawn uniformly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaptureRegime {
    pub crop_fraction: [f64; 2],
    pub jitter_px: [f64; 2],
    pub rotation_deg: [f64; 2],
    pub blur_sigma: [f64; 2],
    pub gain: [f64; 2],
    pub offset: [f64; 2],
    pub noise_sigma: [f64; 2],
}

impl Default for CaptureRegime {
    fn default() -> Self {
        Self::mild()
    }
}

impl CaptureRegime {
    /// Moderate perspective, light blur.
    pub fn mild() -> Self {
        CaptureRegime {
            crop_fraction: [0.4, 0.8],
            jitter_px: [0.0, 20.0],
            rotation_deg: [-3.0, 3.0],
            blur_sigma: [0.5, 1.5],
            gain: [0.85, 1.1],
            offset: [-10.0, 15.0],
            noise_sigma: [0.0, 4.0],
        }
    }

    /// Large partial views, as used for retrieval queries.
    pub fn retrieval() -> Self {
        CaptureRegime {
            crop_fraction: [0.6, 0.8],
            jitter_px: [10.0, 20.0],
            ..Self::mild()
        }
    }

    pub fn severe_blur() -> Self {
        CaptureRegime {
            blur_sigma: [3.0, 3.0],
            ..Self::retrieval()
        }
    }

    pub fn sample(&self, seed: u64) -> CaptureSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |[lo, hi]: [f64; 2]| if hi > lo { rng.random_range(lo..=hi) } else { lo };
        CaptureSpec {
            crop_fraction: draw(self.crop_fraction),
            jitter_px: draw(self.jitter_px),
            rotation_deg: draw(self.rotation_deg),
            blur_sigma: draw(self.blur_sigma),
            gain: draw(self.gain),
            offset: draw(self.offset),
            noise_sigma: draw(self.noise_sigma),
            seed: rng.random(),
        }
    }
}

/// A corpus of synthetic pages with several captures each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub pages: usize,
    pub captures_per_page: usize,
    /// Template for every page; its seed and page id are replaced per page.
    pub page: SynthPageSpec,
    pub regime: CaptureRegime,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 1,
            pages: 10,
            captures_per_page: 3,
            page: SynthPageSpec::default(),
            regime: CaptureRegime::mild(),
        }
    }
}

/// SplitMix64 finalizer; spreads (seed, stream, index) into independent seeds.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn page_id(index: usize) -> String {
    format!("page-{index:04}")
}

pub fn capture_id(page: usize, capture: usize) -> String {
    format!("page-{page:04}-cap-{capture}")
}

impl CorpusSpec {
    /// Checks counts and that both ends of every regime range give a valid
    /// capture.
    pub fn validate(&self) -> Result<()> {
        if self.pages == 0 {
            return Err(Error::Spec("corpus needs at least one page".into()));
        }
        let r = &self.regime;
        let ranges = [
            r.crop_fraction,
            r.jitter_px,
            r.rotation_deg,
            r.blur_sigma,
            r.gain,
            r.offset,
            r.noise_sigma,
        ];
        if ranges.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(Error::Spec(format!("regime ranges must be finite with lo <= hi: {r:?}")));
        }
        for end in 0..2 {
            CaptureSpec {
                seed: 0,
                crop_fraction: r.crop_fraction[end],
                jitter_px: r.jitter_px[end],
                rotation_deg: r.rotation_deg[end],
                blur_sigma: r.blur_sigma[end],
                gain: r.gain[end],
                offset: r.offset[end],
                noise_sigma: r.noise_sigma[end],
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn page_spec(&self, index: usize) -> SynthPageSpec {
        SynthPageSpec {
            seed: derive_seed(self.seed, 1, index as u64),
            page_id: page_id(index),
            ..self.page.clone()
        }
    }

    pub fn capture_spec(&self, page: usize, capture: usize) -> CaptureSpec {
        let index = (page * self.captures_per_page.max(1) + capture) as u64;
        self.regime.sample(derive_seed(self.seed, 2, index))
    }

    pub fn render(&self, index: usize) -> Result<(GrayImage, TextLayer)> {
        render_page(&self.page_spec(index))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageEntry {
    pub doc_id: DocId,
    pub page_id: String,
    pub image: PathBuf,
    pub layer: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureEntry {
    pub capture_id: String,
    pub image: PathBuf,
    pub meta: PathBuf,
}

/// Sidecar of a simulated capture; `homography` maps capture to page pixels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureMeta {
    pub capture_id: String,
    pub doc_id: DocId,
    pub page_id: String,
    pub spec: CaptureSpec,
    pub homography: Homography,
}

/// Index of a corpus directory. Paths are relative to the directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub pages: Vec<PageEntry>,
    pub captures: Vec<CaptureEntry>,
}

pub const CORPUS_MANIFEST: &str = "corpus.json";

impl CorpusManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let read = || -> Result<Self> { Ok(serde_json::from_str(&fs::read_to_string(path)?)?) };
        read().map_err(|e| e.at(path))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::from(e).at(path))
}

/// Render the corpus into `out_dir` (pages/, captures/, corpus.json).
pub fn write_corpus(spec: &CorpusSpec, out_dir: &Path) -> Result<CorpusManifest> {
    spec.validate()?;
    let pages_dir = out_dir.join("pages");
    let caps_dir = out_dir.join("captures");
    fs::create_dir_all(&pages_dir).map_err(|e| Error::from(e).at(&pages_dir))?;
    fs::create_dir_all(&caps_dir).map_err(|e| Error::from(e).at(&caps_dir))?;

    let per_page: Vec<(PageEntry, Vec<CaptureEntry>)> = (0..spec.pages)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let (img, layer) = spec.render(i)?;
            let pid = page_id(i);
            let entry = PageEntry {
                doc_id: i as DocId,
                page_id: pid.clone(),
                image: PathBuf::from(format!("pages/{pid}.png")),
                layer: PathBuf::from(format!("pages/{pid}.json")),
            };
            save_png(&img, out_dir.join(&entry.image))?;
            write_json(&out_dir.join(&entry.layer), &layer)?;
            let mut caps = Vec::with_capacity(spec.captures_per_page);
            for j in 0..spec.captures_per_page {
                let cspec = spec.capture_spec(i, j);
                let (cap, h) = simulate_capture(&img, &cspec)?;
                let cid = capture_id(i, j);
                let ce = CaptureEntry {
                    capture_id: cid.clone(),
                    image: PathBuf::from(format!("captures/{cid}.png")),
                    meta: PathBuf::from(format!("captures/{cid}.json")),
                };
                save_png(&cap, out_dir.join(&ce.image))?;
                let meta = CaptureMeta {
                    capture_id: cid,
                    doc_id: entry.doc_id,
                    page_id: pid.clone(),
                    spec: cspec,
                    homography: h,
                };
                write_json(&out_dir.join(&ce.meta), &meta)?;
                caps.push(ce);
            }
            Ok((entry, caps))
        })
        .collect::<Result<_>>()?;

    let mut manifest = CorpusManifest::default();
    for (p, caps) in per_page {
        manifest.pages.push(p);
        manifest.captures.extend(caps);
    }
    write_json(&out_dir.join(CORPUS_MANIFEST), &manifest)?;
    Ok(manifest)
}
