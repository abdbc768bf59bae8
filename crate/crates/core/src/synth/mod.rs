//! Synthetic pages with exact text layers and simulated captures with
//! known homographies.

mod capture;
mod corpus;
mod font;
mod render;
mod vocab;

pub use capture::{simulate_capture, CaptureSpec};
pub use corpus::{
    capture_id, derive_seed, page_id, write_corpus, CaptureEntry, CaptureMeta, CaptureRegime,
    CorpusManifest, CorpusSpec, PageEntry, CORPUS_MANIFEST,
};
pub use font::{Glyph, CELL};
pub use render::{render_page, SynthPageSpec, Vocabulary};
pub use vocab::BUILTIN_WORDS;
