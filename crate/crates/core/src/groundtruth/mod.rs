//! Text layers, labeled word/character records and dataset emission.

mod dataset;
mod records;
mod textlayer;
pub(crate) use textlayer::json_pointer;

pub use dataset::{
    emit_dataset, split_for, DatasetManifest, KindCounts, ManifestRecord, RecordMeta, Split,
    SplitCounts, MANIFEST_FILE, PARTIAL_MARKER, TOOL_VERSION,
};
pub use records::{
    extract_char_records, extract_word_records, label_for_box, GroundTruthRecord, Provenance,
    RecordImages, RecordKind, WordExtraction, MIN_LABEL_IOU,
};
pub use textlayer::{parse_text_layer, LayerChar, LayerWord, TextLayer, CHAR_SLACK_PX};
