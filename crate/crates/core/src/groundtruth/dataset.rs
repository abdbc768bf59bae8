use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::records::{GroundTruthRecord, Provenance, RecordKind};
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::imaging::{save_png, Quad};
use crate::llah::DocId;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";
/// Present while a dataset is being written; removed after the manifest.
pub const PARTIAL_MARKER: &str = ".partial";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// 60/10/30 split keyed by a SHA-256 of the word's identity, so a word and
/// its characters always land together.
pub fn split_for(doc_id: DocId, page_id: &str, capture_id: &str, word_index: usize) -> Split {
    let mut h = Sha256::new();
    h.update(doc_id.to_le_bytes());
    for part in [page_id.as_bytes(), capture_id.as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.update((word_index as u64).to_le_bytes());
    let digest = h.finalize();
    let v = u64::from_le_bytes(digest[..8].try_into().unwrap()) % 100;
    match v {
        0..60 => Split::Train,
        60..70 => Split::Val,
        _ => Split::Test,
    }
}

fn record_split(r: &GroundTruthRecord) -> Split {
    let p = &r.provenance;
    split_for(p.doc_id, &p.page_id, &p.capture_id, r.word_index)
}

/// Per-record metadata stored as `meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordMeta {
    pub id: String,
    pub kind: RecordKind,
    pub text: String,
    pub split: Split,
    pub border: bool,
    pub word_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_bbox: Option<Rect>,
    pub norm_bbox: Rect,
    pub orig_quad: Quad,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub words: usize,
    pub chars: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: KindCounts,
    pub val: KindCounts,
    pub test: KindCounts,
}

impl SplitCounts {
    pub fn get(&self, s: Split) -> KindCounts {
        match s {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    fn get_mut(&mut self, s: Split) -> &mut KindCounts {
        match s {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
            Split::Test => &mut self.test,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub kind: RecordKind,
    pub split: Split,
    pub border: bool,
    /// Directory of the record, relative to the dataset root.
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field that differs between
    /// otherwise identical runs.
    pub generated_at: u64,
    pub params: serde_json::Value,
    pub counts: SplitCounts,
    pub records: Vec<ManifestRecord>,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let read = || -> Result<Self> { Ok(serde_json::from_str(&fs::read_to_string(path)?)?) };
        read().map_err(|e| e.at(path))
    }
}

fn kind_dir(kind: RecordKind) -> &'static str {
    match kind {
        RecordKind::Word => "words",
        RecordKind::Char => "chars",
    }
}

fn write_record(root: &Path, rel: &Path, meta: &RecordMeta, r: &GroundTruthRecord) -> Result<()> {
    let dir = root.join(rel);
    fs::create_dir_all(&dir).map_err(|e| Error::from(e).at(&dir))?;
    if let Some(gt) = &r.gt_crop {
        save_png(gt, dir.join("gt.png"))?;
    }
    save_png(&r.norm_crop, dir.join("norm.png"))?;
    save_png(&r.orig_crop, dir.join("orig.png"))?;
    let meta_path = dir.join("meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(meta)? + "\n")
        .map_err(|e| Error::from(e).at(&meta_path))?;
    let txt = dir.join("gt.txt");
    fs::write(&txt, &r.text).map_err(|e| Error::from(e).at(&txt))
}

/// Write records into `out_dir/{train,val,test}/{words,chars}/<id>/` and the
/// manifest last. A `.partial` marker stays behind if writing fails.
pub fn emit_dataset(
    records: &[GroundTruthRecord],
    params: &serde_json::Value,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    for name in [MANIFEST_FILE, "train", "val", "test"] {
        if out_dir.join(name).exists() {
            return Err(Error::InvalidInput(format!(
                "{} already holds a dataset ({name} exists)",
                out_dir.display()
            )));
        }
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::from(e).at(out_dir))?;
    let marker = out_dir.join(PARTIAL_MARKER);
    fs::write(&marker, b"").map_err(|e| Error::from(e).at(&marker))?;

    let mut entries: Vec<(ManifestRecord, RecordMeta, &GroundTruthRecord)> = records
        .iter()
        .map(|r| {
            let id = r.record_id();
            let split = record_split(r);
            let path = PathBuf::from(split.dir_name()).join(kind_dir(r.kind)).join(&id);
            let meta = RecordMeta {
                id: id.clone(),
                kind: r.kind,
                text: r.text.clone(),
                split,
                border: r.border,
                word_index: r.word_index,
                char_index: r.char_index,
                gt_bbox: r.gt_bbox,
                norm_bbox: r.norm_bbox,
                orig_quad: r.orig_quad,
                provenance: (*r.provenance).clone(),
            };
            let entry = ManifestRecord { id, kind: r.kind, split, border: r.border, path };
            (entry, meta, r)
        })
        .collect();
    entries.sort_by(|a, b| a.0.path.cmp(&b.0.path));
    let mut seen = BTreeSet::new();
    for (e, ..) in &entries {
        if !seen.insert(&e.path) {
            return Err(Error::InvalidInput(format!("duplicate record id {}", e.id)));
        }
    }

    entries
        .par_iter()
        .try_for_each(|(e, meta, r)| write_record(out_dir, &e.path, meta, r))?;

    let mut counts = SplitCounts::default();
    for (e, ..) in &entries {
        let c = counts.get_mut(e.split);
        match e.kind {
            RecordKind::Word => c.words += 1,
            RecordKind::Char => c.chars += 1,
        }
    }
    let manifest = DatasetManifest {
        tool_version: TOOL_VERSION.to_string(),
        generated_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        params: params.clone(),
        counts,
        records: entries.into_iter().map(|(e, ..)| e).collect(),
    };
    let path = out_dir.join(MANIFEST_FILE);
    let tmp = out_dir.join(format!("{MANIFEST_FILE}.tmp"));
    fs::write(&tmp, serde_json::to_string_pretty(&manifest)? + "\n")
        .map_err(|e| Error::from(e).at(&tmp))?;
    fs::rename(&tmp, &path).map_err(|e| Error::from(e).at(&path))?;
    fs::remove_file(&marker).map_err(|e| Error::from(e).at(&marker))?;
    Ok(manifest)
}
