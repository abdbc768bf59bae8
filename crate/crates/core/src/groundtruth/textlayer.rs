use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};
use crate::geometry::Rect;

/// Allowed overhang of a character box beyond its word box, in pixels.
pub const CHAR_SLACK_PX: f64 = 1.0;

/// Machine-readable text of one page: words and characters with their boxes
/// in pixel coordinates at `dpi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextLayer {
    pub page_id: String,
    pub dpi: u32,
    pub words: Vec<LayerWord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerWord {
    pub text: String,
    pub bbox: Rect,
    pub chars: Vec<LayerChar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerChar {
    pub text: String,
    pub bbox: Rect,
}

fn escape_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

pub(crate) fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&escape_token(key)),
            Segment::Enum { variant } => out.push_str(&escape_token(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl TextLayer {
    /// Parse and validate a text layer from JSON.
    pub fn from_json(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let layer: TextLayer = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            pointer: json_pointer(e.path()),
            message: e.inner().to_string(),
        })?;
        layer.validate()?;
        Ok(layer)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("text layer serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |pointer: String, message: String| Err(Error::Consistency { pointer, message });
        if self.dpi == 0 {
            return fail("/dpi".into(), "dpi must be positive".into());
        }
        for (wi, w) in self.words.iter().enumerate() {
            if w.text.is_empty() {
                return fail(format!("/words/{wi}/text"), "empty word text".into());
            }
            if w.bbox.is_degenerate() {
                return fail(format!("/words/{wi}/bbox"), format!("degenerate box {:?}", w.bbox));
            }
            let mut concat = String::new();
            for (ci, c) in w.chars.iter().enumerate() {
                let at = format!("/words/{wi}/chars/{ci}");
                if c.text.graphemes(true).count() != 1 {
                    return fail(
                        format!("{at}/text"),
                        format!("{:?} is not a single grapheme", c.text),
                    );
                }
                if c.bbox.is_degenerate() {
                    return fail(format!("{at}/bbox"), format!("degenerate box {:?}", c.bbox));
                }
                if !w.bbox.contains_rect(&c.bbox, CHAR_SLACK_PX) {
                    return fail(
                        format!("{at}/bbox"),
                        format!("{:?} lies outside word box {:?}", c.bbox, w.bbox),
                    );
                }
                concat.push_str(&c.text);
            }
            if concat != w.text {
                return fail(
                    format!("/words/{wi}/chars"),
                    format!("characters spell {concat:?}, word is {:?}", w.text),
                );
            }
        }
        Ok(())
    }
}

/// Read and validate a text-layer JSON file.
pub fn parse_text_layer(path: impl AsRef<Path>) -> Result<TextLayer> {
    let path = path.as_ref();
    fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|s| TextLayer::from_json(&s))
        .map_err(|e| e.at(path))
}
