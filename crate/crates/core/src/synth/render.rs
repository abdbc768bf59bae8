use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::font::{Glyph, CELL};
use super::vocab::BUILTIN_WORDS;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::groundtruth::{LayerChar, LayerWord, TextLayer};
use crate::imaging::{GrayImage, BACKGROUND, FOREGROUND};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vocabulary {
    Builtin,
    Words(Vec<String>),
}

/// Parameters of one synthetic page. Output is a pure function of the spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthPageSpec {
    pub seed: u64,
    pub page_id: String,
    /// Words to place; placement stops early if the page is full.
    pub words: usize,
    /// Font size range in points; one size is drawn per page.
    pub font_size_pt: [f64; 2],
    pub page_width: u32,
    pub page_height: u32,
    pub dpi: u32,
    pub vocabulary: Vocabulary,
}

impl Default for SynthPageSpec {
    fn default() -> Self {
        SynthPageSpec {
            seed: 0,
            page_id: "page-0000".into(),
            words: 200,
            font_size_pt: [6.0, 6.5],
            page_width: 1240,
            page_height: 1754,
            dpi: 300,
            vocabulary: Vocabulary::Builtin,
        }
    }
}

/// Minimum clearance between letters, word gap range and line pitch, in
/// font pixels.
const LETTER_GAP: u32 = 1;
const WORD_GAP: (u32, u32) = (4, 7);
const LINE_PITCH: u32 = 12;
const PARAGRAPH_GAP: u32 = 6;
const PARAGRAPH_PROB: f64 = 0.03;

/// Left ink offsets of successive glyphs, in font pixels.
///
/// Each glyph sits as far left as it can while keeping `LETTER_GAP` clear
/// of every earlier glyph's ink in the same and adjacent rows, so letters
/// tuck under overhangs the way kerned type does. A glyph always starts
/// right of its predecessor's start and ends right of its end.
fn kern<'a>(glyphs: impl Iterator<Item = &'a Glyph>) -> Vec<u32> {
    let mut placed: Vec<(&Glyph, i64)> = Vec::new();
    for g in glyphs {
        let mut off = match placed.last() {
            None => 0,
            Some(&(p, po)) => (po + 1).max(po + p.width() as i64 - g.width() as i64 + 1),
        };
        for &(p, po) in &placed {
            for r in g.row0..=g.row1 {
                let Some((gl, _)) = row_span(g, r) else { continue };
                for pr in r.saturating_sub(1)..=(r + 1).min(CELL - 1) {
                    if let Some((_, pright)) = row_span(p, pr) {
                        off = off.max(po + pright + 1 + LETTER_GAP as i64 - gl);
                    }
                }
            }
        }
        placed.push((g, off));
    }
    placed.iter().map(|&(_, o)| o as u32).collect()
}

/// Leftmost and rightmost inked column of a row, relative to the ink box.
fn row_span(g: &Glyph, row: u32) -> Option<(i64, i64)> {
    let cols: Vec<u32> = (g.col0..=g.col1).filter(|&c| g.ink(c, row)).collect();
    Some(((*cols.first()? - g.col0) as i64, (*cols.last()? - g.col0) as i64))
}

/// Render a page of words in the embedded bitmap font together with the
/// exact ink boxes of every word and character.
pub fn render_page(spec: &SynthPageSpec) -> Result<(GrayImage, TextLayer)> {
    let vocab: Vec<String> = match &spec.vocabulary {
        Vocabulary::Builtin => BUILTIN_WORDS.iter().map(|s| s.to_string()).collect(),
        Vocabulary::Words(w) => w.clone(),
    };
    if vocab.is_empty() {
        return Err(Error::Spec("vocabulary is empty".into()));
    }
    for w in &vocab {
        if w.is_empty() || w.chars().any(|c| Glyph::lookup(c).is_none()) {
            return Err(Error::Spec(format!("word {w:?} cannot be drawn with the embedded font")));
        }
    }
    let [lo, hi] = spec.font_size_pt;
    if !(lo > 0.0 && lo <= hi) || spec.dpi == 0 || spec.page_width == 0 || spec.page_height == 0 {
        return Err(Error::Spec("invalid page geometry or font size range".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pt = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let scale = ((pt * spec.dpi as f64 / 72.0 / CELL as f64).round() as u32).max(1);

    let mut img = GrayImage::filled(spec.page_width, spec.page_height, BACKGROUND);
    let mut words = Vec::new();
    let (w, h) = (spec.page_width, spec.page_height);
    let (left, right) = (w / 20, w - w / 20);
    let bottom = h - h / 20;
    let mut pen_x = left;
    let mut top = h / 20;

    for _ in 0..spec.words {
        let text = &vocab[rng.random_range(0..vocab.len())];
        let glyphs: Vec<(char, Glyph)> = text.chars().map(|c| (c, Glyph::lookup(c).unwrap())).collect();
        let offsets = kern(glyphs.iter().map(|(_, g)| g));
        let width = (offsets.last().unwrap() + glyphs.last().unwrap().1.width()) * scale;
        if pen_x + width > right {
            if pen_x == left {
                return Err(Error::Spec(format!("page too narrow for the word {text:?}")));
            }
            pen_x = left;
            top += LINE_PITCH * scale;
        }
        if top + CELL * scale > bottom {
            if words.is_empty() {
                return Err(Error::Spec("page too small for a single line of text".into()));
            }
            break;
        }

        let mut chars = Vec::with_capacity(glyphs.len());
        for ((c, g), off) in glyphs.iter().zip(&offsets) {
            let x = pen_x + off * scale;
            for row in g.row0..=g.row1 {
                for col in g.col0..=g.col1 {
                    if !g.ink(col, row) {
                        continue;
                    }
                    let px = x + (col - g.col0) * scale;
                    let py = top + row * scale;
                    for dy in 0..scale {
                        for dx in 0..scale {
                            img.set(px + dx, py + dy, FOREGROUND);
                        }
                    }
                }
            }
            chars.push(LayerChar {
                text: c.to_string(),
                bbox: Rect::new(
                    x as f64,
                    (top + g.row0 * scale) as f64,
                    (x + g.width() * scale) as f64,
                    (top + (g.row1 + 1) * scale) as f64,
                ),
            });
        }
        let bbox = chars.iter().skip(1).fold(chars[0].bbox, |acc, c| {
            Rect::new(
                acc.x0.min(c.bbox.x0),
                acc.y0.min(c.bbox.y0),
                acc.x1.max(c.bbox.x1),
                acc.y1.max(c.bbox.y1),
            )
        });
        words.push(LayerWord {
            text: text.clone(),
            bbox,
            chars,
        });

        pen_x += width + rng.random_range(WORD_GAP.0..=WORD_GAP.1) * scale;
        if rng.random_bool(PARAGRAPH_PROB) {
            pen_x = left + rng.random_range(0..=3) * 4 * scale;
            top += (LINE_PITCH + PARAGRAPH_GAP) * scale;
        }
    }

    let layer = TextLayer {
        page_id: spec.page_id.clone(),
        dpi: spec.dpi,
        words,
    };
    layer.validate()?;
    Ok((img, layer))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_page_has_exactly_its_glyph_pixels() {
        let spec = SynthPageSpec {
            words: 1,
            vocabulary: Vocabulary::Words(vec!["to".into()]),
            page_width: 300,
            page_height: 200,
            font_size_pt: [6.0, 6.0],
            ..Default::default()
        };
        let (img, layer) = render_page(&spec).unwrap();
        assert_eq!(layer.words.len(), 1);
        assert_eq!(layer.words[0].text, "to");
        let scale = 3u32; // round(6 * 300 / 72 / 8) = round(3.125)
        let expected: u32 = "to"
            .chars()
            .map(|c| {
                let g = Glyph::lookup(c).unwrap();
                g.rows.iter().map(|r| r.count_ones()).sum::<u32>() * scale * scale
            })
            .sum();
        let ink = img.pixels().iter().filter(|&&p| p == FOREGROUND).count() as u32;
        assert_eq!(ink, expected);
        assert!(img.pixels().iter().all(|&p| p == FOREGROUND || p == BACKGROUND));
        // All ink lies inside the word box.
        let b = layer.words[0].bbox;
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(x, y) == FOREGROUND {
                    assert!(b.contains_point(&crate::geometry::Point::new(x as f64, y as f64)));
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = SynthPageSpec {
            seed: 42,
            words: 60,
            ..Default::default()
        };
        let a = render_page(&spec).unwrap();
        let b = render_page(&spec).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = render_page(&SynthPageSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn page_too_small() {
        let spec = SynthPageSpec {
            page_width: 20,
            page_height: 20,
            ..Default::default()
        };
        assert!(matches!(render_page(&spec), Err(Error::Spec(_))));
    }

    #[test]
    fn default_page_holds_two_hundred_words() {
        let (_, layer) = render_page(&SynthPageSpec::default()).unwrap();
        assert_eq!(layer.words.len(), 200);
    }
}
