//! Embedded 8x8 bitmap glyphs, rendered proportionally.

use font8x8::{UnicodeFonts, BASIC_FONTS};

/// Glyph cell height in font pixels.
pub const CELL: u32 = 8;

/// Ink extent of one glyph within its 8x8 cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Glyph {
    pub rows: [u8; 8],
    pub col0: u32,
    pub col1: u32,
    pub row0: u32,
    pub row1: u32,
}

impl Glyph {
    pub fn lookup(c: char) -> Option<Glyph> {
        let rows = BASIC_FONTS.get(c)?;
        let cols = rows.iter().fold(0u8, |acc, r| acc | r);
        if cols == 0 {
            return None;
        }
        let inked: Vec<u32> = (0..CELL).filter(|&r| rows[r as usize] != 0).collect();
        Some(Glyph {
            rows,
            col0: cols.trailing_zeros(),
            col1: 7 - cols.leading_zeros(),
            row0: inked[0],
            row1: *inked.last().unwrap(),
        })
    }

    /// Ink width in font pixels.
    pub fn width(&self) -> u32 {
        self.col1 - self.col0 + 1
    }

    /// Bit 0 of each row byte is the leftmost column.
    pub fn ink(&self, col: u32, row: u32) -> bool {
        self.rows[row as usize] & (1 << col) != 0
    }
}
