//! A bundled 5x7 bitmap font, scaled by nearest-neighbour sampling.
//!
//! Font size `s` maps to an ink height of `round(s / 1.5)` rows; every
//! alphanumeric glyph inks its top and bottom rows, so the ink extent of a
//! label is exactly that height.

const GLYPH_W: usize = 5;
const GLYPH_H: usize = 7;

fn glyph(c: char) -> Option<[u8; GLYPH_H]> {
    let rows = match c.to_ascii_uppercase() {
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        // punctuation does not span the cell; any string with one
        // alphanumeric still inks the full height
        '.' => [0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C],
        ',' => [0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08],
        '-' => [0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00],
        '+' => [0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00],
        ':' => [0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00],
        '/' => [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
        '\'' => [0x0C, 0x04, 0x08, 0x00, 0x00, 0x00, 0x00],
        ' ' => [0; GLYPH_H],
        _ => return None,
    };
    Some(rows)
}

pub fn supports(c: char) -> bool {
    glyph(c).is_some()
}

/// Ink height in pixels for a font size.
pub fn ink_height(font_size: u32) -> u32 {
    ((font_size as f64 / 1.5).round() as u32).max(3)
}

/// Font size whose ink height is `ink` rows.
pub fn font_size_for_ink(ink: u32) -> u32 {
    (ink as f64 * 1.5).round() as u32
}

fn metrics(ink_h: u32) -> (u32, u32) {
    let glyph_w = ((ink_h as f64 * GLYPH_W as f64 / GLYPH_H as f64).round() as u32).max(3);
    let gap = ((ink_h as f64 / GLYPH_H as f64).round() as u32).max(1);
    (glyph_w, gap)
}

/// Layout width of a string (cell extent, not tight ink).
pub fn text_width(text: &str, font_size: u32) -> u32 {
    let n = text.chars().count() as u32;
    if n == 0 {
        return 0;
    }
    let (gw, gap) = metrics(ink_height(font_size));
    n * gw + (n - 1) * gap
}

/// Rasterize `text` into a `width x height` cell grid (row-major bools),
/// where height is the ink height. Unsupported characters render blank.
pub fn rasterize_text(text: &str, font_size: u32) -> (u32, u32, Vec<bool>) {
    let h = ink_height(font_size);
    let (gw, gap) = metrics(h);
    let w = text_width(text, font_size).max(1);
    let mut bits = vec![false; (w * h) as usize];
    for (i, c) in text.chars().enumerate() {
        let rows = glyph(c).unwrap_or([0; GLYPH_H]);
        let x0 = i as u32 * (gw + gap);
        for y in 0..h {
            let gy = ((y as f64 + 0.5) * GLYPH_H as f64 / h as f64) as usize;
            let row = rows[gy.min(GLYPH_H - 1)];
            for x in 0..gw {
                let gx = ((x as f64 + 0.5) * GLYPH_W as f64 / gw as f64) as usize;
                let bit = (row >> (GLYPH_W - 1 - gx.min(GLYPH_W - 1))) & 1 == 1;
                if bit {
                    bits[(y * w + x0 + x) as usize] = true;
                }
            }
        }
    }
    (w, h, bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ink_height_roundtrips_through_font_size() {
        for ink in 3..40 {
            assert_eq!(ink_height(font_size_for_ink(ink)), ink);
        }
        assert_eq!(font_size_for_ink(ink_height(12)), 12);
    }

    #[test]
    fn every_glyph_inks_top_and_bottom_scanlines_or_is_blank() {
        for c in ('A'..='Z').chain('0'..='9') {
            let g = glyph(c).unwrap();
            assert!(g[0] != 0 && g[GLYPH_H - 1] != 0, "{c}");
        }
    }

    #[test]
    fn text_ink_spans_full_height() {
        for size in [6, 9, 12, 15, 18, 24] {
            let (w, h, bits) = rasterize_text("AB12", size);
            assert_eq!(h, ink_height(size));
            let row_has_ink = |y: u32| (0..w).any(|x| bits[(y * w + x) as usize]);
            assert!(row_has_ink(0) && row_has_ink(h - 1));
        }
    }
}
