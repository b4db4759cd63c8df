//! Point-sampled rasterization of vector primitives.
//!
//! A pixel is covered when its center lies inside the shape, which is the
//! same set as ">= 50% coverage" for the axis-aligned and convex shapes drawn
//! here up to ties on the boundary. No antialiasing is applied, so a painted
//! bitmap is exactly recoverable from its element masks.

pub mod font;
pub mod icons;

use image::{Rgb as Pixel, RgbImage, RgbaImage};

use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::Rgb;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rect {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
    },
    Ellipse {
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
    },
    /// Even-odd fill.
    Polygon(Vec<(f64, f64)>),
    /// Points within `r` of the segment `a`-`b`.
    Capsule {
        a: (f64, f64),
        b: (f64, f64),
        r: f64,
    },
    Union(Vec<Shape>),
    Difference(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn polyline(points: &[(f64, f64)], half_width: f64) -> Shape {
        Shape::Union(points.windows(2).map(|w| Shape::Capsule { a: w[0], b: w[1], r: half_width }).collect())
    }

    pub fn contains(&self, px: f64, py: f64) -> bool {
        match self {
            Shape::Rect { x, y, w, h } => px >= *x && px < x + w && py >= *y && py < y + h,
            Shape::Ellipse { cx, cy, rx, ry } => {
                let dx = (px - cx) / rx;
                let dy = (py - cy) / ry;
                dx * dx + dy * dy <= 1.0
            }
            Shape::Polygon(pts) => point_in_polygon(pts, px, py),
            Shape::Capsule { a, b, r } => segment_distance_sq(*a, *b, (px, py)) <= r * r,
            Shape::Union(parts) => parts.iter().any(|s| s.contains(px, py)),
            Shape::Difference(keep, cut) => keep.contains(px, py) && !cut.contains(px, py),
        }
    }

    /// `(x0, y0, x1, y1)` in continuous coordinates.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Shape::Rect { x, y, w, h } => (*x, *y, x + w, y + h),
            Shape::Ellipse { cx, cy, rx, ry } => (cx - rx, cy - ry, cx + rx, cy + ry),
            Shape::Polygon(pts) => pts
                .iter()
                .fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |(a, b, c, d), &(x, y)| {
                    (a.min(x), b.min(y), c.max(x), d.max(y))
                }),
            Shape::Capsule { a, b, r } => (a.0.min(b.0) - r, a.1.min(b.1) - r, a.0.max(b.0) + r, a.1.max(b.1) + r),
            Shape::Union(parts) => parts.iter().map(Shape::bounds).fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |(a, b, c, d), (x0, y0, x1, y1)| (a.min(x0), b.min(y0), c.max(x1), d.max(y1)),
            ),
            Shape::Difference(keep, _) => keep.bounds(),
        }
    }

    pub fn rasterize(&self) -> Option<Coverage> {
        let (x0, y0, x1, y1) = self.bounds();
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite()) {
            return None;
        }
        let (ix0, iy0) = (x0.floor() as i32 - 1, y0.floor() as i32 - 1);
        let (ix1, iy1) = (x1.ceil() as i32 + 1, y1.ceil() as i32 + 1);
        let (w, h) = ((ix1 - ix0) as u32, (iy1 - iy0) as u32);
        let mask =
            PixelMask::from_fn(w, h, |x, y| self.contains(ix0 as f64 + x as f64 + 0.5, iy0 as f64 + y as f64 + 0.5));
        Coverage::new(BBox::new(iy0, ix0, w, h), mask).tight()
    }
}

fn point_in_polygon(pts: &[(f64, f64)], px: f64, py: f64) -> bool {
    let mut inside = false;
    let n = pts.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (xi, yi) = pts[i];
        let (xj, yj) = pts[j];
        if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn segment_distance_sq(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    cx * cx + cy * cy
}

/// A mask anchored in absolute pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub bbox: BBox,
    pub mask: PixelMask,
}

impl Coverage {
    pub fn new(bbox: BBox, mask: PixelMask) -> Self {
        debug_assert!(mask.matches_bbox(&bbox));
        Self { bbox, mask }
    }

    pub fn contains(&self, x: i32, y: i32) -> bool {
        self.bbox.contains_pixel(x, y) && self.mask.get((x - self.bbox.left) as u32, (y - self.bbox.top) as u32)
    }

    /// Shrink to the tight box of the set pixels; `None` when empty.
    pub fn tight(self) -> Option<Coverage> {
        let inner = self.mask.content_bbox()?;
        let mask = self.mask.crop(inner.left as i64, inner.top as i64, inner.width, inner.height);
        Some(Coverage { bbox: inner.translate(self.bbox.left, self.bbox.top), mask })
    }

    pub fn translate(&self, dx: i32, dy: i32) -> Coverage {
        Coverage { bbox: self.bbox.translate(dx, dy), mask: self.mask.clone() }
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn pixels(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.bbox.pixels().filter(move |&(x, y)| self.contains(x, y))
    }

    /// Remove pixels covered by `other`.
    pub fn subtract(&self, other: &Coverage) -> Option<Coverage> {
        let mask = PixelMask::from_fn(self.bbox.width, self.bbox.height, |x, y| {
            let (ax, ay) = (self.bbox.left + x as i32, self.bbox.top + y as i32);
            self.mask.get(x, y) && !other.contains(ax, ay)
        });
        Coverage::new(self.bbox, mask).tight()
    }

    pub fn overlaps(&self, other: &Coverage) -> bool {
        match self.bbox.intersection(&other.bbox) {
            Some(region) => region.pixels().any(|(x, y)| self.contains(x, y) && other.contains(x, y)),
            None => false,
        }
    }

    pub fn paint(&self, image: &mut RgbImage, color: Rgb) {
        for (x, y) in self.pixels() {
            if x >= 0 && y >= 0 && (x as u32) < image.width() && (y as u32) < image.height() {
                image.put_pixel(x as u32, y as u32, Pixel(color));
            }
        }
    }

    /// Anchored text ink with its top-left ink pixel at `(left, top)`.
    pub fn text(text: &str, font_size: u32, left: i32, top: i32) -> Option<Coverage> {
        let (w, h, bits) = font::rasterize_text(text, font_size);
        let mask = PixelMask::from_bits(w, h, bits).ok()?;
        Coverage::new(BBox::new(top, left, w, h), mask).tight()
    }
}

/// Composite an RGBA patch (alpha 0 or 255) at `(left, top)`.
pub fn blit_patch(image: &mut RgbImage, patch: &RgbaImage, left: i32, top: i32) {
    for (px, py, p) in patch.enumerate_pixels() {
        if p.0[3] < 128 {
            continue;
        }
        let (x, y) = (left + px as i32, top + py as i32);
        if x >= 0 && y >= 0 && (x as u32) < image.width() && (y as u32) < image.height() {
            image.put_pixel(x as u32, y as u32, Pixel([p.0[0], p.0[1], p.0[2]]));
        }
    }
}

pub fn luminance(c: Rgb) -> f64 {
    0.299 * c[0] as f64 + 0.587 * c[1] as f64 + 0.114 * c[2] as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_rasterizes_to_exact_pixels() {
        let c = Shape::Rect { x: 2.0, y: 3.0, w: 4.0, h: 5.0 }.rasterize().unwrap();
        assert_eq!(c.bbox, BBox::new(3, 2, 4, 5));
        assert_eq!(c.count(), 20);
    }

    #[test]
    fn disk_is_symmetric_and_tight() {
        let c = Shape::Ellipse { cx: 20.0, cy: 20.0, rx: 10.0, ry: 10.0 }.rasterize().unwrap();
        assert_eq!(c.bbox, BBox::new(10, 10, 20, 20));
        let m = &c.mask;
        for y in 0..20 {
            for x in 0..20 {
                assert_eq!(m.get(x, y), m.get(19 - x, y));
                assert_eq!(m.get(x, y), m.get(x, 19 - y));
            }
        }
    }

    #[test]
    fn subtract_and_overlap() {
        let a = Shape::Rect { x: 0.0, y: 0.0, w: 10.0, h: 4.0 }.rasterize().unwrap();
        let b = Shape::Rect { x: 5.0, y: 0.0, w: 10.0, h: 4.0 }.rasterize().unwrap();
        assert!(a.overlaps(&b));
        let d = a.subtract(&b).unwrap();
        assert_eq!(d.bbox, BBox::new(0, 0, 5, 4));
        assert!(!d.overlaps(&b));
    }
}
