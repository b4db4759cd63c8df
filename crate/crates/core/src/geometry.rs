//! Pixel-grid boxes.
//!
//! A [`BBox`] covers the discrete pixel set
//! `{(x, y) : left <= x < left + width, top <= y < top + height}`; every
//! overlap measure in the crate is computed on those sets, never on
//! continuous areas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box, serialized as `[top, left, width, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct BBox {
    pub top: i32,
    pub left: i32,
    pub width: u32,
    pub height: u32,
}

impl BBox {
    /// Panics when `width` or `height` is zero; use [`BBox::try_new`] for
    /// untrusted input.
    pub fn new(top: i32, left: i32, width: u32, height: u32) -> Self {
        Self::try_new(top, left, width, height).expect("bbox with zero extent")
    }

    pub fn try_new(top: i32, left: i32, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidBBox(format!("width and height must be >= 1, got {width}x{height}")));
        }
        Ok(Self { top, left, width, height })
    }

    /// Smallest box covering the half-open pixel range `[x0, x1) x [y0, y1)`.
    pub fn from_extents(x0: i32, y0: i32, x1: i32, y1: i32) -> Option<Self> {
        if x1 <= x0 || y1 <= y0 {
            return None;
        }
        Some(Self { top: y0, left: x0, width: (x1 - x0) as u32, height: (y1 - y0) as u32 })
    }

    #[inline]
    pub fn right(&self) -> i32 {
        self.left + self.width as i32
    }

    #[inline]
    pub fn bottom(&self) -> i32 {
        self.top + self.height as i32
    }

    #[inline]
    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn center(&self) -> (f64, f64) {
        (self.left as f64 + self.width as f64 / 2.0, self.top as f64 + self.height as f64 / 2.0)
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.width as f64 / self.height as f64
    }

    pub fn contains_pixel(&self, x: i32, y: i32) -> bool {
        x >= self.left && x < self.right() && y >= self.top && y < self.bottom()
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        BBox::from_extents(
            self.left.max(other.left),
            self.top.max(other.top),
            self.right().min(other.right()),
            self.bottom().min(other.bottom()),
        )
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        self.intersection(other).map_or(0, |b| b.area())
    }

    /// Grow (or shrink, for negative `by`) on every side. Returns `None` if the
    /// result would be empty.
    pub fn expand(&self, by: i32) -> Option<BBox> {
        BBox::from_extents(self.left - by, self.top - by, self.right() + by, self.bottom() + by)
    }

    /// Clip to the `[0, width) x [0, height)` image frame.
    pub fn clip_to(&self, width: u32, height: u32) -> Option<BBox> {
        BBox::from_extents(
            self.left.max(0),
            self.top.max(0),
            self.right().min(width as i32),
            self.bottom().min(height as i32),
        )
    }

    pub fn translate(&self, dx: i32, dy: i32) -> BBox {
        BBox { left: self.left + dx, top: self.top + dy, ..*self }
    }

    /// Iterate covered pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (self.top..self.bottom()).flat_map(move |y| (self.left..self.right()).map(move |x| (x, y)))
    }

    pub fn to_array(&self) -> [i64; 4] {
        [self.top as i64, self.left as i64, self.width as i64, self.height as i64]
    }
}

impl TryFrom<[i64; 4]> for BBox {
    type Error = Error;

    fn try_from([top, left, width, height]: [i64; 4]) -> Result<Self> {
        let coord =
            |v: i64, name: &str| i32::try_from(v).map_err(|_| Error::InvalidBBox(format!("{name} out of range: {v}")));
        let extent = |v: i64, name: &str| {
            u32::try_from(v)
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::InvalidBBox(format!("{name} must be >= 1, got {v}")))
        };
        Ok(BBox {
            top: coord(top, "top")?,
            left: coord(left, "left")?,
            width: extent(width, "width")?,
            height: extent(height, "height")?,
        })
    }
}

impl From<BBox> for [i64; 4] {
    fn from(b: BBox) -> Self {
        b.to_array()
    }
}

/// Intersection over union of the two covered pixel sets.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Minimal box covering both pixel sets.
pub fn union_bbox(a: &BBox, b: &BBox) -> BBox {
    BBox {
        left: a.left.min(b.left),
        top: a.top.min(b.top),
        width: (a.right().max(b.right()) - a.left.min(b.left)) as u32,
        height: (a.bottom().max(b.bottom()) - a.top.min(b.top)) as u32,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn pixel_set(b: &BBox) -> HashSet<(i32, i32)> {
        b.pixels().collect()
    }

    fn brute_iou(a: &BBox, b: &BBox) -> f64 {
        let (pa, pb) = (pixel_set(a), pixel_set(b));
        let inter = pa.intersection(&pb).count();
        let union = pa.union(&pb).count();
        inter as f64 / union as f64
    }

    fn brute_hull(a: &BBox, b: &BBox) -> BBox {
        let all: Vec<_> = a.pixels().chain(b.pixels()).collect();
        let x0 = all.iter().map(|p| p.0).min().unwrap();
        let x1 = all.iter().map(|p| p.0).max().unwrap() + 1;
        let y0 = all.iter().map(|p| p.1).min().unwrap();
        let y1 = all.iter().map(|p| p.1).max().unwrap() + 1;
        BBox::from_extents(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = BBox::new(0, 0, 10, 10);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BBox::new(100, 100, 5, 5)), 0.0);
        let b = BBox::new(0, 5, 10, 10);
        assert_eq!(brute_iou(&a, &b), 1.0 / 3.0);
        assert_eq!(iou(&a, &b), 1.0 / 3.0);
    }

    #[test]
    fn union_examples() {
        let a = BBox::new(0, 0, 10, 10);
        assert_eq!(union_bbox(&a, &a), a);
        assert_eq!(union_bbox(&a, &BBox::new(5, 5, 10, 10)), BBox::new(0, 0, 15, 15));
        let (c, d) = (BBox::new(2, 3, 4, 5), BBox::new(0, 0, 1, 1));
        assert_eq!(brute_hull(&c, &d), BBox::new(0, 0, 7, 7));
        assert_eq!(union_bbox(&c, &d), brute_hull(&c, &d));
    }

    #[test]
    fn rejects_zero_extent() {
        assert!(BBox::try_new(0, 0, 0, 3).is_err());
        assert!(BBox::try_from([0, 0, 3, -1]).is_err());
        let b: BBox = serde_json::from_str("[3,5,40,20]").unwrap();
        assert_eq!(b, BBox::new(3, 5, 40, 20));
        assert!(serde_json::from_str::<BBox>("[3,5,0,20]").is_err());
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0i32..64, 0i32..64, 1u32..=32, 1u32..=32).prop_map(|(t, l, w, h)| BBox::new(t, l, w, h))
    }

    proptest! {
        #[test]
        fn iou_matches_pixel_enumeration(a in arb_box(), b in arb_box()) {
            let v = iou(&a, &b);
            prop_assert_eq!(v, brute_iou(&a, &b));
            prop_assert_eq!(v, iou(&b, &a));
            prop_assert_eq!(v == 0.0, pixel_set(&a).is_disjoint(&pixel_set(&b)));
        }

        #[test]
        fn union_is_hull_and_associative(a in arb_box(), b in arb_box(), c in arb_box()) {
            prop_assert_eq!(union_bbox(&a, &b), brute_hull(&a, &b));
            prop_assert_eq!(union_bbox(&a, &b), union_bbox(&b, &a));
            prop_assert_eq!(
                union_bbox(&union_bbox(&a, &b), &c),
                union_bbox(&a, &union_bbox(&b, &c))
            );
        }
    }
}
