//! Bbox-local binary masks, their run-length encoding, and the Euclidean
//! morphology used by segmentation and the detection simulator.

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// Binary grid stored bbox-local, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height, bits: vec![false; width as usize * height as usize] }
    }

    pub fn filled(width: u32, height: u32) -> Self {
        Self { width, height, bits: vec![true; width as usize * height as usize] }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::InvalidMask(format!(
                "expected {} bits for {width}x{height}, got {}",
                width as usize * height as usize,
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    /// Out-of-grid coordinates read as `false`.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as u64) < self.width as u64
            && (y as u64) < self.height as u64
            && self.get(x as u32, y as u32)
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn matches_bbox(&self, bbox: &BBox) -> bool {
        self.width == bbox.width && self.height == bbox.height
    }

    /// Tight box around the set bits, in local coordinates.
    pub fn content_bbox(&self) -> Option<BBox> {
        if self.is_empty() {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x + 1);
                    y1 = y1.max(y + 1);
                }
            }
        }
        BBox::from_extents(x0 as i32, y0 as i32, x1 as i32, y1 as i32)
    }

    /// Sub-grid `[x, x+w) x [y, y+h)`; out-of-grid cells read as unset.
    pub fn crop(&self, x: i64, y: i64, width: u32, height: u32) -> PixelMask {
        PixelMask::from_fn(width, height, |cx, cy| self.get_signed(x + cx as i64, y + cy as i64))
    }

    /// Re-express a mask anchored at `from` in the frame of `to`.
    pub fn reanchor(&self, from: &BBox, to: &BBox) -> PixelMask {
        self.crop((to.left - from.left) as i64, (to.top - from.top) as i64, to.width, to.height)
    }

    pub fn union(&self, other: &PixelMask) -> Result<PixelMask> {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &PixelMask) -> Result<PixelMask> {
        self.zip(other, |a, b| a && b)
    }

    fn zip(&self, other: &PixelMask, f: impl Fn(bool, bool) -> bool) -> Result<PixelMask> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::InvalidMask(format!(
                "dimension mismatch {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        Ok(PixelMask { width: self.width, height: self.height, bits })
    }

    /// Row-major runs of alternating 0/1 counts, starting with a (possibly
    /// zero) run of 0s.
    pub fn encode_rle(&self) -> Vec<u32> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut count = 0u32;
        for &b in &self.bits {
            if b != current {
                runs.push(count);
                current = b;
                count = 0;
            }
            count += 1;
        }
        runs.push(count);
        runs
    }

    pub fn decode_rle(width: u32, height: u32, runs: &[u32]) -> Result<PixelMask> {
        let total = width as u64 * height as u64;
        let mut bits = Vec::with_capacity(total as usize);
        let mut value = false;
        for (i, &run) in runs.iter().enumerate() {
            if run == 0 && i > 0 {
                return Err(Error::MalformedRle(format!("zero-length run at index {i}")));
            }
            if bits.len() as u64 + run as u64 > total {
                return Err(Error::MalformedRle(format!("runs exceed {width}x{height} = {total} pixels")));
            }
            bits.extend(std::iter::repeat(value).take(run as usize));
            value = !value;
        }
        if bits.len() as u64 != total {
            return Err(Error::MalformedRle(format!("runs cover {} of {total} pixels", bits.len())));
        }
        Ok(PixelMask { width, height, bits })
    }

    /// Squared Euclidean distance from every cell to the nearest cell whose
    /// value equals `target`. Cells outside the grid count as `target` when
    /// `outside_is_target` is set.
    pub fn squared_distance_to(&self, target: bool, outside_is_target: bool) -> Vec<f64> {
        let pad = usize::from(outside_is_target);
        let (w, h) = (self.width as usize + 2 * pad, self.height as usize + 2 * pad);
        let mut grid = vec![f64::INFINITY; w * h];
        for y in 0..h {
            for x in 0..w {
                let inside = x >= pad && y >= pad && x - pad < self.width as usize && y - pad < self.height as usize;
                let hit = if inside { self.get((x - pad) as u32, (y - pad) as u32) == target } else { true };
                if hit {
                    grid[y * w + x] = 0.0;
                }
            }
        }
        squared_edt(&mut grid, w, h);
        let mut out = Vec::with_capacity(self.bits.len());
        for y in 0..self.height as usize {
            for x in 0..self.width as usize {
                out.push(grid[(y + pad) * w + x + pad]);
            }
        }
        out
    }

    /// Keep cells whose distance to the nearest unset cell (outside counts as
    /// unset) exceeds `radius`.
    pub fn erode(&self, radius: f64) -> PixelMask {
        let d = self.squared_distance_to(false, true);
        let r2 = radius * radius;
        PixelMask { width: self.width, height: self.height, bits: d.iter().map(|&v| v > r2).collect() }
    }

    /// Set cells within `radius` of a set cell. The grid does not grow.
    pub fn dilate(&self, radius: f64) -> PixelMask {
        let d = self.squared_distance_to(true, false);
        let r2 = radius * radius;
        PixelMask { width: self.width, height: self.height, bits: d.iter().map(|&v| v <= r2).collect() }
    }
}

/// Felzenszwalb-Huttenlocher separable squared distance transform, in place.
/// Zero cells are sources; infinite cells are free.
fn squared_edt(grid: &mut [f64], w: usize, h: usize) {
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..h], &mut d[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = d[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        edt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&d[..w]);
    }
}

fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let finite: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if finite.is_empty() {
        d.iter_mut().for_each(|x| *x = f64::INFINITY);
        return;
    }
    let mut k = 0usize;
    v[0] = finite[0];
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for &q in &finite[1..] {
        let intersect = |p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
        let mut s = intersect(v[k]);
        // z[0] is -inf, so this stops at k == 0
        while s <= z[k] {
            k -= 1;
            s = intersect(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

/// IoU of two masks placed in absolute coordinates by their boxes.
pub fn anchored_mask_iou(a_box: &BBox, a: &PixelMask, b_box: &BBox, b: &PixelMask) -> f64 {
    let inter = match a_box.intersection(b_box) {
        Some(region) => region
            .pixels()
            .filter(|&(x, y)| {
                a.get((x - a_box.left) as u32, (y - a_box.top) as u32)
                    && b.get((x - b_box.left) as u32, (y - b_box.top) as u32)
            })
            .count(),
        None => 0,
    };
    let union = a.count_ones() + b.count_ones() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_sq_dist(m: &PixelMask, target: bool, outside: bool) -> Vec<f64> {
        let (w, h) = (m.width() as i64, m.height() as i64);
        let r = if outside { 1 } else { 0 };
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let mut best = f64::INFINITY;
                for qy in -r..h + r {
                    for qx in -r..w + r {
                        let inside = qx >= 0 && qy >= 0 && qx < w && qy < h;
                        let hit = if inside { m.get(qx as u32, qy as u32) == target } else { outside };
                        if hit {
                            let d = ((qx - x).pow(2) + (qy - y).pow(2)) as f64;
                            best = best.min(d);
                        }
                    }
                }
                out.push(best);
            }
        }
        out
    }

    #[test]
    fn rle_fixed_cases() {
        for m in [PixelMask::new(4, 4), PixelMask::filled(4, 4)] {
            let runs = m.encode_rle();
            assert_eq!(PixelMask::decode_rle(4, 4, &runs).unwrap(), m);
        }
        assert_eq!(PixelMask::new(4, 4).encode_rle(), vec![16]);
        assert_eq!(PixelMask::filled(4, 4).encode_rle(), vec![0, 16]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = PixelMask::from_fn(64, 64, |_, _| rng.gen_bool(0.5));
        assert_eq!(PixelMask::decode_rle(64, 64, &m.encode_rle()).unwrap(), m);
    }

    #[test]
    fn rle_rejects_corrupt_runs() {
        assert!(matches!(PixelMask::decode_rle(2, 2, &[3]), Err(Error::MalformedRle(_))));
        assert!(matches!(PixelMask::decode_rle(2, 2, &[3, 2]), Err(Error::MalformedRle(_))));
        assert!(matches!(PixelMask::decode_rle(2, 2, &[2, 0, 2]), Err(Error::MalformedRle(_))));
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let (w, h) = (rng.gen_range(1..14), rng.gen_range(1..14));
            let p = rng.gen_range(0.1..0.9);
            let m = PixelMask::from_fn(w, h, |_, _| rng.gen_bool(p));
            for (target, outside) in [(false, true), (true, false), (false, false)] {
                assert_eq!(m.squared_distance_to(target, outside), brute_sq_dist(&m, target, outside));
            }
        }
    }

    #[test]
    fn erosion_of_full_mask_removes_two_pixel_ring() {
        let e = PixelMask::filled(10, 8).erode(2.0);
        assert_eq!(e.content_bbox(), Some(BBox::new(2, 2, 6, 4)));
        assert_eq!(e.count_ones(), 24);
        assert_eq!(PixelMask::new(5, 5).content_bbox(), None);
    }

    #[test]
    fn anchored_iou_with_full_masks_is_box_iou() {
        let a = BBox::new(0, 0, 10, 10);
        let b = BBox::new(0, 5, 10, 10);
        let v = anchored_mask_iou(&a, &PixelMask::filled(10, 10), &b, &PixelMask::filled(10, 10));
        assert_eq!(v, 1.0 / 3.0);
    }

    proptest! {
        #[test]
        fn rle_roundtrip(w in 1u32..24, h in 1u32..24, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = PixelMask::from_fn(w, h, |_, _| rng.gen_bool(0.3));
            prop_assert_eq!(PixelMask::decode_rle(w, h, &m.encode_rle()).unwrap(), m);
        }
    }
}
