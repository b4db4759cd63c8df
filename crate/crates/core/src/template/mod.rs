//! Extensible templates: reusable pixel patches, updatable text and icon
//! slots, and per-event groupings recovered from a deconstructed timeline.

mod hooks;
mod wire;

use std::collections::HashMap;

use image::{RgbImage, Rgba, RgbaImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::{Detection, ElementCategory, GlobalInfo, Orientation, Representation, Rgb};
use crate::raster::{blit_patch, font, luminance};
use crate::reconstruct::cluster_events;
use crate::scale::layout_rows;
use crate::segment::{refine_detection, RefineConfig};

pub use hooks::ExternalCommand;
pub use wire::{load_template, save_template};

pub const SCHEMA_VERSION: u32 = 1;

/// Luminance spread below which a region is treated as flat.
const MIN_CONTRAST: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FontInfo {
    pub size: u32,
    pub color: Rgb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    Title,
    Body,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReusableElement {
    pub category: ElementCategory,
    pub bbox: BBox,
    /// bbox-local.
    pub mask: PixelMask,
    /// RGBA crop of the element, transparent outside the mask.
    pub patch: RgbaImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdatableElement {
    pub category: ElementCategory,
    pub bbox: BBox,
    pub font: Option<FontInfo>,
    /// Foreground color for icons.
    pub color: Option<Rgb>,
    pub role: Option<TextRole>,
    /// Recognized text, when an OCR hook is configured.
    pub text: Option<String>,
    pub patch: Option<RgbaImage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementRef {
    Reusable(usize),
    Updatable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotMember {
    pub element: ElementRef,
    /// Member top-left minus anchor top-left.
    pub offset: (i32, i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSlot {
    /// Index into `reusable` of the event mark.
    pub anchor: usize,
    pub members: Vec<SlotMember>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateDoc {
    pub schema_version: u32,
    pub global: GlobalInfo,
    /// `(width, height)` of the source image.
    pub canvas: (u32, u32),
    pub background: Rgb,
    pub reusable: Vec<ReusableElement>,
    pub updatable: Vec<UpdatableElement>,
    /// In data order.
    pub event_slots: Vec<EventSlot>,
    /// Slot indices per axis row, rows in drawing order and each row
    /// ordered along the axis.
    pub rows: Vec<Vec<usize>>,
}

impl TemplateDoc {
    pub fn anchor_box(&self, slot: usize) -> BBox {
        self.reusable[self.event_slots[slot].anchor].bbox
    }

    pub fn element_bbox(&self, r: ElementRef) -> BBox {
        match r {
            ElementRef::Reusable(i) => self.reusable[i].bbox,
            ElementRef::Updatable(i) => self.updatable[i].bbox,
        }
    }

    pub fn element_category(&self, r: ElementRef) -> ElementCategory {
        match r {
            ElementRef::Reusable(i) => self.reusable[i].category,
            ElementRef::Updatable(i) => self.updatable[i].category,
        }
    }

    /// Structural invariants; `Error::Schema` names the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::schema("schema_version", format!("unsupported version {}", self.schema_version)));
        }
        self.global.validate().map_err(|e| Error::schema("global", e.to_string()))?;
        for (i, r) in self.reusable.iter().enumerate() {
            let at = |f: &str| format!("reusable[{i}].{f}");
            if !r.category.is_reusable() {
                return Err(Error::schema(at("category"), format!("{} is not reusable", r.category)));
            }
            if !r.mask.matches_bbox(&r.bbox) {
                return Err(Error::schema(at("mask_rle"), "mask does not match bbox"));
            }
            if r.patch.dimensions() != (r.bbox.width, r.bbox.height) {
                return Err(Error::schema(at("patch_png"), "patch does not match bbox"));
            }
        }
        for (i, u) in self.updatable.iter().enumerate() {
            let at = |f: &str| format!("updatable[{i}].{f}");
            if !u.category.is_updatable() {
                return Err(Error::schema(at("category"), format!("{} is not updatable", u.category)));
            }
            if let Some(f) = &u.font {
                if f.size < 4 {
                    return Err(Error::schema(at("font.size"), format!("size {} below 4 px", f.size)));
                }
            }
            if let Some(p) = &u.patch {
                if p.dimensions() != (u.bbox.width, u.bbox.height) {
                    return Err(Error::schema(at("patch_png"), "patch does not match bbox"));
                }
            }
        }
        for (s, slot) in self.event_slots.iter().enumerate() {
            match self.reusable.get(slot.anchor) {
                Some(r) if r.category == ElementCategory::EventMark => {}
                _ => {
                    return Err(Error::schema(
                        format!("event_slots[{s}].anchor"),
                        format!("{} is not an event mark", slot.anchor),
                    ))
                }
            }
            for (m, member) in slot.members.iter().enumerate() {
                let ok = match member.element {
                    ElementRef::Reusable(i) => i < self.reusable.len(),
                    ElementRef::Updatable(i) => i < self.updatable.len(),
                };
                if !ok {
                    return Err(Error::schema(
                        format!("event_slots[{s}].members[{m}].element"),
                        "reference out of range",
                    ));
                }
            }
        }
        let mut seen = vec![false; self.event_slots.len()];
        for (r, row) in self.rows.iter().enumerate() {
            for &s in row {
                match seen.get_mut(s) {
                    Some(flag) if !*flag => *flag = true,
                    _ => return Err(Error::schema(format!("rows[{r}]"), format!("bad slot index {s}"))),
                }
            }
        }
        if seen.iter().any(|&f| !f) {
            return Err(Error::schema("rows", "every slot must appear in exactly one row"));
        }
        Ok(())
    }
}

/// Hooks and refinement applied during extraction.
#[derive(Debug, Clone, Default)]
pub struct ExtractOptions {
    /// Re-segment reusable elements before cutting patches.
    pub refine: Option<RefineConfig>,
    /// Command that maps a text patch PNG to a font family name.
    pub font_family: Option<ExternalCommand>,
    /// Command that maps a text patch PNG to its text.
    pub ocr: Option<ExternalCommand>,
}

pub fn extract_template(image: &RgbImage, global: GlobalInfo, dets: &[Detection]) -> Result<TemplateDoc> {
    extract_template_with(image, global, dets, &ExtractOptions::default())
}

pub fn extract_template_with(
    image: &RgbImage,
    global: GlobalInfo,
    dets: &[Detection],
    options: &ExtractOptions,
) -> Result<TemplateDoc> {
    global.validate()?;
    let dets: Vec<Detection> = match &options.refine {
        Some(cfg) => dets
            .iter()
            .map(|d| if d.category.is_reusable() { refine_detection(image, d, cfg) } else { d.clone() })
            .collect(),
        None => dets.to_vec(),
    };
    let clusters = match cluster_events(&dets, global.orientation) {
        Ok(c) => c,
        Err(Error::NoElements) => return Err(Error::NoEvents),
        Err(e) => return Err(e),
    };
    if clusters.is_empty() {
        return Err(Error::NoEvents);
    }

    let text_cover: Vec<(BBox, PixelMask)> =
        dets.iter().filter(|d| d.category.is_text()).map(|d| (d.bbox, d.mask_or_box())).collect();
    let mark_extent = dets
        .iter()
        .filter(|d| d.category == ElementCategory::EventMark)
        .map(|d| d.bbox.width.max(d.bbox.height))
        .max()
        .unwrap_or(0);

    let mut reusable = Vec::new();
    let mut updatable = Vec::new();
    let mut refs = Vec::with_capacity(dets.len());
    for d in &dets {
        if d.category.is_reusable() {
            let mut mask = d.mask_or_box();
            if d.category != ElementCategory::MainBody {
                mask = exclude_text(&d.bbox, &mask, &text_cover);
            }
            let mut patch = cut_patch(image, &d.bbox, &mask);
            if d.category == ElementCategory::MainBody && global.representation == Representation::Linear {
                mask = fill_body_gaps(&mut patch, &mask, global.orientation, mark_extent);
            }
            refs.push(ElementRef::Reusable(reusable.len()));
            reusable.push(ReusableElement { category: d.category, bbox: d.bbox, mask, patch });
        } else {
            refs.push(ElementRef::Updatable(updatable.len()));
            updatable.push(updatable_element(image, d, options));
        }
    }

    let mut slots = Vec::new();
    let mut anchor_dets = Vec::new();
    for c in &clusters {
        let Some(a) = c.anchor else { continue };
        let ElementRef::Reusable(anchor) = refs[a] else { unreachable!("event marks are reusable") };
        let ab = dets[a].bbox;
        let members = c
            .members
            .iter()
            .filter(|&&m| m != a)
            .map(|&m| SlotMember { element: refs[m], offset: (dets[m].bbox.left - ab.left, dets[m].bbox.top - ab.top) })
            .collect();
        slots.push(EventSlot { anchor, members });
        anchor_dets.push(a);
    }
    let anchor_boxes: Vec<BBox> = anchor_dets.iter().map(|&a| dets[a].bbox).collect();
    let (mut order, rows) = order_slots(&global, &anchor_boxes);
    if global.orientation == Orientation::Other {
        let path: Vec<&Detection> = dets
            .iter()
            .filter(|d| d.category == ElementCategory::MainBody)
            .chain(anchor_dets.iter().map(|&a| &dets[a]))
            .collect();
        let anchors: Vec<&Detection> = anchor_dets.iter().map(|&a| &dets[a]).collect();
        if let Some(o) = path_order(image.dimensions(), &path, &anchors) {
            order = o;
        }
    }
    let event_slots: Vec<EventSlot> = order.iter().map(|&i| slots[i].clone()).collect();

    for slot in &event_slots {
        let texts: Vec<(usize, BBox, FontInfo)> = slot
            .members
            .iter()
            .filter_map(|m| match m.element {
                ElementRef::Updatable(i) => updatable[i].font.clone().map(|f| (i, updatable[i].bbox, f)),
                ElementRef::Reusable(_) => None,
            })
            .collect();
        let pairs: Vec<(BBox, FontInfo)> = texts.iter().map(|(_, b, f)| (*b, f.clone())).collect();
        for ((i, _, _), role) in texts.iter().zip(split_title_body(&pairs)) {
            updatable[*i].role = Some(role);
        }
    }

    let doc = TemplateDoc {
        schema_version: SCHEMA_VERSION,
        global,
        canvas: image.dimensions(),
        background: mode_color(image),
        reusable,
        updatable,
        event_slots,
        rows,
    };
    debug_assert!(doc.validate().is_ok());
    Ok(doc)
}

fn updatable_element(image: &RgbImage, d: &Detection, options: &ExtractOptions) -> UpdatableElement {
    let split = separate_foreground(image, &d.bbox).ok();
    let alpha = d.mask.clone().or_else(|| split.as_ref().map(|s| s.fg.clone()));
    let patch = alpha.map(|m| cut_patch(image, &d.bbox, &m));
    let mut font = None;
    let mut color = None;
    if d.category.is_text() {
        font = split.as_ref().map(FgSplit::font);
        if let (Some(f), Some(cmd), Some(p)) = (font.as_mut(), &options.font_family, &patch) {
            f.family = cmd.run_on_png(p);
        }
    } else {
        color = split.as_ref().map(|s| s.color);
    }
    let text = match (&options.ocr, &patch) {
        (Some(cmd), Some(p)) if d.category.is_text() => cmd.run_on_png(p),
        _ => None,
    };
    UpdatableElement { category: d.category, bbox: d.bbox, font, color, role: None, text, patch }
}

fn cut_patch(image: &RgbImage, bbox: &BBox, mask: &PixelMask) -> RgbaImage {
    RgbaImage::from_fn(bbox.width, bbox.height, |x, y| {
        let (ix, iy) = (bbox.left + x as i32, bbox.top + y as i32);
        let inside = ix >= 0 && iy >= 0 && (ix as u32) < image.width() && (iy as u32) < image.height();
        if inside && mask.get(x, y) {
            let p = image.get_pixel(ix as u32, iy as u32).0;
            Rgba([p[0], p[1], p[2], 255])
        } else {
            Rgba([0, 0, 0, 0])
        }
    })
}

/// Drop pixels claimed by any text element.
fn exclude_text(bbox: &BBox, mask: &PixelMask, texts: &[(BBox, PixelMask)]) -> PixelMask {
    let out = PixelMask::from_fn(bbox.width, bbox.height, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        let (ax, ay) = (bbox.left + x as i32, bbox.top + y as i32);
        !texts.iter().any(|(tb, tm)| tb.contains_pixel(ax, ay) && tm.get((ax - tb.left) as u32, (ay - tb.top) as u32))
    });
    if out.is_empty() {
        mask.clone()
    } else {
        out
    }
}

/// Close gaps of at most `max_gap` pixels along the axis, such as those left
/// by marks drawn over a straight body, painting them in the body's color.
fn fill_body_gaps(patch: &mut RgbaImage, mask: &PixelMask, orientation: Orientation, max_gap: u32) -> PixelMask {
    let (w, h) = (mask.width(), mask.height());
    let Some(color) = dominant_rgba(patch) else { return mask.clone() };
    let mut out = mask.clone();
    let along_x = orientation != Orientation::Vertical;
    let (lines, len) = if along_x { (h, w) } else { (w, h) };
    for line in 0..lines {
        let at = |k: u32| if along_x { (k, line) } else { (line, k) };
        let mut last_set: Option<u32> = None;
        for k in 0..len {
            let (x, y) = at(k);
            if !mask.get(x, y) {
                continue;
            }
            if let Some(prev) = last_set {
                if k - prev > 1 && k - prev - 1 <= max_gap {
                    for g in prev + 1..k {
                        let (gx, gy) = at(g);
                        out.set(gx, gy, true);
                        patch.put_pixel(gx, gy, color);
                    }
                }
            }
            last_set = Some(k);
        }
    }
    out
}

fn dominant_rgba(patch: &RgbaImage) -> Option<Rgba<u8>> {
    let mut counts: HashMap<[u8; 4], usize> = HashMap::new();
    for p in patch.pixels().filter(|p| p.0[3] == 255) {
        *counts.entry(p.0).or_default() += 1;
    }
    counts.into_iter().max_by_key(|&(c, n)| (n, std::cmp::Reverse(c))).map(|(c, _)| Rgba(c))
}

/// Most frequent color; ties go to the smallest RGB triple.
pub fn mode_color(image: &RgbImage) -> Rgb {
    let mut counts: HashMap<[u8; 3], usize> = HashMap::new();
    for p in image.pixels() {
        *counts.entry(p.0).or_default() += 1;
    }
    counts.into_iter().max_by_key(|&(c, n)| (n, std::cmp::Reverse(c))).map_or([255, 255, 255], |(c, _)| c)
}

/// Foreground pixels of a two-tone region.
struct FgSplit {
    /// bbox-local.
    fg: PixelMask,
    color: Rgb,
}

impl FgSplit {
    fn font(&self) -> FontInfo {
        let rows: Vec<u32> =
            (0..self.fg.height()).filter(|&y| (0..self.fg.width()).any(|x| self.fg.get(x, y))).collect();
        let ink = rows.last().map_or(0, |&b| b - rows[0] + 1);
        FontInfo { size: font::font_size_for_ink(ink).max(4), color: self.color, family: None }
    }
}

/// Two-means on luminance over `bbox` grown by one pixel. The background is
/// the cluster owning most of that one-pixel ring; without a ring it is the
/// majority cluster.
fn separate_foreground(image: &RgbImage, bbox: &BBox) -> Result<FgSplit> {
    let (w, h) = image.dimensions();
    let inner = bbox.clip_to(w, h).ok_or_else(|| Error::NotTextLike(format!("{bbox:?} lies outside the image")))?;
    let region = inner.expand(1).and_then(|b| b.clip_to(w, h)).unwrap_or(inner);
    let px: Vec<(i32, i32, f64)> =
        region.pixels().map(|(x, y)| (x, y, luminance(image.get_pixel(x as u32, y as u32).0))).collect();
    let lo = px.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let hi = px.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < MIN_CONTRAST {
        return Err(Error::NotTextLike(format!("luminance spread {:.1}", hi - lo)));
    }
    let mut centers = [lo, hi];
    let mut labels = vec![false; px.len()];
    for _ in 0..100 {
        let next: Vec<bool> = px.iter().map(|p| (p.2 - centers[1]).abs() < (p.2 - centers[0]).abs()).collect();
        let mut sum = [0.0; 2];
        let mut n = [0usize; 2];
        for (p, &l) in px.iter().zip(&next) {
            sum[l as usize] += p.2;
            n[l as usize] += 1;
        }
        if n[0] == 0 || n[1] == 0 {
            return Err(Error::NotTextLike("one luminance cluster is empty".into()));
        }
        centers = [sum[0] / n[0] as f64, sum[1] / n[1] as f64];
        let done = next == labels;
        labels = next;
        if done {
            break;
        }
    }
    let mut ring = [0usize; 2];
    let mut total = [0usize; 2];
    for (p, &l) in px.iter().zip(&labels) {
        total[l as usize] += 1;
        if !bbox.contains_pixel(p.0, p.1) {
            ring[l as usize] += 1;
        }
    }
    let bg = if ring[0] != ring[1] { usize::from(ring[1] > ring[0]) } else { usize::from(total[1] > total[0]) };
    let fg_label = bg == 0;
    let mut fg = PixelMask::new(bbox.width, bbox.height);
    let mut sum = [0u64; 3];
    let mut count = 0u64;
    for (p, &l) in px.iter().zip(&labels) {
        if l == fg_label && bbox.contains_pixel(p.0, p.1) {
            fg.set((p.0 - bbox.left) as u32, (p.1 - bbox.top) as u32, true);
            let c = image.get_pixel(p.0 as u32, p.1 as u32).0;
            for k in 0..3 {
                sum[k] += c[k] as u64;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NotTextLike("no foreground inside the box".into()));
    }
    let color = sum.map(|s| ((s as f64 / count as f64).round()) as u8);
    Ok(FgSplit { fg, color })
}

/// Font size and color of the text inside `bbox`.
pub fn extract_font_attrs(image: &RgbImage, bbox: &BBox) -> Result<FontInfo> {
    separate_foreground(image, bbox).map(|s| s.font())
}

/// Largest font is the title, everything else body. Ties go to the first
/// text in reading order (top to bottom, then left to right).
pub fn split_title_body(texts: &[(BBox, FontInfo)]) -> Vec<TextRole> {
    let mut order: Vec<usize> = (0..texts.len()).collect();
    order.sort_by_key(|&i| (texts[i].0.top, texts[i].0.left));
    let mut title: Option<usize> = None;
    for &i in &order {
        match title {
            Some(t) if texts[t].1.size >= texts[i].1.size => {}
            _ => title = Some(i),
        }
    }
    (0..texts.len()).map(|i| if Some(i) == title { TextRole::Title } else { TextRole::Body }).collect()
}

/// Data order of the slots plus the rows they form.
///
/// Linear anchors are grouped into rows by their perpendicular coordinate
/// and matched against the layout's row split; arbitrary paths keep the
/// chain order of the clusters.
fn order_slots(global: &GlobalInfo, anchors: &[BBox]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = anchors.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    if global.representation != Representation::Linear || global.orientation == Orientation::Other {
        return ((0..n).collect(), vec![(0..n).collect()]);
    }
    let uv = |b: &BBox| {
        let (x, y) = b.center();
        if global.orientation == Orientation::Vertical {
            (y, x)
        } else {
            (x, y)
        }
    };
    let mut extents: Vec<u32> =
        anchors.iter().map(|b| if global.orientation == Orientation::Vertical { b.width } else { b.height }).collect();
    extents.sort_unstable();
    let tol = (extents[n / 2] as f64 * 0.5).max(2.0);

    let mut by_v: Vec<usize> = (0..n).collect();
    by_v.sort_by(|&a, &b| uv(&anchors[a]).1.total_cmp(&uv(&anchors[b]).1).then(a.cmp(&b)));
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut last_v = f64::NEG_INFINITY;
    for i in by_v {
        let v = uv(&anchors[i]).1;
        if v - last_v > tol || found.is_empty() {
            found.push(Vec::new());
        }
        found.last_mut().unwrap().push(i);
        last_v = v;
    }
    for row in &mut found {
        row.sort_by(|&a, &b| uv(&anchors[a]).0.total_cmp(&uv(&anchors[b]).0).then(a.cmp(&b)));
    }

    let expected = layout_rows(global.layout, n);
    let fits = expected.len() == found.len() && expected.iter().zip(&found).all(|(e, f)| e.len() == f.len());
    let mut order = vec![0; n];
    if fits {
        for (e, f) in expected.iter().zip(&found) {
            for (&data_idx, &slot) in e.iter().zip(f) {
                order[data_idx] = slot;
            }
        }
        (order, expected)
    } else {
        let mut rows = Vec::new();
        let mut k = 0;
        for f in &found {
            let mut row = Vec::new();
            for &slot in f {
                order[k] = slot;
                row.push(k);
                k += 1;
            }
            rows.push(row);
        }
        (order, rows)
    }
}

/// Anchors ordered by geodesic distance along the pixels of `path` (the main
/// bodies plus the marks), starting from the path end nearest the top-left.
/// `None` when some anchor is not connected to the others.
fn path_order(canvas: (u32, u32), path: &[&Detection], anchors: &[&Detection]) -> Option<Vec<usize>> {
    let (w, h) = (canvas.0 as i64, canvas.1 as i64);
    let idx = |x: i64, y: i64| (y * w + x) as usize;
    let mut on = vec![false; (w * h) as usize];
    let pixels = |d: &Detection| {
        let m = d.mask_or_box();
        let b = d.bbox;
        b.pixels()
            .filter(move |&(x, y)| m.get((x - b.left) as u32, (y - b.top) as u32))
            .map(|(x, y)| (x as i64, y as i64))
            .filter(move |&(x, y)| x >= 0 && y >= 0 && x < w && y < h)
            .collect::<Vec<_>>()
    };
    for d in path {
        for (x, y) in pixels(d) {
            on[idx(x, y)] = true;
        }
    }
    let anchor_px: Vec<Vec<(i64, i64)>> = anchors.iter().map(|d| pixels(d)).collect();
    if anchor_px.iter().any(|p| p.is_empty()) {
        return None;
    }
    // distance of every anchor from anchor `from`, by 8-connected BFS
    let sweep = |from: usize| -> Option<Vec<u32>> {
        let mut dist = vec![u32::MAX; on.len()];
        let mut queue = std::collections::VecDeque::new();
        for &(x, y) in &anchor_px[from] {
            dist[idx(x, y)] = 0;
            queue.push_back((x, y));
        }
        while let Some((x, y)) = queue.pop_front() {
            let d = dist[idx(x, y)];
            for (dx, dy) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h && on[idx(nx, ny)] && dist[idx(nx, ny)] == u32::MAX {
                    dist[idx(nx, ny)] = d + 1;
                    queue.push_back((nx, ny));
                }
            }
        }
        let per: Vec<u32> =
            anchor_px.iter().map(|px| px.iter().map(|&(x, y)| dist[idx(x, y)]).min().unwrap_or(u32::MAX)).collect();
        per.iter().all(|&d| d != u32::MAX).then_some(per)
    };
    let far = |d: &[u32]| (0..d.len()).max_by_key(|&i| (d[i], std::cmp::Reverse(i))).unwrap_or(0);
    let end_a = far(&sweep(0)?);
    let from_a = sweep(end_a)?;
    let end_b = far(&from_a);
    let key = |i: usize| {
        let (x, y) = anchors[i].bbox.center();
        x + y
    };
    let start = if key(end_b) < key(end_a) { end_b } else { end_a };
    let d = if start == end_a { from_a } else { sweep(start)? };
    let mut order: Vec<usize> = (0..anchors.len()).collect();
    order.sort_by_key(|&i| (d[i], i));
    Some(order)
}

/// The template's own patches over its background color: reusable elements
/// (bodies first) then the stored patches of updatable elements.
pub fn recompose(doc: &TemplateDoc) -> RgbImage {
    let (w, h) = doc.canvas;
    let mut img = RgbImage::from_pixel(w, h, image::Rgb(doc.background));
    let bodies_first = doc
        .reusable
        .iter()
        .filter(|r| r.category == ElementCategory::MainBody)
        .chain(doc.reusable.iter().filter(|r| r.category != ElementCategory::MainBody));
    for r in bodies_first {
        blit_patch(&mut img, &r.patch, r.bbox.left, r.bbox.top);
    }
    for u in &doc.updatable {
        if let Some(p) = &u.patch {
            blit_patch(&mut img, p, u.bbox.left, u.bbox.top);
        }
    }
    img
}

#[cfg(test)]
mod tests;
