//! Render new timelines from a template and event data.
//!
//! A job is first turned into a scene (patches and filled pixel sets in
//! paint order); the SVG and the bitmap are both written from that scene.

mod svg;

use std::collections::HashMap;

use image::imageops::{self, FilterType};
use image::{Rgb as Pixel, RgbImage, RgbaImage};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::model::{AnnotatedTimeline, ElementCategory, Orientation, Representation, Rgb, ScaleKind};
use crate::raster::{blit_patch, font, icons, Coverage};
use crate::scale::{self, layout_rows};
use crate::synth::{format_time, EventDatum};
use crate::template::{ElementRef, TemplateDoc, TextRole};

/// Smallest fraction of the template font size text may shrink to.
pub const MIN_SHRINK: f64 = 0.6;
/// Offsets rotate when the path turns further than this from the axis.
const ROTATE_DEG: f64 = 60.0;
const ELLIPSIS: &str = "...";

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Output size; defaults to the template's canvas.
    pub canvas: Option<(u32, u32)>,
    pub scale: Option<ScaleKind>,
    /// Take event positions from this template's slots instead.
    pub representation_source: Option<Box<TemplateDoc>>,
    /// Reuse slots cyclically when there are more events than slots.
    pub loop_slots: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { canvas: None, scale: None, representation_source: None, loop_slots: true }
    }
}

#[derive(Debug, Clone)]
pub struct RenderJob {
    pub template: TemplateDoc,
    pub data: Vec<EventDatum>,
    pub options: RenderOptions,
}

impl RenderJob {
    pub fn new(template: TemplateDoc, data: Vec<EventDatum>) -> Self {
        Self { template, data, options: RenderOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedElement {
    /// `None` for main bodies.
    pub event: Option<usize>,
    pub category: ElementCategory,
    pub bbox: BBox,
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub svg: String,
    pub image: RgbImage,
    pub elements: Vec<RenderedElement>,
}

#[derive(Debug, Clone)]
pub(crate) enum Paint {
    Patch { patch: RgbaImage, left: i32, top: i32 },
    Fill { coverage: Coverage, color: Rgb },
}

#[derive(Debug, Clone)]
pub(crate) struct Scene {
    pub canvas: (u32, u32),
    pub background: Rgb,
    pub items: Vec<(Paint, RenderedElement)>,
}

/// Where event `i` goes and which slot dresses it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Placement {
    center: (f64, f64),
    slot: usize,
    rotate: bool,
}

fn canvas_of(job: &RenderJob) -> (u32, u32) {
    job.options.canvas.unwrap_or(job.template.canvas)
}

fn ratio(from: (u32, u32), to: (u32, u32)) -> (f64, f64) {
    (to.0 as f64 / from.0 as f64, to.1 as f64 / from.1 as f64)
}

fn check(job: &RenderJob) -> Result<()> {
    if job.data.is_empty() {
        return Err(Error::InvalidJob("no events".into()));
    }
    if job.template.event_slots.is_empty() {
        return Err(Error::TemplateIncomplete("no event slots".into()));
    }
    let (w, h) = canvas_of(job);
    if w == 0 || h == 0 {
        return Err(Error::InvalidJob("empty canvas".into()));
    }
    if let Some(d) = job.data.iter().find(|d| !d.time.is_finite()) {
        return Err(Error::InvalidJob(format!("non-finite time for {:?}", d.label)));
    }
    let slots = job.template.event_slots.len();
    if !job.options.loop_slots && job.data.len() > slots {
        return Err(Error::InsufficientSlots { slots, events: job.data.len() });
    }
    Ok(())
}

fn slot_centers(doc: &TemplateDoc) -> Vec<(f64, f64)> {
    (0..doc.event_slots.len()).map(|s| doc.anchor_box(s).center()).collect()
}

/// `n` points along a polyline: its own vertices while they last, otherwise
/// evenly spaced by arc length from the first vertex to the last.
fn along_path(points: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    if n <= points.len() {
        return points[..n].to_vec();
    }
    if points.len() == 1 || n == 1 {
        return vec![points[0]; n];
    }
    let seg: Vec<f64> =
        points.windows(2).map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt()).collect();
    let total: f64 = seg.iter().sum();
    (0..n)
        .map(|i| {
            let mut d = total * i as f64 / (n - 1) as f64;
            for (k, &len) in seg.iter().enumerate() {
                if d <= len || k + 1 == seg.len() {
                    let t = if len > 0.0 { (d / len).min(1.0) } else { 0.0 };
                    let (a, b) = (points[k], points[k + 1]);
                    return (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                }
                d -= len;
            }
            unreachable!()
        })
        .collect()
}

/// Angle in degrees between the local path direction at each point and the
/// orientation axis.
fn turn_angles(points: &[(f64, f64)], orientation: Orientation) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .map(|i| {
            if n < 2 {
                return 0.0;
            }
            let (a, b) = (points[i.saturating_sub(1)], points[(i + 1).min(n - 1)]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let (along, across) = match orientation {
                Orientation::Vertical => (dy.abs(), dx.abs()),
                _ => (dx.abs(), dy.abs()),
            };
            across.atan2(along).to_degrees()
        })
        .collect()
}

/// Per-row geometry of a linear template along `u`, with `v` across.
struct LinearRows {
    vertical: bool,
    start: Vec<f64>,
    span: Vec<f64>,
    v: Vec<f64>,
    pitch: f64,
}

impl LinearRows {
    fn new(doc: &TemplateDoc) -> Self {
        let vertical = doc.global.orientation == Orientation::Vertical;
        let uv = |p: (f64, f64)| if vertical { (p.1, p.0) } else { p };
        let centers = slot_centers(doc);
        let rows: Vec<Vec<(f64, f64)>> =
            doc.rows.iter().filter(|r| !r.is_empty()).map(|r| r.iter().map(|&s| uv(centers[s])).collect()).collect();
        let raw_span: Vec<f64> = rows.iter().map(|r| r[r.len() - 1].0 - r[0].0).collect();
        let widest = raw_span.iter().copied().fold(0.0, f64::max);
        let start: Vec<f64> = rows.iter().map(|r| r[0].0).collect();
        let extent = if vertical { doc.canvas.1 } else { doc.canvas.0 } as f64;
        let span = raw_span
            .iter()
            .zip(&start)
            .map(|(&s, &u0)| {
                if s > 0.0 {
                    s
                } else if widest > 0.0 {
                    widest
                } else {
                    (extent - 2.0 * u0).max(0.0)
                }
            })
            .collect();
        let v: Vec<f64> = rows.iter().map(|r| r.iter().map(|p| p.1).sum::<f64>() / r.len() as f64).collect();
        let pitch = if v.len() > 1 {
            (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
        } else {
            let b = slot_extent(doc, 0);
            (if vertical { b.width } else { b.height }) as f64 + 24.0
        };
        Self { vertical, start, span, v, pitch }
    }

    fn row(&self, r: usize) -> (f64, f64, f64) {
        let last = self.v.len() - 1;
        if r <= last {
            (self.start[r], self.span[r], self.v[r])
        } else {
            // rows beyond the template continue at the same pitch
            (self.start[last], self.span[last], self.v[last] + (r - last) as f64 * self.pitch)
        }
    }

    /// Index of the template row nearest to `v`.
    fn nearest(&self, v: f64) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, &rv) in self.v.iter().enumerate() {
            if (rv - v).abs() < best.1 {
                best = (k, (rv - v).abs());
            }
        }
        best.0
    }
}

/// Union of a slot's anchor and member boxes.
fn slot_extent(doc: &TemplateDoc, slot: usize) -> BBox {
    let s = &doc.event_slots[slot];
    s.members
        .iter()
        .map(|m| doc.element_bbox(m.element))
        .fold(doc.anchor_box(slot), |a, b| crate::geometry::union_bbox(&a, &b))
}

fn placements(job: &RenderJob) -> Result<Vec<Placement>> {
    check(job)?;
    let doc = &job.template;
    let n = job.data.len();
    let slots = doc.event_slots.len();
    let canvas = canvas_of(job);
    let slot_of = |i: usize| i % slots;

    if let Some(src) = &job.options.representation_source {
        if src.event_slots.is_empty() {
            return Err(Error::TemplateIncomplete("representation source has no event slots".into()));
        }
        let (sx, sy) = ratio(src.canvas, canvas);
        let pts: Vec<(f64, f64)> = slot_centers(src).iter().map(|&(x, y)| (x * sx, y * sy)).collect();
        if n > pts.len() && !job.options.loop_slots {
            return Err(Error::InsufficientSlots { slots: pts.len(), events: n });
        }
        let centers = along_path(&pts, n);
        let angles = turn_angles(&centers, doc.global.orientation);
        return Ok((0..n)
            .map(|i| Placement { center: centers[i], slot: slot_of(i), rotate: angles[i] > ROTATE_DEG })
            .collect());
    }

    let (sx, sy) = ratio(doc.canvas, canvas);
    let centers: Vec<(f64, f64)> = match doc.global.representation {
        Representation::Linear if doc.global.orientation != Orientation::Other => {
            let geo = LinearRows::new(doc);
            let kind = job.options.scale.unwrap_or(doc.global.scale);
            let mut out = vec![(0.0, 0.0); n];
            for (r, row) in layout_rows(doc.global.layout, n).iter().enumerate() {
                let (u0, span, v) = geo.row(r);
                let times: Vec<f64> = row.iter().map(|&i| job.data[i].time).collect();
                let pos = scale::positions(kind, &times, span)?;
                for (&i, p) in row.iter().zip(pos) {
                    out[i] = if geo.vertical { (v, u0 + p) } else { (u0 + p, v) };
                }
            }
            out
        }
        _ => along_path(&slot_centers(doc), n),
    };
    Ok(centers
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| Placement { center: (x * sx, y * sy), slot: slot_of(i), rotate: false })
        .collect())
}

/// Event anchor centers for a job, in data order.
pub fn event_anchors(job: &RenderJob) -> Result<Vec<(f64, f64)>> {
    Ok(placements(job)?.into_iter().map(|p| p.center).collect())
}

/// Reusable index of the mark drawn for each of `n` events: distinct slot
/// marks in slot order, cycled.
pub fn mark_assignment(doc: &TemplateDoc, n: usize) -> Vec<usize> {
    let mut distinct: Vec<usize> = Vec::new();
    for slot in &doc.event_slots {
        let p = &doc.reusable[slot.anchor].patch;
        if !distinct.iter().any(|&d| doc.reusable[d].patch == *p) {
            distinct.push(slot.anchor);
        }
    }
    if distinct.is_empty() {
        return Vec::new();
    }
    (0..n).map(|i| distinct[i % distinct.len()]).collect()
}

/// Replace the job's event positions with the slot positions of `source`.
pub fn transfer_representation(target: RenderJob, source: &TemplateDoc) -> Result<RenderJob> {
    if source.event_slots.is_empty() {
        return Err(Error::TemplateIncomplete("representation source has no event slots".into()));
    }
    if !target.options.loop_slots && source.event_slots.len() < target.data.len() {
        return Err(Error::InsufficientSlots { slots: source.event_slots.len(), events: target.data.len() });
    }
    let mut job = target;
    job.options.representation_source = Some(Box::new(source.clone()));
    Ok(job)
}

fn alpha_bbox(patch: &RgbaImage, left: i32, top: i32) -> Option<BBox> {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for (x, y, p) in patch.enumerate_pixels() {
        if p.0[3] >= 128 {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x + 1);
            y1 = y1.max(y + 1);
        }
    }
    (x0 < x1).then(|| BBox::new(top + y0 as i32, left + x0 as i32, x1 - x0, y1 - y0))
}

fn resized(patch: &RgbaImage, sx: f64, sy: f64) -> RgbaImage {
    if sx == 1.0 && sy == 1.0 {
        return patch.clone();
    }
    let w = ((patch.width() as f64 * sx).round() as u32).max(1);
    let h = ((patch.height() as f64 * sy).round() as u32).max(1);
    imageops::resize(patch, w, h, FilterType::Nearest)
}

fn push_patch(
    scene: &mut Scene,
    patch: RgbaImage,
    left: i32,
    top: i32,
    event: Option<usize>,
    category: ElementCategory,
) {
    if let Some(bbox) = alpha_bbox(&patch, left, top) {
        scene.items.push((Paint::Patch { patch, left, top }, RenderedElement { event, category, bbox }));
    }
}

fn push_fill(scene: &mut Scene, coverage: Coverage, color: Rgb, event: usize, category: ElementCategory) {
    let bbox = coverage.bbox;
    scene.items.push((Paint::Fill { coverage, color }, RenderedElement { event: Some(event), category, bbox }));
}

fn bodies(job: &RenderJob, scene: &mut Scene, n: usize) {
    let canvas = scene.canvas;
    if let Some(src) = &job.options.representation_source {
        let (sx, sy) = ratio(src.canvas, canvas);
        for r in src.reusable.iter().filter(|r| r.category == ElementCategory::MainBody) {
            let left = (r.bbox.left as f64 * sx).round() as i32;
            let top = (r.bbox.top as f64 * sy).round() as i32;
            push_patch(scene, resized(&r.patch, sx, sy), left, top, None, r.category);
        }
        return;
    }
    let doc = &job.template;
    let (sx, sy) = ratio(doc.canvas, canvas);
    let body_list: Vec<_> = doc.reusable.iter().filter(|r| r.category == ElementCategory::MainBody).collect();
    let linear = doc.global.representation == Representation::Linear && doc.global.orientation != Orientation::Other;
    if !linear {
        for r in body_list {
            let left = (r.bbox.left as f64 * sx).round() as i32;
            let top = (r.bbox.top as f64 * sy).round() as i32;
            push_patch(scene, resized(&r.patch, sx, sy), left, top, None, r.category);
        }
        return;
    }
    let geo = LinearRows::new(doc);
    let rows_needed = layout_rows(doc.global.layout, n).len();
    let template_rows = geo.v.len();
    let row_of: Vec<usize> = body_list
        .iter()
        .map(|r| {
            let (cx, cy) = r.bbox.center();
            geo.nearest(if geo.vertical { cx } else { cy })
        })
        .collect();
    for r in 0..rows_needed {
        let k = r.min(template_rows - 1);
        let shift = geo.row(r).2 - geo.v[k];
        for (body, _) in body_list.iter().zip(&row_of).filter(|(_, &row)| row == k) {
            let (dx, dy) = if geo.vertical { (shift, 0.0) } else { (0.0, shift) };
            let left = ((body.bbox.left as f64 + dx) * sx).round() as i32;
            let top = ((body.bbox.top as f64 + dy) * sy).round() as i32;
            push_patch(scene, resized(&body.patch, sx, sy), left, top, None, body.category);
        }
    }
}

/// Widest template element per category, the room a replacement text gets.
fn capacities(doc: &TemplateDoc) -> HashMap<ElementCategory, u32> {
    let mut cap: HashMap<ElementCategory, u32> = HashMap::new();
    for u in &doc.updatable {
        let e = cap.entry(u.category).or_default();
        *e = (*e).max(u.bbox.width);
    }
    cap
}

/// Text ink with its tight box at the origin.
fn ink(text: &str, size: u32) -> Option<Coverage> {
    Coverage::text(text, size, 0, 0).map(|c| c.translate(-c.bbox.left, -c.bbox.top))
}

/// Shrink to fit `cap` down to [`MIN_SHRINK`] of `size`, then ellipsize.
pub fn fit_text(text: &str, size: u32, cap: u32) -> Option<(String, u32)> {
    let min_size = ((size as f64 * MIN_SHRINK).ceil() as u32).min(size);
    for s in (min_size..=size).rev() {
        if ink(text, s)?.bbox.width <= cap {
            return Some((text.to_string(), s));
        }
    }
    let chars: Vec<char> = text.chars().collect();
    for keep in (0..chars.len()).rev() {
        let cut: String = chars[..keep].iter().collect::<String>().trim_end().to_string() + ELLIPSIS;
        if ink(&cut, min_size).is_some_and(|c| c.bbox.width <= cap) {
            return Some((cut, min_size));
        }
    }
    None
}

/// Top-left of a `(w, h)` box placed in `slot`, keeping the edge that faces
/// the anchor and centering along the other direction.
fn align(slot: &BBox, w: u32, h: u32, rel: (f64, f64)) -> (i32, i32) {
    let (cx, cy) = slot.center();
    let mid_x = (cx - w as f64 / 2.0).round() as i32;
    let mid_y = (cy - h as f64 / 2.0).round() as i32;
    if rel.1.abs() >= rel.0.abs() {
        let top = if rel.1 < 0.0 { slot.bottom() - h as i32 } else { slot.top };
        (mid_x, top)
    } else {
        let left = if rel.0 < 0.0 { slot.right() - w as i32 } else { slot.left };
        (left, mid_y)
    }
}

fn build_scene(job: &RenderJob) -> Result<Scene> {
    let doc = &job.template;
    let places = placements(job)?;
    let n = job.data.len();
    let mut scene = Scene { canvas: canvas_of(job), background: doc.background, items: Vec::new() };
    bodies(job, &mut scene, n);
    let marks = mark_assignment(doc, n);
    let caps = capacities(doc);

    for (i, (p, datum)) in places.iter().zip(&job.data).enumerate() {
        let slot = &doc.event_slots[p.slot];
        let ab = doc.anchor_box(p.slot);
        let (cx, cy) = p.center;
        let mark = &doc.reusable[marks[i]];
        let (pw, ph) = mark.patch.dimensions();
        let ml = (cx - pw as f64 / 2.0).round() as i32;
        let mt = (cy - ph as f64 / 2.0).round() as i32;
        push_patch(&mut scene, mark.patch.clone(), ml, mt, Some(i), mark.category);

        let sl = (cx - ab.width as f64 / 2.0).round() as i32;
        let st = (cy - ab.height as f64 / 2.0).round() as i32;
        let primary_annotation = slot
            .members
            .iter()
            .filter_map(|m| match m.element {
                ElementRef::Updatable(u) if doc.updatable[u].category == ElementCategory::AnnotationText => Some(u),
                _ => None,
            })
            .min_by_key(|&u| (doc.updatable[u].role != Some(TextRole::Title), u));

        for m in &slot.members {
            let eb = doc.element_bbox(m.element);
            // member center relative to the anchor center
            let mut rel = (
                m.offset.0 as f64 + eb.width as f64 / 2.0 - ab.width as f64 / 2.0,
                m.offset.1 as f64 + eb.height as f64 / 2.0 - ab.height as f64 / 2.0,
            );
            let (mut w, mut h) = (eb.width, eb.height);
            let mut target = BBox::new(st + m.offset.1, sl + m.offset.0, w, h);
            if p.rotate {
                rel = (-rel.1, rel.0);
                std::mem::swap(&mut w, &mut h);
                let left = (cx + rel.0 - w as f64 / 2.0).round() as i32;
                let top = (cy + rel.1 - h as f64 / 2.0).round() as i32;
                target = BBox::new(top, left, w, h);
            }
            match m.element {
                ElementRef::Reusable(r) => {
                    let e = &doc.reusable[r];
                    let patch = if p.rotate { imageops::rotate90(&e.patch) } else { e.patch.clone() };
                    push_patch(&mut scene, patch, target.left, target.top, Some(i), e.category);
                }
                ElementRef::Updatable(u) => {
                    let e = &doc.updatable[u];
                    match e.category {
                        ElementCategory::AnnotationIcon => {
                            let s = w.max(h) as f64;
                            let id = datum.icon_id.unwrap_or(0) % icons::ICON_COUNT;
                            let Some(cov) = icons::icon_shape(id, 0.0, 0.0, s, s).rasterize() else { continue };
                            let cov = cov.translate(-cov.bbox.left, -cov.bbox.top);
                            let (l, t) = align(&target, cov.bbox.width, cov.bbox.height, (0.0, 0.0));
                            let color = e.color.or(e.font.as_ref().map(|f| f.color)).unwrap_or([0, 0, 0]);
                            push_fill(&mut scene, cov.translate(l, t), color, i, e.category);
                        }
                        cat => {
                            let content = match cat {
                                ElementCategory::EventText => format_time(datum.time),
                                _ if Some(u) == primary_annotation => datum.label.to_uppercase(),
                                _ => continue,
                            };
                            let (size, color) = match &e.font {
                                Some(f) => (f.size, f.color),
                                None => (font::font_size_for_ink(eb.height).max(4), [0, 0, 0]),
                            };
                            let cap = caps.get(&cat).copied().unwrap_or(eb.width).max(eb.width);
                            let Some((text, s)) = fit_text(&content, size, cap) else { continue };
                            let Some(cov) = ink(&text, s) else { continue };
                            let (l, t) = align(&target, cov.bbox.width, cov.bbox.height, rel);
                            push_fill(&mut scene, cov.translate(l, t), color, i, cat);
                        }
                    }
                }
            }
        }
    }
    Ok(scene)
}

fn rasterize(scene: &Scene) -> RgbImage {
    let (w, h) = scene.canvas;
    let mut img = RgbImage::from_pixel(w, h, Pixel(scene.background));
    for (paint, _) in &scene.items {
        match paint {
            Paint::Patch { patch, left, top } => blit_patch(&mut img, patch, *left, *top),
            Paint::Fill { coverage, color } => coverage.paint(&mut img, *color),
        }
    }
    img
}

/// Render a job to SVG plus the equivalent bitmap.
pub fn render(job: &RenderJob) -> Result<Rendered> {
    let scene = build_scene(job)?;
    Ok(Rendered {
        svg: svg::to_svg(&scene),
        image: rasterize(&scene),
        elements: scene.items.into_iter().map(|(_, e)| e).collect(),
    })
}

fn edge_deviation(a: &BBox, b: &BBox) -> i32 {
    (a.top - b.top)
        .abs()
        .max((a.left - b.left).abs())
        .max((a.right() - b.right()).abs())
        .max((a.bottom() - b.bottom()).abs())
}

/// Largest edge displacement between each ground-truth element and the
/// rendered element of the same event and category closest to it. `None`
/// when the per-event category counts differ.
pub fn bbox_deviation(truth: &AnnotatedTimeline, rendered: &[RenderedElement]) -> Option<i32> {
    let mut groups: HashMap<(Option<usize>, ElementCategory), (Vec<BBox>, Vec<BBox>)> = HashMap::new();
    let mut event_of = vec![None; truth.elements.len()];
    for (i, group) in truth.events.iter().enumerate() {
        for &e in group {
            event_of[e] = Some(i);
        }
    }
    for (e, el) in truth.elements.iter().enumerate() {
        groups.entry((event_of[e], el.category)).or_default().0.push(el.bbox);
    }
    for r in rendered {
        groups.entry((r.event, r.category)).or_default().1.push(r.bbox);
    }
    let mut worst = 0;
    for (want, mut got) in groups.into_values() {
        if want.len() != got.len() {
            return None;
        }
        for w in &want {
            let (k, d) = got.iter().enumerate().map(|(k, g)| (k, edge_deviation(w, g))).min_by_key(|&(k, d)| (d, k))?;
            got.swap_remove(k);
            worst = worst.max(d);
        }
    }
    Some(worst)
}
