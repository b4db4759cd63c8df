//! Geometry of generated timelines: canvas planning, element placement, and
//! painting with visibility-resolved masks.

use image::{Rgb as Pixel, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{format_time, EventDatum, MarkShape, PathKind, TimelineSpec};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::{AnnotatedTimeline, Element, ElementCategory, Orientation, Representation, Rgb, ScaleKind};
use crate::raster::{font, icons, Coverage, Shape};
use crate::scale::{self, layout_rows};

pub const MARGIN: i32 = 24;
/// Longest event-text label the planner reserves room for.
pub const EVENT_LABEL_CHARS: usize = 4;
const GAP: i32 = 4;
const ROW_GAP: f64 = 24.0;
const SPACING_PAD: f64 = 10.0;
pub(crate) const BODY_EXT: f64 = 18.0;
const CONNECTOR_THICKNESS: u32 = 3;
const PATH_JITTER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MemberKind {
    EventText,
    Connector,
    AnnotationText,
    Icon,
}

impl MemberKind {
    fn category(self) -> ElementCategory {
        match self {
            MemberKind::EventText => ElementCategory::EventText,
            MemberKind::Connector => ElementCategory::AnnotationMark,
            MemberKind::AnnotationText => ElementCategory::AnnotationText,
            MemberKind::Icon => ElementCategory::AnnotationIcon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Up,
    Down,
    Left,
    Right,
}

/// Which way connectors run: along y for stacks above/below a mark.
fn vertical_stack(side: Side) -> bool {
    matches!(side, Side::Up | Side::Down)
}

fn mark_dims(spec: &TimelineSpec) -> (u32, u32) {
    let s = spec.style.mark_size;
    let long = (s as f64 * 1.6).round() as u32;
    match (spec.style.mark_shape, spec.global.orientation) {
        (MarkShape::Capsule, Orientation::Vertical) => (s, long),
        (MarkShape::Capsule, _) => (long, s),
        _ => (s, s),
    }
}

fn connector_dims(spec: &TimelineSpec, side: Side) -> (u32, u32) {
    let len = spec.style.connector_length;
    if vertical_stack(side) {
        (CONNECTOR_THICKNESS, len)
    } else {
        (len, CONNECTOR_THICKNESS)
    }
}

/// Worst-case `(width, height)` for each member kind.
fn worst_case(spec: &TimelineSpec, kind: MemberKind, side: Side) -> (f64, f64) {
    let st = &spec.style;
    match kind {
        MemberKind::EventText => (
            font::text_width(&"0".repeat(EVENT_LABEL_CHARS), st.event_font_size) as f64,
            font::ink_height(st.event_font_size) as f64,
        ),
        MemberKind::AnnotationText => {
            (font::text_width(&"W".repeat(st.label_chars), st.font_size) as f64, font::ink_height(st.font_size) as f64)
        }
        MemberKind::Icon => (st.icon_size as f64, st.icon_size as f64),
        MemberKind::Connector => {
            let (w, h) = connector_dims(spec, side);
            (w as f64, h as f64)
        }
    }
}

/// Members on the two sides of a linear row, near-to-far, and the sides
/// themselves: `(annotation side, event-text side)`.
fn linear_sides(spec: &TimelineSpec) -> ((Side, Vec<MemberKind>), (Side, Vec<MemberKind>)) {
    let sc = &spec.style.schema;
    let mut ann = Vec::new();
    if sc.has_annotation_mark {
        ann.push(MemberKind::Connector);
    }
    if sc.has_annotation_text {
        ann.push(MemberKind::AnnotationText);
    }
    if sc.has_annotation_icon {
        ann.push(MemberKind::Icon);
    }
    let ev = if sc.has_event_text { vec![MemberKind::EventText] } else { vec![] };
    match spec.global.orientation {
        Orientation::Vertical => ((Side::Right, ann), (Side::Left, ev)),
        _ => ((Side::Up, ann), (Side::Down, ev)),
    }
}

/// All members stacked on one side, for arbitrary paths.
fn single_stack(spec: &TimelineSpec) -> Vec<MemberKind> {
    let sc = &spec.style.schema;
    let mut out = Vec::new();
    if sc.has_event_text {
        out.push(MemberKind::EventText);
    }
    if sc.has_annotation_mark {
        out.push(MemberKind::Connector);
    }
    if sc.has_annotation_text {
        out.push(MemberKind::AnnotationText);
    }
    if sc.has_annotation_icon {
        out.push(MemberKind::Icon);
    }
    out
}

fn stack_extent(spec: &TimelineSpec, members: &[MemberKind], side: Side) -> f64 {
    members
        .iter()
        .map(|&k| {
            let (w, h) = worst_case(spec, k, side);
            GAP as f64 + if vertical_stack(side) { h } else { w }
        })
        .sum()
}

/// Smallest center-to-center distance between neighbouring marks.
pub(crate) fn min_spacing(spec: &TimelineSpec) -> f64 {
    let (mw, mh) = mark_dims(spec);
    let horizontal = spec.global.orientation != Orientation::Vertical;
    let side = if horizontal { Side::Up } else { Side::Right };
    let mut widest = if horizontal { mw as f64 } else { mh as f64 };
    for kind in [MemberKind::EventText, MemberKind::AnnotationText, MemberKind::Icon, MemberKind::Connector] {
        let (w, h) = worst_case(spec, kind, side);
        widest = widest.max(if horizontal { w } else { h });
    }
    let pad = if spec.global.representation == Representation::Arbitrary { 2.0 * SPACING_PAD } else { SPACING_PAD };
    widest + pad
}

/// Padding before the first mark along the axis.
fn lead(spec: &TimelineSpec) -> f64 {
    MARGIN as f64 + BODY_EXT.max(min_spacing(spec) / 2.0) + spec.style.body_thickness as f64
}

pub(crate) struct Plan {
    pub axis_length: f64,
    pub canvas: (u32, u32),
}

struct LinearFrame {
    lead: f64,
    /// Cross-axis coordinate of each row's axis.
    row_v: Vec<f64>,
}

fn linear_frame(spec: &TimelineSpec) -> (LinearFrame, f64, f64) {
    let ((ann_side, ann), (ev_side, ev)) = linear_sides(spec);
    let (mw, mh) = mark_dims(spec);
    let mark_v = if vertical_stack(ann_side) { mh } else { mw } as f64;
    let ext_ann = stack_extent(spec, &ann, ann_side);
    let ext_ev = stack_extent(spec, &ev, ev_side);
    // rows start with the side that precedes the axis in reading order
    let (before, after) = match ann_side {
        Side::Up | Side::Left => (ext_ann, ext_ev),
        _ => (ext_ev, ext_ann),
    };
    let pitch = before + mark_v + after + ROW_GAP;
    let rows = layout_rows(spec.global.layout, spec.n_events).len();
    let row_v = (0..rows).map(|r| MARGIN as f64 + before + mark_v / 2.0 + r as f64 * pitch).collect();
    let cross = 2.0 * MARGIN as f64 + rows as f64 * pitch - ROW_GAP;
    (LinearFrame { lead: lead(spec), row_v }, pitch, cross)
}

pub(crate) fn linear_canvas(spec: &TimelineSpec, axis_length: f64) -> (u32, u32) {
    let (frame, _, cross) = linear_frame(spec);
    let along = 2.0 * frame.lead + axis_length;
    match spec.global.orientation {
        Orientation::Vertical => (cross.ceil() as u32, along.ceil() as u32),
        _ => (along.ceil() as u32, cross.ceil() as u32),
    }
}

pub(crate) fn arbitrary_canvas(spec: &TimelineSpec, step: f64) -> (u32, u32) {
    ArbitraryGeometry::new(spec, step).canvas
}

pub(crate) fn plan(spec: &TimelineSpec) -> Plan {
    let spacing = min_spacing(spec);
    match spec.global.representation {
        Representation::Linear => {
            let longest = layout_rows(spec.global.layout, spec.n_events).iter().map(Vec::len).max().unwrap_or(1);
            let slack = match spec.global.scale {
                ScaleKind::Sequential => 1.0,
                ScaleKind::SequentialInterim => 1.6,
                ScaleKind::Logarithmic => 3.0,
                _ => 2.0,
            };
            let axis_length = (spacing * (longest.saturating_sub(1)) as f64 * slack).max(2.0 * spacing).ceil();
            Plan { axis_length, canvas: linear_canvas(spec, axis_length) }
        }
        Representation::Arbitrary => {
            let geo = ArbitraryGeometry::new(spec, spacing);
            Plan { axis_length: spacing, canvas: geo.canvas }
        }
    }
}

struct ArbitraryGeometry {
    canvas: (u32, u32),
    stack: f64,
    mark_half: f64,
    lead: f64,
    step: f64,
}

impl ArbitraryGeometry {
    fn new(spec: &TimelineSpec, step: f64) -> Self {
        let stack = stack_extent(spec, &single_stack(spec), Side::Up);
        let (_, mh) = mark_dims(spec);
        let mark_half = mh as f64 / 2.0;
        let lead = lead(spec);
        let n = spec.n_events as f64;
        let jitter = 2.0 * PATH_JITTER;
        let outer = MARGIN as f64 + stack + mark_half + jitter;
        let (w, h) = match spec.style.path_kind {
            PathKind::ZigZag => (2.0 * lead + (n - 1.0) * step, 2.0 * outer + 2.0 * Self::amplitude(stack)),
            PathKind::Staircase => {
                (2.0 * lead + (n - 1.0) * step, 2.0 * outer + (n - 1.0) * Self::rise(stack, mark_half))
            }
            PathKind::SCurve => {
                let k = spec.n_events.div_ceil(2) as f64;
                (2.0 * lead + (k - 1.0) * step + step / 2.0, 2.0 * outer + Self::row_gap(stack, mark_half))
            }
        };
        Self { canvas: (w.ceil() as u32, h.ceil() as u32), stack, mark_half, lead, step }
    }

    fn amplitude(stack: f64) -> f64 {
        (stack * 0.5).max(16.0)
    }

    fn rise(stack: f64, mark_half: f64) -> f64 {
        stack + 2.0 * mark_half + 8.0
    }

    fn row_gap(stack: f64, mark_half: f64) -> f64 {
        2.0 * stack + 2.0 * mark_half + 16.0
    }

    /// Event centers plus the main-body polyline through them.
    fn path(&self, spec: &TimelineSpec, rng: &mut impl Rng) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let n = spec.n_events;
        let mut jit = || rng.gen_range(-PATH_JITTER..=PATH_JITTER);
        let top = MARGIN as f64 + self.stack + self.mark_half + 2.0 * PATH_JITTER;
        let x = |i: usize| self.lead + i as f64 * self.step;
        match spec.style.path_kind {
            PathKind::ZigZag => {
                let amp = Self::amplitude(self.stack);
                let centers: Vec<_> =
                    (0..n).map(|i| (x(i), top + if i % 2 == 0 { 0.0 } else { 2.0 * amp } + jit())).collect();
                let mut line = vec![extend(centers[1], centers[0])];
                line.extend(&centers);
                line.push(extend(centers[n - 2], centers[n - 1]));
                (centers, line)
            }
            PathKind::Staircase => {
                let rise = Self::rise(self.stack, self.mark_half);
                let centers: Vec<_> = (0..n).map(|i| (x(i) + jit(), top + i as f64 * rise)).collect();
                let mut line = vec![(centers[0].0 - BODY_EXT, centers[0].1)];
                for i in 0..n {
                    line.push(centers[i]);
                    if i + 1 < n {
                        line.push((centers[i + 1].0, centers[i].1));
                    }
                }
                line.push((centers[n - 1].0 + BODY_EXT, centers[n - 1].1));
                (centers, line)
            }
            PathKind::SCurve => {
                let k = n.div_ceil(2);
                let bottom = top + Self::row_gap(self.stack, self.mark_half);
                let turn_x = x(k - 1) + self.step / 2.0;
                let centers: Vec<_> = (0..n)
                    .map(|i| {
                        if i < k {
                            (x(i), top + jit())
                        } else {
                            (x(k - 1) - (i - k) as f64 * self.step, bottom + jit())
                        }
                    })
                    .collect();
                let mut line = vec![(centers[0].0 - BODY_EXT, centers[0].1)];
                line.extend(&centers[..k]);
                line.push((turn_x, centers[k - 1].1));
                line.push((turn_x, centers[k].1));
                line.extend(&centers[k..]);
                line.push((centers[n - 1].0 - BODY_EXT, centers[n - 1].1));
                (centers, line)
            }
        }
    }
}

/// A point `BODY_EXT` beyond `to`, continuing the direction `from -> to`.
fn extend(from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = (dx * dx + dy * dy).sqrt().max(1e-9);
    (to.0 + dx / len * BODY_EXT, to.1 + dy / len * BODY_EXT)
}

/// Tight bbox of a mark of `(w, h)` whose center is snapped near `(cx, cy)`.
pub(crate) fn snap_box(cx: f64, cy: f64, w: u32, h: u32) -> (i32, i32) {
    ((cx - w as f64 / 2.0).round() as i32, (cy - h as f64 / 2.0).round() as i32)
}

fn mark_shape(shape: MarkShape, left: i32, top: i32, w: u32, h: u32) -> Shape {
    let (x, y, w, h) = (left as f64, top as f64, w as f64, h as f64);
    let (cx, cy) = (x + w / 2.0, y + h / 2.0);
    match shape {
        MarkShape::Rect => Shape::Rect { x, y, w, h },
        MarkShape::Circle => Shape::Ellipse { cx, cy, rx: w / 2.0, ry: h / 2.0 },
        MarkShape::Diamond => Shape::Polygon(vec![(cx, y), (x + w, cy), (cx, y + h), (x, cy)]),
        MarkShape::Capsule => {
            let r = w.min(h) / 2.0;
            if w >= h {
                Shape::Capsule { a: (x + r, cy), b: (x + w - r, cy), r }
            } else {
                Shape::Capsule { a: (cx, y + r), b: (cx, y + h - r), r }
            }
        }
    }
}

struct Placed {
    category: ElementCategory,
    color: Rgb,
    coverage: Coverage,
}

/// Member coverage at the origin, before placement.
fn member_coverage(spec: &TimelineSpec, datum: &EventDatum, kind: MemberKind, side: Side) -> Result<Coverage> {
    let st = &spec.style;
    let cov = match kind {
        MemberKind::EventText => Coverage::text(&format_time(datum.time), st.event_font_size, 0, 0),
        MemberKind::AnnotationText => Coverage::text(&datum.label.to_uppercase(), st.font_size, 0, 0),
        MemberKind::Icon => {
            let s = st.icon_size as f64;
            icons::icon_shape(datum.icon_id.unwrap_or(0), 0.0, 0.0, s, s).rasterize()
        }
        MemberKind::Connector => {
            let (w, h) = connector_dims(spec, side);
            Shape::Rect { x: 0.0, y: 0.0, w: w as f64, h: h as f64 }.rasterize()
        }
    };
    let cov = cov.ok_or_else(|| Error::InvalidSpec(format!("{kind:?} for {:?} renders empty", datum.label)))?;
    Ok(cov.translate(-cov.bbox.left, -cov.bbox.top))
}

fn member_color(spec: &TimelineSpec, kind: MemberKind) -> Rgb {
    match kind {
        MemberKind::EventText | MemberKind::AnnotationText => spec.style.text_color,
        MemberKind::Connector => spec.style.annotation_mark_color,
        MemberKind::Icon => spec.style.icon_color,
    }
}

/// Place a near-to-far stack beside `mark`.
fn place_stack(
    spec: &TimelineSpec,
    datum: &EventDatum,
    mark: &BBox,
    members: &[MemberKind],
    side: Side,
) -> Result<Vec<Placed>> {
    let (cx, cy) = mark.center();
    let mut edge = match side {
        Side::Up => mark.top - GAP,
        Side::Down => mark.bottom() + GAP,
        Side::Left => mark.left - GAP,
        Side::Right => mark.right() + GAP,
    };
    let mut out = Vec::with_capacity(members.len());
    for &kind in members {
        let cov = member_coverage(spec, datum, kind, side)?;
        let (w, h) = (cov.bbox.width as i32, cov.bbox.height as i32);
        let (left, top) = match side {
            Side::Up => {
                let top = edge - h;
                edge = top - GAP;
                ((cx - w as f64 / 2.0).round() as i32, top)
            }
            Side::Down => {
                let top = edge;
                edge = top + h + GAP;
                ((cx - w as f64 / 2.0).round() as i32, top)
            }
            Side::Left => {
                let left = edge - w;
                edge = left - GAP;
                (left, (cy - h as f64 / 2.0).round() as i32)
            }
            Side::Right => {
                let left = edge;
                edge = left + w + GAP;
                (left, (cy - h as f64 / 2.0).round() as i32)
            }
        };
        out.push(Placed {
            category: kind.category(),
            color: member_color(spec, kind),
            coverage: cov.translate(left, top),
        });
    }
    Ok(out)
}

fn inside(canvas: (u32, u32), b: &BBox) -> bool {
    b.left >= 0 && b.top >= 0 && b.right() <= canvas.0 as i32 && b.bottom() <= canvas.1 as i32
}

fn collides(p: &Placed, others: &[&Placed]) -> bool {
    others.iter().any(|o| o.coverage.overlaps(&p.coverage))
}

/// Mark centers for linear rows, in data order.
fn linear_centers(spec: &TimelineSpec, data: &[EventDatum]) -> Result<Vec<(f64, f64)>> {
    let (frame, _, _) = linear_frame(spec);
    let mut centers = vec![(0.0, 0.0); data.len()];
    for (r, row) in layout_rows(spec.global.layout, data.len()).iter().enumerate() {
        let times: Vec<f64> = row.iter().map(|&i| data[i].time).collect();
        let pos = scale::positions(spec.global.scale, &times, spec.axis_length)?;
        for (&i, p) in row.iter().zip(pos) {
            let u = frame.lead + p;
            let v = frame.row_v[r];
            centers[i] = match spec.global.orientation {
                Orientation::Vertical => (v, u),
                _ => (u, v),
            };
        }
    }
    Ok(centers)
}

fn linear_bodies(spec: &TimelineSpec, n: usize) -> Vec<Shape> {
    let (frame, _, _) = linear_frame(spec);
    let t = spec.style.body_thickness as f64;
    let rows = layout_rows(spec.global.layout, n).len();
    (0..rows)
        .map(|r| {
            let v = (frame.row_v[r] - t / 2.0).round();
            let u0 = frame.lead - BODY_EXT;
            let len = spec.axis_length + 2.0 * BODY_EXT;
            match spec.global.orientation {
                Orientation::Vertical => Shape::Rect { x: v, y: u0, w: t, h: len },
                _ => Shape::Rect { x: u0, y: v, w: len, h: t },
            }
        })
        .collect()
}

pub(crate) fn render(spec: &TimelineSpec, data: &[EventDatum], seed: u64) -> Result<AnnotatedTimeline> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canvas = spec.canvas;
    let (mw, mh) = mark_dims(spec);

    let (centers, bodies) = match spec.global.representation {
        Representation::Linear => (linear_centers(spec, data)?, linear_bodies(spec, data.len())),
        Representation::Arbitrary => {
            let geo = ArbitraryGeometry::new(spec, spec.axis_length);
            let (centers, line) = geo.path(spec, &mut rng);
            let t = spec.style.body_thickness as f64;
            (centers, vec![Shape::polyline(&line, t / 2.0)])
        }
    };

    let mut placed: Vec<Placed> = Vec::new();
    if spec.style.schema.has_main_body {
        for body in bodies {
            let coverage = body.rasterize().ok_or_else(|| Error::LayoutOverflow("main body renders empty".into()))?;
            placed.push(Placed { category: ElementCategory::MainBody, color: spec.style.body_color, coverage });
        }
    }
    let n_bodies = placed.len();

    let marks: Vec<Placed> = centers
        .iter()
        .map(|&(cx, cy)| {
            let (left, top) = snap_box(cx, cy, mw, mh);
            let coverage =
                mark_shape(spec.style.mark_shape, left, top, mw, mh).rasterize().expect("mark shape is non-empty");
            Placed { category: ElementCategory::EventMark, color: spec.style.mark_fill, coverage }
        })
        .collect();

    let mut members: Vec<Vec<Placed>> = Vec::with_capacity(data.len());
    for (i, datum) in data.iter().enumerate() {
        let mark_box = marks[i].coverage.bbox;
        let group = match spec.global.representation {
            Representation::Linear => {
                let ((ann_side, ann), (ev_side, ev)) = linear_sides(spec);
                let mut g = place_stack(spec, datum, &mark_box, &ann, ann_side)?;
                g.extend(place_stack(spec, datum, &mark_box, &ev, ev_side)?);
                g
            }
            Representation::Arbitrary => {
                let stack = single_stack(spec);
                let mut chosen = None;
                for side in [Side::Up, Side::Down] {
                    let g = place_stack(spec, datum, &mark_box, &stack, side)?;
                    let others: Vec<&Placed> =
                        placed.iter().chain(marks.iter()).chain(members.iter().flatten()).collect();
                    if g.iter().all(|p| inside(canvas, &p.coverage.bbox) && !collides(p, &others)) {
                        chosen = Some(g);
                        break;
                    }
                }
                chosen.ok_or_else(|| Error::LayoutOverflow(format!("no free side for the members of event {i}")))?
            }
        };
        members.push(group);
    }

    // z-order: bodies, then each event's mark and members
    let mut events = Vec::with_capacity(data.len());
    for (mark, group) in marks.into_iter().zip(members) {
        let mut idx = vec![placed.len()];
        placed.push(mark);
        for m in group {
            idx.push(placed.len());
            placed.push(m);
        }
        events.push(idx);
    }

    for p in &placed {
        if !inside(canvas, &p.coverage.bbox) {
            return Err(Error::LayoutOverflow(format!(
                "{} at {:?} leaves the {}x{} canvas",
                p.category, p.coverage.bbox, canvas.0, canvas.1
            )));
        }
    }
    for i in n_bodies..placed.len() {
        for j in n_bodies..i {
            if placed[i].coverage.overlaps(&placed[j].coverage) {
                return Err(Error::LayoutOverflow(format!(
                    "{} overlaps {} at {:?}",
                    placed[i].category, placed[j].category, placed[i].coverage.bbox
                )));
            }
        }
    }
    for i in 0..n_bodies {
        for j in 0..i {
            if placed[i].coverage.overlaps(&placed[j].coverage) {
                return Err(Error::LayoutOverflow("main bodies overlap".into()));
            }
        }
    }

    paint(spec, placed, events)
}

fn paint(spec: &TimelineSpec, placed: Vec<Placed>, events: Vec<Vec<usize>>) -> Result<AnnotatedTimeline> {
    let (w, h) = spec.canvas;
    let mut image = RgbImage::from_pixel(w, h, Pixel(spec.style.background));
    let mut owner = vec![usize::MAX; w as usize * h as usize];
    for (i, p) in placed.iter().enumerate() {
        p.coverage.paint(&mut image, p.color);
        for (x, y) in p.coverage.pixels() {
            owner[y as usize * w as usize + x as usize] = i;
        }
    }
    let mut elements = Vec::with_capacity(placed.len());
    for (i, p) in placed.iter().enumerate() {
        let b = p.coverage.bbox;
        let visible = PixelMask::from_fn(b.width, b.height, |x, y| {
            let (ax, ay) = (b.left as usize + x as usize, b.top as usize + y as usize);
            owner[ay * w as usize + ax] == i
        });
        let cov = Coverage::new(b, visible)
            .tight()
            .ok_or_else(|| Error::LayoutOverflow(format!("{} is fully occluded", p.category)))?;
        elements.push(Element { category: p.category, bbox: cov.bbox, mask: cov.mask });
    }
    let global = spec.global;
    debug_assert!(global.representation != Representation::Arbitrary || global.orientation == Orientation::Other);
    Ok(AnnotatedTimeline { image, global, elements, events })
}
