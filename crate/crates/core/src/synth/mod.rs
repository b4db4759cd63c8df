//! Labeled synthetic timeline generator.
//!
//! [`sample_spec`] draws a design (global dimensions plus style) from the
//! viable design space, [`sample_data`] draws event data that fits it, and
//! [`generate`] renders the bitmap together with exact per-element
//! category, box, and mask.

mod layout;
pub mod sidecar;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    is_viable, viable_combinations, AnnotatedTimeline, GlobalInfo, Layout, Orientation, Representation, Rgb, ScaleKind,
};
use crate::raster::{font, icons, luminance};
use crate::scale::{self, layout_rows};

pub use layout::{EVENT_LABEL_CHARS, MARGIN};

pub const MIN_EVENTS: usize = 2;
pub const MAX_EVENTS: usize = 19;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkShape {
    Rect,
    Circle,
    Diamond,
    Capsule,
}

impl MarkShape {
    pub const ALL: [MarkShape; 4] = [MarkShape::Rect, MarkShape::Circle, MarkShape::Diamond, MarkShape::Capsule];
}

/// Parametric path family for arbitrary representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    ZigZag,
    SCurve,
    Staircase,
}

impl PathKind {
    pub const ALL: [PathKind; 3] = [PathKind::ZigZag, PathKind::SCurve, PathKind::Staircase];
}

/// Which element kinds every event carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnotationSchema {
    pub has_event_text: bool,
    pub has_annotation_text: bool,
    pub has_annotation_icon: bool,
    pub has_annotation_mark: bool,
    pub has_main_body: bool,
}

impl AnnotationSchema {
    pub const FULL: AnnotationSchema = AnnotationSchema {
        has_event_text: true,
        has_annotation_text: true,
        has_annotation_icon: true,
        has_annotation_mark: true,
        has_main_body: true,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleParams {
    pub mark_shape: MarkShape,
    pub mark_fill: Rgb,
    pub mark_size: u32,
    /// Annotation text size.
    pub font_size: u32,
    pub event_font_size: u32,
    pub text_color: Rgb,
    pub background: Rgb,
    pub body_color: Rgb,
    pub body_thickness: u32,
    pub annotation_mark_color: Rgb,
    pub connector_length: u32,
    pub icon_color: Rgb,
    pub icon_size: u32,
    /// Upper bound on annotation label length, in characters.
    pub label_chars: usize,
    pub path_kind: PathKind,
    pub schema: AnnotationSchema,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineSpec {
    pub n_events: usize,
    pub global: GlobalInfo,
    pub style: StyleParams,
    /// `(width, height)` in pixels.
    pub canvas: (u32, u32),
    /// Pixel length of each row's axis (linear) or path step (arbitrary).
    pub axis_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDatum {
    pub time: f64,
    pub label: String,
    #[serde(default, rename = "icon", skip_serializing_if = "Option::is_none")]
    pub icon_id: Option<usize>,
}

impl EventDatum {
    pub fn new(time: f64, label: impl Into<String>) -> Self {
        Self { time, label: label.into(), icon_id: None }
    }
}

impl TimelineSpec {
    /// Set the axis length and grow or shrink the canvas to fit it.
    pub fn with_axis_length(mut self, axis_length: f64) -> Self {
        self.axis_length = axis_length;
        self.canvas = match self.global.representation {
            Representation::Linear => layout::linear_canvas(&self, axis_length),
            Representation::Arbitrary => layout::arbitrary_canvas(&self, axis_length),
        };
        self
    }

    /// Minimum mark spacing this style needs along the axis.
    pub fn min_spacing(&self) -> f64 {
        layout::min_spacing(self)
    }
}

/// Text shown in an event-text slot for a time value.
pub fn format_time(t: f64) -> String {
    if (t - t.round()).abs() < 1e-9 {
        format!("{}", t.round() as i64)
    } else {
        format!("{t:.1}")
    }
}

/// Optional fixed values for [`sample_spec`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecConstraints {
    pub representation: Option<Representation>,
    pub scale: Option<ScaleKind>,
    pub layout: Option<Layout>,
    pub orientation: Option<Orientation>,
    pub n_events: Option<usize>,
    pub schema: Option<AnnotationSchema>,
}

fn orientation_allowed(rep: Representation, o: Orientation) -> bool {
    match rep {
        Representation::Linear => o != Orientation::Other,
        Representation::Arbitrary => o == Orientation::Other,
    }
}

fn min_events(layout: Layout) -> usize {
    match layout {
        Layout::Unified => MIN_EVENTS,
        Layout::Faceted | Layout::Segmented => 4,
        Layout::FacetedSegmented => 8,
    }
}

fn color_with_contrast(rng: &mut impl Rng, against: Rgb, min_gap: f64) -> Rgb {
    let base = luminance(against);
    for _ in 0..1000 {
        let c = [rng.gen(), rng.gen(), rng.gen()];
        if (luminance(c) - base).abs() >= min_gap {
            return c;
        }
    }
    if base > 127.0 {
        [0, 0, 0]
    } else {
        [255, 255, 255]
    }
}

/// Draw a viable timeline design. Deterministic for a given seed.
pub fn sample_spec(seed: u64, constraints: Option<&SpecConstraints>) -> Result<TimelineSpec> {
    let default = SpecConstraints::default();
    let c = constraints.unwrap_or(&default);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let combos: Vec<_> = viable_combinations()
        .into_iter()
        .filter(|&(r, s, l)| {
            c.representation.is_none_or(|v| v == r)
                && c.scale.is_none_or(|v| v == s)
                && c.layout.is_none_or(|v| v == l)
                && c.orientation.is_none_or(|o| orientation_allowed(r, o))
                && c.n_events.is_none_or(|n| n >= min_events(l) && n <= MAX_EVENTS)
        })
        .collect();
    let &(representation, scale_kind, layout) = combos
        .choose(&mut rng)
        .ok_or_else(|| Error::InfeasibleConstraint(format!("no viable design satisfies {c:?}")))?;
    debug_assert!(is_viable(representation, scale_kind, layout));

    let orientation = match (representation, c.orientation) {
        (_, Some(o)) => o,
        (Representation::Arbitrary, None) => Orientation::Other,
        (Representation::Linear, None) => {
            if rng.gen_bool(0.6) {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            }
        }
    };
    let global = GlobalInfo::new(representation, scale_kind, layout, orientation)?;

    let n_events = match c.n_events {
        Some(n) => n,
        None => rng.gen_range(min_events(layout)..=MAX_EVENTS),
    };

    let dark = rng.gen_bool(0.2);
    let background: Rgb = if dark {
        [rng.gen_range(0..50), rng.gen_range(0..50), rng.gen_range(0..60)]
    } else {
        [rng.gen_range(225..=255), rng.gen_range(225..=255), rng.gen_range(220..=255)]
    };
    let mark_fill = color_with_contrast(&mut rng, background, 90.0);
    let body_color = loop {
        let c = color_with_contrast(&mut rng, background, 70.0);
        if (luminance(c) - luminance(mark_fill)).abs() >= 40.0 {
            break c;
        }
    };
    let schema = c.schema.unwrap_or_else(|| {
        let has_annotation_text = rng.gen_bool(0.75);
        let has_annotation_icon = rng.gen_bool(0.5);
        AnnotationSchema {
            has_event_text: rng.gen_bool(0.9),
            has_annotation_text,
            has_annotation_icon,
            has_annotation_mark: (has_annotation_text || has_annotation_icon) && rng.gen_bool(0.6),
            has_main_body: rng.gen_bool(0.85),
        }
    });
    let font_size = rng.gen_range(10..=15);
    let style = StyleParams {
        mark_shape: *MarkShape::ALL.choose(&mut rng).unwrap(),
        mark_fill,
        mark_size: rng.gen_range(14..=24),
        font_size,
        event_font_size: font_size + [0, 2, 4][rng.gen_range(0..3)],
        text_color: color_with_contrast(&mut rng, background, 110.0),
        background,
        body_color,
        body_thickness: rng.gen_range(3..=6),
        annotation_mark_color: color_with_contrast(&mut rng, background, 80.0),
        connector_length: rng.gen_range(8..=14),
        icon_color: color_with_contrast(&mut rng, background, 90.0),
        icon_size: rng.gen_range(12..=18),
        label_chars: rng.gen_range(4..=7),
        path_kind: *PathKind::ALL.choose(&mut rng).unwrap(),
        schema,
    };

    let mut spec = TimelineSpec { n_events, global, style, canvas: (1, 1), axis_length: 0.0 };
    let plan = layout::plan(&spec);
    spec.axis_length = plan.axis_length;
    spec.canvas = plan.canvas;
    Ok(spec)
}

const WORDS: [&[&str]; 4] = [
    &["IDEA", "PLAN", "DEAL", "GOAL", "TEAM", "FUND", "TEST", "SHIP", "MOVE", "GROW", "RISE", "PEAK"],
    &["START", "MERGE", "BUILD", "GRANT", "AWARD", "TRIAL", "PILOT", "SCALE", "CHART", "PIVOT"],
    &["LAUNCH", "SUMMIT", "TREATY", "RECORD", "PATENT", "EXPAND", "DESIGN", "SIGNED", "REVIEW"],
    &["FOUNDED", "RELEASE", "REBRAND", "MILE ON", "OPENING", "CONCERT", "ELECTED", "SUCCESS"],
];

fn time_domain(kind: ScaleKind, rng: &mut impl Rng) -> (f64, f64) {
    match kind {
        ScaleKind::Chronological | ScaleKind::Sequential | ScaleKind::SequentialInterim => {
            let lo = rng.gen_range(1800..=1990) as f64;
            (lo, (lo + rng.gen_range(30..=200) as f64).min(9999.0))
        }
        ScaleKind::Relative => (0.0, rng.gen_range(200..=999) as f64),
        ScaleKind::Logarithmic => (0.0, rng.gen_range(900..=9999) as f64),
    }
}

/// Draw event data for `spec` whose laid-out marks keep at least the
/// minimum spacing on every row.
pub fn sample_data(spec: &TimelineSpec, seed: u64) -> Result<Vec<EventDatum>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_da7a);
    let n = spec.n_events;
    let kind = spec.global.scale;
    let rows = layout_rows(spec.global.layout, n);
    let min_gap = layout::min_spacing(spec);
    let (lo, hi) = time_domain(kind, &mut rng);

    let mut times = None;
    for attempt in 0..2000 {
        let candidate: Vec<f64> = if attempt < 1999 {
            // stick-breaking over normalized positions, then back to time
            let mut gaps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.4..1.6)).collect();
            let total: f64 = gaps.iter().sum();
            gaps.iter_mut().for_each(|g| *g /= total);
            let mut acc = 0.0;
            let mut fr = vec![0.0];
            for g in &gaps {
                acc += g;
                fr.push(acc.min(1.0));
            }
            let inv_kind = if kind == ScaleKind::SequentialInterim { ScaleKind::Chronological } else { kind };
            fr.iter().map(|&f| scale::invert_fraction(f, inv_kind, lo, hi).round()).collect()
        } else {
            // evenly spaced integer times always satisfy linear scales
            (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).round()).collect()
        };
        if candidate.windows(2).any(|w| w[1] <= w[0]) {
            continue;
        }
        // arbitrary paths place events one step apart whatever the times
        let ok = spec.global.representation == Representation::Arbitrary
            || rows.iter().all(|row| {
                let ts: Vec<f64> = row.iter().map(|&i| candidate[i]).collect();
                let p = scale::positions(kind, &ts, spec.axis_length).unwrap_or_default();
                p.windows(2).all(|w| w[1] - w[0] >= min_gap)
            });
        if ok {
            times = Some(candidate);
            break;
        }
    }
    let times = times.ok_or_else(|| {
        Error::InfeasibleConstraint(format!(
            "could not place {n} events with {min_gap:.0}px spacing on a {:.0}px {} axis",
            spec.axis_length, kind
        ))
    })?;

    let words = WORDS[spec.style.label_chars.clamp(4, 7) - 4];
    Ok(times
        .into_iter()
        .map(|time| EventDatum {
            time,
            label: words.choose(&mut rng).unwrap().to_string(),
            icon_id: spec.style.schema.has_annotation_icon.then(|| rng.gen_range(0..icons::ICON_COUNT)),
        })
        .collect())
}

/// Render `spec` with `data`; `seed` drives path jitter for arbitrary
/// representations. Deterministic per `(spec, data, seed)`.
pub fn generate(spec: &TimelineSpec, data: &[EventDatum], seed: u64) -> Result<AnnotatedTimeline> {
    validate(spec, data)?;
    layout::render(spec, data, seed)
}

fn validate(spec: &TimelineSpec, data: &[EventDatum]) -> Result<()> {
    spec.global.validate()?;
    if !(MIN_EVENTS..=MAX_EVENTS).contains(&spec.n_events) {
        return Err(Error::InvalidSpec(format!(
            "n_events must be in [{MIN_EVENTS}, {MAX_EVENTS}], got {}",
            spec.n_events
        )));
    }
    if data.len() != spec.n_events {
        return Err(Error::InvalidSpec(format!(
            "spec has {} events but {} data points were given",
            spec.n_events,
            data.len()
        )));
    }
    if data.windows(2).any(|w| !(w[1].time > w[0].time)) {
        return Err(Error::InvalidSpec("event times must be strictly increasing".into()));
    }
    if !orientation_allowed(spec.global.representation, spec.global.orientation) {
        return Err(Error::InfeasibleConstraint(format!(
            "{} representation cannot have {} orientation",
            spec.global.representation, spec.global.orientation
        )));
    }
    for d in data {
        if let Some(c) = d.label.chars().find(|&c| !font::supports(c)) {
            return Err(Error::InvalidSpec(format!("label {:?} has unsupported character {c:?}", d.label)));
        }
    }
    Ok(())
}
