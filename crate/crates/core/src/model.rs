//! Shared data model: element taxonomy, detections, global design
//! dimensions, and annotated ground truth.

use std::fmt;
use std::str::FromStr;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::{anchored_mask_iou, PixelMask};

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementCategory {
    EventMark,
    EventText,
    AnnotationMark,
    AnnotationText,
    AnnotationIcon,
    MainBody,
}

impl ElementCategory {
    pub const ALL: [ElementCategory; 6] = [
        ElementCategory::EventMark,
        ElementCategory::EventText,
        ElementCategory::AnnotationMark,
        ElementCategory::AnnotationText,
        ElementCategory::AnnotationIcon,
        ElementCategory::MainBody,
    ];

    /// Graphical marks cut out of the source image and reused as-is.
    pub fn is_reusable(self) -> bool {
        matches!(self, ElementCategory::EventMark | ElementCategory::AnnotationMark | ElementCategory::MainBody)
    }

    /// Content slots that are redrawn with new data.
    pub fn is_updatable(self) -> bool {
        !self.is_reusable()
    }

    pub fn is_text(self) -> bool {
        matches!(self, ElementCategory::EventText | ElementCategory::AnnotationText)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ElementCategory::EventMark => "event_mark",
            ElementCategory::EventText => "event_text",
            ElementCategory::AnnotationMark => "annotation_mark",
            ElementCategory::AnnotationText => "annotation_text",
            ElementCategory::AnnotationIcon => "annotation_icon",
            ElementCategory::MainBody => "main_body",
        }
    }
}

impl fmt::Display for ElementCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Detected,
    Recovered,
}

/// Score carried by detections synthesized during redundancy recovery.
pub const RECOVERED_SCORE: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub category: ElementCategory,
    pub score: f64,
    pub mask: Option<PixelMask>,
    pub provenance: Provenance,
}

impl Detection {
    pub fn new(category: ElementCategory, bbox: BBox, score: f64) -> Self {
        Self { bbox, category, score, mask: None, provenance: Provenance::Detected }
    }

    pub fn with_mask(mut self, mask: PixelMask) -> Self {
        debug_assert!(mask.matches_bbox(&self.bbox));
        self.mask = Some(mask);
        self
    }

    pub fn recovered(category: ElementCategory, bbox: BBox, sentinel: f64) -> Self {
        Self { bbox, category, score: sentinel, mask: None, provenance: Provenance::Recovered }
    }

    pub fn is_recovered(&self) -> bool {
        self.provenance == Provenance::Recovered
    }

    /// Check the detection-level invariants: score in [0, 1], mask shape
    /// matches the box and is non-empty.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(Error::schema("score", format!("{} not in [0, 1]", self.score)));
        }
        if let Some(m) = &self.mask {
            if !m.matches_bbox(&self.bbox) {
                return Err(Error::InvalidMask(format!(
                    "mask {}x{} does not match bbox {}x{}",
                    m.width(),
                    m.height(),
                    self.bbox.width,
                    self.bbox.height
                )));
            }
            if m.is_empty() {
                return Err(Error::InvalidMask("mask has no set pixels".into()));
            }
            if self.is_recovered() {
                return Err(Error::InvalidMask("recovered detection carries a mask".into()));
            }
        }
        Ok(())
    }

    /// The mask if present, otherwise the full box.
    pub fn mask_or_box(&self) -> PixelMask {
        self.mask.clone().unwrap_or_else(|| PixelMask::filled(self.bbox.width, self.bbox.height))
    }
}

pub fn mask_iou(a: &Detection, b: &Detection) -> Result<f64> {
    match (&a.mask, &b.mask) {
        (Some(ma), Some(mb)) => Ok(anchored_mask_iou(&a.bbox, ma, &b.bbox, mb)),
        _ => Err(Error::MissingMask),
    }
}

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $s:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $s),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($name::$variant),)+
                    other => Err(Error::InfeasibleConstraint(format!(
                        "unknown {} value {other:?}", stringify!($name)
                    ))),
                }
            }
        }
    };
}

string_enum!(Representation {
    Linear => "linear",
    Arbitrary => "arbitrary",
});

string_enum!(ScaleKind {
    Chronological => "chronological",
    Relative => "relative",
    Logarithmic => "logarithmic",
    Sequential => "sequential",
    SequentialInterim => "sequential_interim",
});

string_enum!(Layout {
    Unified => "unified",
    Faceted => "faceted",
    Segmented => "segmented",
    FacetedSegmented => "faceted_segmented",
});

string_enum!(Orientation {
    Horizontal => "horizontal",
    Vertical => "vertical",
    Other => "other",
});

/// The global design dimensions of one timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalInfo {
    pub representation: Representation,
    pub scale: ScaleKind,
    pub layout: Layout,
    pub orientation: Orientation,
}

/// Every supported (representation, scale, layout) combination: all linear
/// combinations plus sequential unified arbitrary paths.
pub fn viable_combinations() -> Vec<(Representation, ScaleKind, Layout)> {
    let mut out = Vec::with_capacity(21);
    for &scale in ScaleKind::ALL {
        for &layout in Layout::ALL {
            out.push((Representation::Linear, scale, layout));
        }
    }
    out.push((Representation::Arbitrary, ScaleKind::Sequential, Layout::Unified));
    out
}

pub fn is_viable(representation: Representation, scale: ScaleKind, layout: Layout) -> bool {
    match representation {
        Representation::Linear => true,
        Representation::Arbitrary => scale == ScaleKind::Sequential && layout == Layout::Unified,
    }
}

impl GlobalInfo {
    pub fn new(
        representation: Representation,
        scale: ScaleKind,
        layout: Layout,
        orientation: Orientation,
    ) -> Result<Self> {
        let g = Self { representation, scale, layout, orientation };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_viable(self.representation, self.scale, self.layout) {
            return Err(Error::InfeasibleConstraint(format!(
                "({}, {}, {}) is not a viable combination",
                self.representation, self.scale, self.layout
            )));
        }
        Ok(())
    }
}

/// One ground-truth element. The mask is bbox-local.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub category: ElementCategory,
    pub bbox: BBox,
    pub mask: PixelMask,
}

impl Element {
    pub fn to_detection(&self, score: f64) -> Detection {
        Detection::new(self.category, self.bbox, score).with_mask(self.mask.clone())
    }
}

/// A rendered timeline with exact element-level ground truth.
#[derive(Debug, Clone)]
pub struct AnnotatedTimeline {
    pub image: RgbImage,
    pub global: GlobalInfo,
    pub elements: Vec<Element>,
    /// Indices into `elements`, one group per event, in data order.
    pub events: Vec<Vec<usize>>,
}

impl AnnotatedTimeline {
    /// Every non-main-body element belongs to exactly one event group.
    pub fn check_groupings(&self) -> Result<()> {
        let mut seen = vec![0usize; self.elements.len()];
        for group in &self.events {
            for &i in group {
                let slot =
                    seen.get_mut(i).ok_or_else(|| Error::InvalidSpec(format!("event index {i} out of range")))?;
                *slot += 1;
            }
        }
        for (i, e) in self.elements.iter().enumerate() {
            let expected = usize::from(e.category != ElementCategory::MainBody);
            if seen[i] != expected {
                return Err(Error::InvalidSpec(format!(
                    "element {i} ({}) appears in {} event groups",
                    e.category, seen[i]
                )));
            }
        }
        Ok(())
    }

    pub fn perfect_detections(&self, score: f64) -> Vec<Detection> {
        self.elements.iter().map(|e| e.to_detection(score)).collect()
    }
}
