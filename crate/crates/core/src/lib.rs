//! Deconstruct bitmap timeline infographics into extensible templates and
//! render new timelines from them.

pub mod detsim;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod json;
pub mod mask;
pub mod model;
pub mod raster;
pub mod reconstruct;
pub mod render;
pub mod scale;
pub mod segment;
pub mod synth;
pub mod template;

pub use error::{Error, Result};
pub use geometry::{iou, union_bbox, BBox};
pub use mask::PixelMask;
pub use model::{
    mask_iou, AnnotatedTimeline, Detection, Element, ElementCategory, GlobalInfo, Layout, Orientation, Provenance,
    Representation, Rgb, ScaleKind,
};
