//! PNG + JSON annotation sidecar for generated timelines.
//!
//! ```json
//! {"global": {...},
//!  "elements": [{"category": "event_mark", "bbox": [top, left, width, height], "mask_rle": [..]}],
//!  "events": [[0, 1, 2], ...]}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EventDatum;
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::{AnnotatedTimeline, Element, ElementCategory, GlobalInfo};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub category: ElementCategory,
    pub bbox: BBox,
    pub mask_rle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub global: GlobalInfo,
    pub elements: Vec<ElementRecord>,
    pub events: Vec<Vec<usize>>,
    /// The data the timeline was generated from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<EventDatum>>,
}

impl Sidecar {
    pub fn from_timeline(t: &AnnotatedTimeline, data: Option<&[EventDatum]>) -> Self {
        Self {
            global: t.global,
            elements: t
                .elements
                .iter()
                .map(|e| ElementRecord { category: e.category, bbox: e.bbox, mask_rle: e.mask.encode_rle() })
                .collect(),
            events: t.events.clone(),
            data: data.map(<[EventDatum]>::to_vec),
        }
    }

    pub fn elements(&self) -> Result<Vec<Element>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mask = PixelMask::decode_rle(r.bbox.width, r.bbox.height, &r.mask_rle)
                    .map_err(|e| Error::schema(format!("elements[{i}].mask_rle"), e.to_string()))?;
                Ok(Element { category: r.category, bbox: r.bbox, mask })
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        crate::json::from_str(text)
    }
}

/// Paths `<dir>/<stem>.png` and `<dir>/<stem>.json`.
pub fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.png")), dir.join(format!("{stem}.json")))
}

pub fn write(dir: &Path, stem: &str, t: &AnnotatedTimeline, data: Option<&[EventDatum]>) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (png, json) = paths(dir, stem);
    t.image.save(&png)?;
    let text = serde_json::to_string(&Sidecar::from_timeline(t, data)).expect("sidecar serializes");
    fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
    Ok((png, json))
}

/// Load a timeline from its sidecar; the image is the PNG with the same stem.
pub fn read(json: &Path) -> Result<(AnnotatedTimeline, Option<Vec<EventDatum>>)> {
    let text = fs::read_to_string(json).map_err(|e| Error::io(json, e))?;
    let sidecar = Sidecar::from_json(&text)?;
    let image = image::open(json.with_extension("png"))?.to_rgb8();
    let timeline = AnnotatedTimeline {
        image,
        global: sidecar.global,
        elements: sidecar.elements()?,
        events: sidecar.events.clone(),
    };
    timeline.check_groupings()?;
    Ok((timeline, sidecar.data))
}
