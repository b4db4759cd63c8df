//! JSON form of [`TemplateDoc`]: masks as RLE, patches as base64 PNG.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use image::{ImageFormat, RgbaImage};
use serde::{Deserialize, Serialize};

use super::{EventSlot, FontInfo, ReusableElement, TemplateDoc, TextRole, UpdatableElement};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::{ElementCategory, GlobalInfo, Rgb};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReusableRecord {
    category: ElementCategory,
    bbox: BBox,
    mask_rle: Vec<u32>,
    patch_png: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdatableRecord {
    category: ElementCategory,
    bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    font: Option<FontInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<Rgb>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<TextRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    patch_png: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    schema_version: u32,
    global: GlobalInfo,
    canvas: (u32, u32),
    background: Rgb,
    reusable: Vec<ReusableRecord>,
    updatable: Vec<UpdatableRecord>,
    event_slots: Vec<EventSlot>,
    rows: Vec<Vec<usize>>,
}

fn encode_png(img: &RgbaImage) -> String {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png).expect("PNG encoding into memory");
    STANDARD.encode(buf.into_inner())
}

fn decode_png(text: &str, at: impl Fn() -> String) -> Result<RgbaImage> {
    let bytes = STANDARD.decode(text).map_err(|e| Error::schema(at(), e.to_string()))?;
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
        .map_err(|e| Error::schema(at(), e.to_string()))?;
    Ok(img.to_rgba8())
}

impl TemplateDoc {
    pub fn to_json(&self) -> String {
        let file = TemplateFile {
            schema_version: self.schema_version,
            global: self.global,
            canvas: self.canvas,
            background: self.background,
            reusable: self
                .reusable
                .iter()
                .map(|r| ReusableRecord {
                    category: r.category,
                    bbox: r.bbox,
                    mask_rle: r.mask.encode_rle(),
                    patch_png: encode_png(&r.patch),
                })
                .collect(),
            updatable: self
                .updatable
                .iter()
                .map(|u| UpdatableRecord {
                    category: u.category,
                    bbox: u.bbox,
                    font: u.font.clone(),
                    color: u.color,
                    role: u.role,
                    text: u.text.clone(),
                    patch_png: u.patch.as_ref().map(encode_png),
                })
                .collect(),
            event_slots: self.event_slots.clone(),
            rows: self.rows.clone(),
        };
        serde_json::to_string_pretty(&file).expect("template serializes")
    }

    pub fn from_json(text: &str) -> Result<TemplateDoc> {
        let file: TemplateFile = crate::json::from_str(text)?;
        let reusable = file
            .reusable
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let mask = PixelMask::decode_rle(r.bbox.width, r.bbox.height, &r.mask_rle)
                    .map_err(|e| Error::schema(format!("reusable[{i}].mask_rle"), e.to_string()))?;
                let patch = decode_png(&r.patch_png, || format!("reusable[{i}].patch_png"))?;
                Ok(ReusableElement { category: r.category, bbox: r.bbox, mask, patch })
            })
            .collect::<Result<Vec<_>>>()?;
        let updatable = file
            .updatable
            .into_iter()
            .enumerate()
            .map(|(i, u)| {
                let patch = u.patch_png.map(|p| decode_png(&p, || format!("updatable[{i}].patch_png"))).transpose()?;
                Ok(UpdatableElement {
                    category: u.category,
                    bbox: u.bbox,
                    font: u.font,
                    color: u.color,
                    role: u.role,
                    text: u.text,
                    patch,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let doc = TemplateDoc {
            schema_version: file.schema_version,
            global: file.global,
            canvas: file.canvas,
            background: file.background,
            reusable,
            updatable,
            event_slots: file.event_slots,
            rows: file.rows,
        };
        doc.validate()?;
        Ok(doc)
    }
}

pub fn load_template(path: &Path) -> Result<TemplateDoc> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TemplateDoc::from_json(&text).map_err(|e| match e {
        Error::Schema { location, message } => {
            Error::Schema { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

pub fn save_template(path: &Path, doc: &TemplateDoc) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, doc.to_json()).map_err(|e| Error::io(path, e))
}
