//! Noisy detections from ground truth, and the JSON wire format shared with
//! external detectors.
//!
//! ```json
//! {"image": "timeline.png",
//!  "detections": [{"category": "event_mark", "score": 0.93,
//!                  "bbox": [top, left, width, height], "mask_rle": [..]}]}
//! ```

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{iou, BBox};
use crate::mask::PixelMask;
use crate::model::{AnnotatedTimeline, Detection, ElementCategory, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseProfile {
    pub dup_rate: f64,
    pub drop_rate: f64,
    pub misclass_rate: f64,
    /// Standard deviation of the per-edge bbox jitter, in pixels.
    pub jitter_px: f64,
    /// Radius of the random dilation or erosion applied to masks.
    pub mask_coarsen_px: f64,
    /// `(mu_tp, sigma_tp, mu_fp, sigma_fp)`; scores are truncated to [0, 1].
    pub score_model: (f64, f64, f64, f64),
    /// Expected number of background false positives per ground-truth element.
    pub hallucination_rate: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        Self::zero()
    }
}

impl NoiseProfile {
    /// No noise at all: detections reproduce the ground truth.
    pub fn zero() -> Self {
        Self {
            dup_rate: 0.0,
            drop_rate: 0.0,
            misclass_rate: 0.0,
            jitter_px: 0.0,
            mask_coarsen_px: 0.0,
            score_model: (1.0, 0.0, 0.5, 0.0),
            hallucination_rate: 0.0,
        }
    }

    /// The profile used by the pipeline gain experiments.
    pub fn standard() -> Self {
        Self {
            dup_rate: 0.05,
            drop_rate: 0.05,
            misclass_rate: 0.03,
            jitter_px: 2.0,
            mask_coarsen_px: 2.0,
            score_model: (0.9, 0.05, 0.6, 0.15),
            hallucination_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("dup_rate", self.dup_rate),
            ("drop_rate", self.drop_rate),
            ("misclass_rate", self.misclass_rate),
            ("hallucination_rate", self.hallucination_rate),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        let (_, s_tp, _, s_fp) = self.score_model;
        let sigmas = [
            ("jitter_px", self.jitter_px),
            ("mask_coarsen_px", self.mask_coarsen_px),
            ("score_model.sigma_tp", s_tp),
            ("score_model.sigma_fp", s_fp),
        ];
        for (name, s) in sigmas {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("{name} = {s} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginKind {
    Kept,
    Duplicate,
    Hallucinated,
}

/// Where a simulated detection came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    /// Ground-truth element index; `None` for hallucinations.
    pub source: Option<usize>,
    pub kind: OriginKind,
    pub relabeled: bool,
}

fn truncated_normal(rng: &mut impl Rng, mu: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return mu.clamp(0.0, 1.0);
    }
    let dist = Normal::new(mu, sigma).expect("sigma is positive");
    for _ in 0..64 {
        let s = dist.sample(rng);
        if (0.0..=1.0).contains(&s) {
            return s;
        }
    }
    mu.clamp(0.0, 1.0)
}

fn jitter_box(rng: &mut impl Rng, b: &BBox, sigma: f64) -> BBox {
    if sigma <= 0.0 {
        return *b;
    }
    let dist = Normal::new(0.0, sigma).expect("sigma is positive");
    let mut d = || dist.sample(rng).round() as i32;
    let (x0, y0) = (b.left + d(), b.top + d());
    let (x1, y1) = (b.right() + d(), b.bottom() + d());
    BBox::from_extents(x0, y0, x1.max(x0 + 1), y1.max(y0 + 1)).expect("extent is positive")
}

fn coarsen(rng: &mut impl Rng, mask: &PixelMask, radius: f64) -> PixelMask {
    if radius <= 0.0 {
        return mask.clone();
    }
    let r = rng.gen_range(0.0..=radius);
    if rng.gen_bool(0.5) {
        mask.dilate(r)
    } else {
        mask.erode(r)
    }
}

fn other_category(rng: &mut impl Rng, c: ElementCategory) -> ElementCategory {
    let others: Vec<_> = ElementCategory::ALL.iter().copied().filter(|&o| o != c).collect();
    others[rng.gen_range(0..others.len())]
}

fn nonempty_or_full(mask: PixelMask, bbox: &BBox) -> PixelMask {
    if mask.is_empty() {
        PixelMask::filled(bbox.width, bbox.height)
    } else {
        mask
    }
}

/// An overlapping copy of `b`: either a sub-box covering part of it or a
/// shifted copy, always with IoU at least 0.3.
fn duplicate_box(rng: &mut impl Rng, b: &BBox) -> BBox {
    for _ in 0..16 {
        let cand = if rng.gen_bool(0.5) {
            let frac = rng.gen_range(0.35..0.9);
            let (w, h) = if rng.gen_bool(0.5) {
                (((b.width as f64) * frac).round() as u32, b.height)
            } else {
                (b.width, ((b.height as f64) * frac).round() as u32)
            };
            let (w, h) = (w.max(1), h.max(1));
            let dx = rng.gen_range(0..=b.width - w) as i32;
            let dy = rng.gen_range(0..=b.height - h) as i32;
            BBox::new(b.top + dy, b.left + dx, w, h)
        } else {
            let fx = rng.gen_range(-0.25..=0.25) * b.width as f64;
            let fy = rng.gen_range(-0.25..=0.25) * b.height as f64;
            b.translate(fx.round() as i32, fy.round() as i32)
        };
        if iou(&cand, b) >= 0.3 {
            return cand;
        }
    }
    *b
}

/// Simulate a detector run. Deterministic per seed.
pub fn perturb(gt: &AnnotatedTimeline, profile: &NoiseProfile, seed: u64) -> Result<Vec<Detection>> {
    Ok(perturb_traced(gt, profile, seed)?.into_iter().map(|(d, _)| d).collect())
}

/// Like [`perturb`], also reporting the origin of every detection.
pub fn perturb_traced(gt: &AnnotatedTimeline, profile: &NoiseProfile, seed: u64) -> Result<Vec<(Detection, Origin)>> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mu_tp, s_tp, mu_fp, s_fp) = profile.score_model;
    let mut out = Vec::new();
    for (i, el) in gt.elements.iter().enumerate() {
        let dropped = rng.gen_bool(profile.drop_rate);
        let duplicated = rng.gen_bool(profile.dup_rate);
        let relabeled = rng.gen_bool(profile.misclass_rate);
        if dropped {
            continue;
        }
        let bbox = jitter_box(&mut rng, &el.bbox, profile.jitter_px);
        let mask = coarsen(&mut rng, &el.mask, profile.mask_coarsen_px).reanchor(&el.bbox, &bbox);
        let category = if relabeled { other_category(&mut rng, el.category) } else { el.category };
        let score =
            if relabeled { truncated_normal(&mut rng, mu_fp, s_fp) } else { truncated_normal(&mut rng, mu_tp, s_tp) };
        let det = Detection {
            bbox,
            category,
            score,
            mask: Some(nonempty_or_full(mask, &bbox)),
            provenance: Provenance::Detected,
        };
        out.push((det.clone(), Origin { source: Some(i), kind: OriginKind::Kept, relabeled }));
        if duplicated {
            let dbox = duplicate_box(&mut rng, &bbox);
            let dmask = det.mask.as_ref().expect("set above").reanchor(&bbox, &dbox);
            let dup = Detection {
                bbox: dbox,
                mask: Some(nonempty_or_full(dmask, &dbox)),
                score: truncated_normal(&mut rng, mu_fp, s_fp),
                ..det
            };
            out.push((dup, Origin { source: Some(i), kind: OriginKind::Duplicate, relabeled }));
        }
    }
    let (w, h) = gt.image.dimensions();
    if profile.hallucination_rate > 0.0 && w > 1 && h > 1 {
        for _ in 0..gt.elements.len() {
            if !rng.gen_bool(profile.hallucination_rate) {
                continue;
            }
            let bw = rng.gen_range(1..=(w / 4).max(1));
            let bh = rng.gen_range(1..=(h / 4).max(1));
            let bbox = BBox::new(rng.gen_range(0..=(h - bh)) as i32, rng.gen_range(0..=(w - bw)) as i32, bw, bh);
            let category = ElementCategory::ALL[rng.gen_range(0..ElementCategory::ALL.len())];
            let det = Detection::new(category, bbox, truncated_normal(&mut rng, mu_fp, s_fp))
                .with_mask(PixelMask::filled(bw, bh));
            out.push((det, Origin { source: None, kind: OriginKind::Hallucinated, relabeled: false }));
        }
    }
    Ok(out)
}

fn unit_interval<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    let v = f64::deserialize(de)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("score {v} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionRecord {
    category: ElementCategory,
    #[serde(deserialize_with = "unit_interval")]
    score: f64,
    bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask_rle: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "is_detected")]
    provenance: Provenance,
}

fn is_detected(p: &Provenance) -> bool {
    *p == Provenance::Detected
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionFile {
    image: String,
    detections: Vec<DetectionRecord>,
}

pub fn detections_to_json(image: &str, dets: &[Detection]) -> String {
    let file = DetectionFile {
        image: image.to_string(),
        detections: dets
            .iter()
            .map(|d| DetectionRecord {
                category: d.category,
                score: d.score,
                bbox: d.bbox,
                mask_rle: d.mask.as_ref().map(PixelMask::encode_rle),
                provenance: d.provenance,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("detections serialize")
}

pub fn detections_from_json(text: &str) -> Result<(String, Vec<Detection>)> {
    let file: DetectionFile = crate::json::from_str(text)?;
    let dets = file
        .detections
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let mask = r
                .mask_rle
                .map(|runs| PixelMask::decode_rle(r.bbox.width, r.bbox.height, &runs))
                .transpose()
                .map_err(|e| Error::schema(format!("detections[{i}].mask_rle"), e.to_string()))?;
            let det = Detection { bbox: r.bbox, category: r.category, score: r.score, mask, provenance: r.provenance };
            det.validate().map_err(|e| Error::schema(format!("detections[{i}]"), e.to_string()))?;
            Ok(det)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((file.image, dets))
}

/// Read a detection file; returns the image reference and the detections.
pub fn load_detections(path: &Path) -> Result<(String, Vec<Detection>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    detections_from_json(&text).map_err(|e| match e {
        Error::Schema { location, message } => {
            Error::Schema { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

pub fn save_detections(path: &Path, image: &str, dets: &[Detection]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, detections_to_json(image, dets)).map_err(|e| Error::io(path, e))
}
