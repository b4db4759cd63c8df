//! GrabCut segmentation seeded from a detector's box and coarse mask.

pub mod gmm;
pub mod maxflow;

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mask::PixelMask;
use crate::model::Detection;
use gmm::{fit_gmm_collapsing, Color, Gmm};
use maxflow::{max_flow, FlowNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrimapLabel {
    DefiniteBg,
    ProbableBg,
    ProbableFg,
    DefiniteFg,
}

impl TrimapLabel {
    pub fn is_fg(self) -> bool {
        matches!(self, TrimapLabel::ProbableFg | TrimapLabel::DefiniteFg)
    }

    pub fn is_definite(self) -> bool {
        matches!(self, TrimapLabel::DefiniteFg | TrimapLabel::DefiniteBg)
    }
}

/// Per-pixel prior over a region of interest of the image.
#[derive(Debug, Clone, PartialEq)]
pub struct Trimap {
    /// Region of interest in image coordinates.
    pub roi: BBox,
    labels: Vec<TrimapLabel>,
}

impl Trimap {
    pub fn filled(roi: BBox, label: TrimapLabel) -> Self {
        Self { roi, labels: vec![label; roi.area() as usize] }
    }

    /// Label at ROI-local `(x, y)`.
    pub fn get(&self, x: u32, y: u32) -> TrimapLabel {
        self.labels[(y * self.roi.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, label: TrimapLabel) {
        self.labels[(y * self.roi.width + x) as usize] = label;
    }

    pub fn labels(&self) -> &[TrimapLabel] {
        &self.labels
    }

    pub fn count(&self, label: TrimapLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// ROI-sized mask of the pixels labeled `label`.
    pub fn mask_of(&self, label: TrimapLabel) -> PixelMask {
        PixelMask::from_fn(self.roi.width, self.roi.height, |x, y| self.get(x, y) == label)
    }
}

/// Trimap over the whole image.
pub fn init_trimap(image: &RgbImage, bbox: &BBox, mask: Option<&PixelMask>) -> Result<Trimap> {
    let roi = BBox::new(0, 0, image.width(), image.height());
    init_trimap_in(roi, bbox, mask)
}

/// Outside `bbox` is definite background, inside probable foreground. A
/// mask (bbox-local) eroded by 2 px becomes definite foreground, and
/// in-box pixels more than 3 px from it become probable background.
pub fn init_trimap_in(roi: BBox, bbox: &BBox, mask: Option<&PixelMask>) -> Result<Trimap> {
    if roi.intersection(bbox) != Some(*bbox) {
        return Err(Error::InvalidBBox(format!("{bbox:?} is not inside the region {roi:?}")));
    }
    let mut t = Trimap::filled(roi, TrimapLabel::DefiniteBg);
    let (ox, oy) = ((bbox.left - roi.left) as u32, (bbox.top - roi.top) as u32);
    let (core, far) = match mask {
        Some(m) => {
            if !m.matches_bbox(bbox) {
                return Err(Error::InvalidMask("mask does not match its bbox".into()));
            }
            let core = m.erode(2.0);
            if core.is_empty() {
                return Err(Error::EmptyForeground);
            }
            let dist = m.squared_distance_to(true, false);
            (Some(core), Some(dist))
        }
        None => (None, None),
    };
    for y in 0..bbox.height {
        for x in 0..bbox.width {
            let i = (y * bbox.width + x) as usize;
            let label = if core.as_ref().is_some_and(|c| c.get(x, y)) {
                TrimapLabel::DefiniteFg
            } else if far.as_ref().is_some_and(|d| d[i] > 9.0) {
                TrimapLabel::ProbableBg
            } else {
                TrimapLabel::ProbableFg
            };
            t.set(ox + x, oy + y, label);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrabCutParams {
    /// Mixture components per model.
    pub k: usize,
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop once the relative energy decrease falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for GrabCutParams {
    fn default() -> Self {
        Self { k: 5, gamma: 50.0, max_iters: 5, tol: 1e-3, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrabCutOutcome {
    /// ROI-sized foreground mask.
    pub mask: PixelMask,
    /// Energy of the initial labeling, then after each iteration.
    pub energies: Vec<f64>,
    pub iterations: usize,
}

/// 8-neighbour offsets that are visited once per unordered pair.
const HALF_NEIGHBOURS: [(i32, i32); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];

struct Problem {
    w: usize,
    h: usize,
    colors: Vec<Color>,
    /// `(p, q, weight)` for every neighbouring pair.
    pairs: Vec<(usize, usize, f64)>,
    labels: Vec<TrimapLabel>,
    hard: f64,
}

impl Problem {
    fn new(image: &RgbImage, trimap: &Trimap, gamma: f64) -> Self {
        let roi = trimap.roi;
        let (w, h) = (roi.width as usize, roi.height as usize);
        let colors: Vec<Color> =
            roi.pixels().map(|(x, y)| image.get_pixel(x as u32, y as u32).0.map(f64::from)).collect();
        let mut raw = Vec::with_capacity(4 * w * h);
        for y in 0..h {
            for x in 0..w {
                for (dx, dy) in HALF_NEIGHBOURS {
                    let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let (p, q) = (y * w + x, ny as usize * w + nx as usize);
                    let d2: f64 = (0..3).map(|c| (colors[p][c] - colors[q][c]).powi(2)).sum();
                    let dist = if dx != 0 && dy != 0 { 2f64.sqrt() } else { 1.0 };
                    raw.push((p, q, d2, dist));
                }
            }
        }
        let mean = if raw.is_empty() { 0.0 } else { raw.iter().map(|r| r.2).sum::<f64>() / raw.len() as f64 };
        let beta = if mean > 0.0 { 1.0 / (2.0 * mean) } else { 0.0 };
        let pairs: Vec<(usize, usize, f64)> =
            raw.into_iter().map(|(p, q, d2, dist)| (p, q, gamma * (-beta * d2).exp() / dist)).collect();
        let mut around = vec![0.0; w * h];
        for &(p, q, v) in &pairs {
            around[p] += v;
            around[q] += v;
        }
        let hard = 1.0 + around.iter().copied().fold(0.0, f64::max);
        Self { w, h, colors, pairs, labels: trimap.labels.clone(), hard }
    }

    /// Negative log-likelihoods under the foreground and background models.
    fn data_terms(&self, fg: &Gmm, bg: &Gmm) -> Vec<(f64, f64)> {
        self.colors.iter().map(|z| (-fg.log_likelihood(z), -bg.log_likelihood(z))).collect()
    }

    fn energy(&self, alpha: &[bool], data: &[(f64, f64)]) -> f64 {
        let d: f64 = alpha.iter().zip(data).map(|(&a, &(f, b))| if a { f } else { b }).sum();
        let s: f64 = self.pairs.iter().filter(|&&(p, q, _)| alpha[p] != alpha[q]).map(|e| e.2).sum();
        d + s
    }

    fn fit(&self, alpha: &[bool], want: bool, k: usize, seed: u64) -> Result<Gmm> {
        let px: Vec<Color> = self.colors.iter().zip(alpha).filter(|(_, &a)| a == want).map(|(z, _)| *z).collect();
        fit_gmm_collapsing(&px, k, seed)
    }

    fn refit(&self, model: &Gmm, alpha: &[bool], want: bool) -> Gmm {
        let px: Vec<Color> = self.colors.iter().zip(alpha).filter(|(_, &a)| a == want).map(|(z, _)| *z).collect();
        let labels = model.assign(&px);
        Gmm::from_assignment(&px, &labels, model.components.len())
    }

    fn cut(&self, data: &[(f64, f64)]) -> Vec<bool> {
        let n = self.w * self.h;
        let (s, t) = (n, n + 1);
        let mut net = FlowNetwork::new(n + 2, s, t);
        for p in 0..n {
            // the source side is foreground: cutting s->p pays the background cost
            let (to_s, to_t) = match self.labels[p] {
                TrimapLabel::DefiniteFg => (self.hard, 0.0),
                TrimapLabel::DefiniteBg => (0.0, self.hard),
                _ => {
                    let (f, b) = data[p];
                    let m = f.min(b);
                    (b - m, f - m)
                }
            };
            if to_s > 0.0 {
                net.add_edge(s, p, to_s, 0.0);
            }
            if to_t > 0.0 {
                net.add_edge(p, t, to_t, 0.0);
            }
        }
        for &(p, q, v) in &self.pairs {
            net.add_edge(p, q, v, v);
        }
        max_flow(&net).source_side[..n].to_vec()
    }
}

/// Segment the trimap's region. Definite labels are kept exactly.
pub fn grabcut(image: &RgbImage, trimap: &Trimap, params: &GrabCutParams) -> Result<PixelMask> {
    grabcut_detailed(image, trimap, params).map(|o| o.mask)
}

pub fn grabcut_detailed(image: &RgbImage, trimap: &Trimap, params: &GrabCutParams) -> Result<GrabCutOutcome> {
    let roi = trimap.roi;
    if roi.right() > image.width() as i32 || roi.bottom() > image.height() as i32 || roi.left < 0 || roi.top < 0 {
        return Err(Error::InvalidTrimap("region extends past the image".into()));
    }
    let alpha0: Vec<bool> = trimap.labels.iter().map(|l| l.is_fg()).collect();
    let mask_of = |alpha: &[bool]| PixelMask::from_bits(roi.width, roi.height, alpha.to_vec()).expect("roi-sized");
    if !alpha0.iter().any(|&a| a) {
        return Err(Error::EmptyForeground);
    }
    if trimap.labels.iter().all(|l| l.is_definite()) {
        return Ok(GrabCutOutcome { mask: mask_of(&alpha0), energies: Vec::new(), iterations: 0 });
    }
    if alpha0.iter().all(|&a| a) {
        return Err(Error::InvalidTrimap("no background pixels".into()));
    }

    let problem = Problem::new(image, trimap, params.gamma);
    let mut alpha = alpha0;
    let mut fg = problem.fit(&alpha, true, params.k, params.seed)?;
    let mut bg = problem.fit(&alpha, false, params.k, params.seed.wrapping_add(1))?;
    let mut data = problem.data_terms(&fg, &bg);
    let mut energy = problem.energy(&alpha, &data);
    let mut energies = vec![energy];
    let mut iterations = 0;
    while iterations < params.max_iters {
        iterations += 1;
        let has_both = alpha.iter().any(|&a| a) && alpha.iter().any(|&a| !a);
        if has_both {
            // refit from the current labeling; keep the new models only if
            // they do not raise the energy of that labeling
            let (fg2, bg2) = (problem.refit(&fg, &alpha, true), problem.refit(&bg, &alpha, false));
            let data2 = problem.data_terms(&fg2, &bg2);
            let e2 = problem.energy(&alpha, &data2);
            if e2 <= energy {
                (fg, bg, data, energy) = (fg2, bg2, data2, e2);
            }
        }
        let next = problem.cut(&data);
        let e = problem.energy(&next, &data);
        assert!(e <= energy + 1e-9 * energy.abs().max(1.0), "energy rose from {energy} to {e}");
        let decrease = energy - e;
        alpha = next;
        energy = e;
        energies.push(e);
        if decrease < params.tol * energy.abs().max(1.0) {
            break;
        }
    }
    Ok(GrabCutOutcome { mask: mask_of(&alpha), energies, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    pub grabcut: GrabCutParams,
    /// The detected box is grown by this much before segmenting.
    pub pad: u32,
    /// Extra context around the grown box used as background sample.
    pub context: u32,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self { grabcut: GrabCutParams::default(), pad: 2, context: 8 }
    }
}

/// Re-segment one detection with GrabCut, using its box as the user box and
/// its mask as the strokes. The box is tightened to the result. Recovered
/// detections and failed segmentations come back unchanged.
pub fn refine_detection(image: &RgbImage, det: &Detection, config: &RefineConfig) -> Detection {
    if det.is_recovered() {
        return det.clone();
    }
    let (w, h) = image.dimensions();
    let grown = det.bbox.expand(config.pad as i32).and_then(|b| b.clip_to(w, h));
    let roi = det.bbox.expand((config.pad + config.context) as i32).and_then(|b| b.clip_to(w, h));
    let (Some(grown), Some(roi)) = (grown, roi) else {
        return det.clone();
    };
    let mask = det.mask.as_ref().map(|m| m.reanchor(&det.bbox, &grown));
    let trimap = match init_trimap_in(roi, &grown, mask.as_ref()) {
        Ok(t) => t,
        Err(Error::EmptyForeground) => match init_trimap_in(roi, &grown, None) {
            Ok(t) => t,
            Err(_) => return det.clone(),
        },
        Err(_) => return det.clone(),
    };
    let Ok(seg) = grabcut(image, &trimap, &config.grabcut) else {
        return det.clone();
    };
    let Some(local) = seg.content_bbox() else {
        return det.clone();
    };
    let bbox = local.translate(roi.left, roi.top);
    let mask = seg.crop(local.left as i64, local.top as i64, local.width, local.height);
    Detection { bbox, mask: Some(mask), ..det.clone() }
}

pub fn refine_all(image: &RgbImage, dets: &[Detection], config: &RefineConfig) -> Vec<Detection> {
    dets.par_iter().map(|d| refine_detection(image, d, config)).collect()
}
