//! COCO-style detection metrics and the per-stage gain report.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::detsim::{self, NoiseProfile};
use crate::error::{Error, Result};
use crate::geometry::iou;
use crate::mask::anchored_mask_iou;
use crate::model::{AnnotatedTimeline, Detection, Element, Orientation};
use crate::reconstruct::{reconstruct, ReconstructConfig};
use crate::segment::{refine_all, RefineConfig};

mod config;

pub use config::{load_config, PipelineConfig};

/// Number of recall sample points in the interpolated AP.
pub const RECALL_POINTS: usize = 101;

/// The outcome for one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredMatch {
    /// Index into the prediction list as given.
    pub pred: usize,
    pub score: f64,
    /// Matched ground-truth index, `None` for a false positive.
    pub gt: Option<usize>,
}

/// Greedy matching of one image's predictions at one IoU threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub iou_t: f64,
    /// In matching order: score descending, ties by input order.
    pub preds: Vec<PredMatch>,
    /// Ground-truth indices nobody matched.
    pub missed: Vec<usize>,
    pub n_gt: usize,
}

impl MatchResult {
    pub fn tp(&self) -> usize {
        self.preds.iter().filter(|p| p.gt.is_some()).count()
    }

    pub fn fp(&self) -> usize {
        self.preds.len() - self.tp()
    }

    pub fn fn_(&self) -> usize {
        self.missed.len()
    }
}

fn overlap(pred: &Detection, gt: &Element, use_masks: bool) -> f64 {
    if use_masks {
        anchored_mask_iou(&pred.bbox, &pred.mask_or_box(), &gt.bbox, &gt.mask)
    } else {
        iou(&pred.bbox, &gt.bbox)
    }
}

/// Match predictions to ground truth within each category. Predictions go
/// in score order and take the unmatched ground truth they overlap most,
/// provided the IoU reaches `iou_t`. Predictions without a mask count as
/// their full box when `use_masks` is set.
pub fn match_detections(preds: &[Detection], gts: &[Element], iou_t: f64, use_masks: bool) -> MatchResult {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].score.total_cmp(&preds[a].score));
    let mut taken = vec![false; gts.len()];
    let mut out = Vec::with_capacity(preds.len());
    for i in order {
        let p = &preds[i];
        let mut best: Option<(f64, usize)> = None;
        for (j, g) in gts.iter().enumerate() {
            if taken[j] || g.category != p.category {
                continue;
            }
            let v = overlap(p, g, use_masks);
            if v >= iou_t && best.map_or(true, |(b, _)| v > b) {
                best = Some((v, j));
            }
        }
        if let Some((_, j)) = best {
            assert!(!taken[j], "ground truth {j} matched twice");
            taken[j] = true;
        }
        out.push(PredMatch { pred: i, score: p.score, gt: best.map(|b| b.1) });
    }
    MatchResult { iou_t, preds: out, missed: (0..gts.len()).filter(|&j| !taken[j]).collect(), n_gt: gts.len() }
}

/// 101-point interpolated AP over matches pooled from any number of images.
pub fn pooled_average_precision(results: &[MatchResult]) -> Result<f64> {
    let n_gt: usize = results.iter().map(|r| r.n_gt).sum();
    if n_gt == 0 {
        return Err(Error::NoGroundTruth);
    }
    let mut all: Vec<(f64, bool)> =
        results.iter().flat_map(|r| r.preds.iter().map(|p| (p.score, p.gt.is_some()))).collect();
    // stable, so ties keep per-image matching order
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut curve = Vec::with_capacity(all.len());
    let mut tp = 0usize;
    for (k, &(_, hit)) in all.iter().enumerate() {
        tp += usize::from(hit);
        curve.push((tp, tp as f64 / (k + 1) as f64));
    }
    // precision envelope: best precision at this rank or any later one
    for k in (0..curve.len().saturating_sub(1)).rev() {
        curve[k].1 = curve[k].1.max(curve[k + 1].1);
    }
    let mut sum = 0.0;
    let mut k = 0;
    for r in 0..RECALL_POINTS {
        while k < curve.len() && curve[k].0 * (RECALL_POINTS - 1) < r * n_gt {
            k += 1;
        }
        if k < curve.len() {
            sum += curve[k].1;
        }
    }
    Ok(sum / RECALL_POINTS as f64)
}

/// AP of one image's predictions at one IoU threshold, bbox overlap.
pub fn average_precision(preds: &[Detection], gts: &[Element], iou_t: f64) -> Result<f64> {
    if gts.is_empty() {
        return Err(Error::NoGroundTruth);
    }
    pooled_average_precision(&[match_detections(preds, gts, iou_t, false)])
}

/// The IoU thresholds .50, .55, ..., .95.
pub fn coco_thresholds() -> impl Iterator<Item = f64> {
    (0..10).map(|k| (50 + 5 * k) as f64 / 100.0)
}

/// Mean AP over [`coco_thresholds`].
pub fn ap_range(preds: &[Detection], gts: &[Element]) -> Result<f64> {
    let aps = coco_thresholds().map(|t| average_precision(preds, gts, t)).collect::<Result<Vec<_>>>()?;
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Raw,
    Nmm,
    Rr,
    DlGrabCut,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Raw, Stage::Nmm, Stage::Rr, Stage::DlGrabCut];

    pub fn label(self) -> &'static str {
        match self {
            Stage::Raw => "Raw",
            Stage::Nmm => "+NMM",
            Stage::Rr => "+RR",
            Stage::DlGrabCut => "+DLGC",
        }
    }
}

/// Precision and recall at IoU .5 and .75, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub pre50: f64,
    pub rec50: f64,
    pub pre75: f64,
    pub rec75: f64,
}

impl Metrics {
    pub fn as_array(&self) -> [f64; 4] {
        [self.pre50, self.rec50, self.pre75, self.rec75]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self { pre50: a[0], rec50: a[1], pre75: a[2], rec75: a[3] }
    }

    fn minus(&self, other: &Metrics) -> Metrics {
        let (a, b) = (self.as_array(), other.as_array());
        Metrics::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}

/// Raw counts behind [`Metrics`], summed over images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Counts {
    tp50: usize,
    tp75: usize,
    preds: usize,
    gts: usize,
}

impl Counts {
    fn of(preds: &[Detection], gts: &[Element], use_masks: bool) -> Self {
        Self {
            tp50: match_detections(preds, gts, 0.5, use_masks).tp(),
            tp75: match_detections(preds, gts, 0.75, use_masks).tp(),
            preds: preds.len(),
            gts: gts.len(),
        }
    }

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp50: self.tp50 + o.tp50,
            tp75: self.tp75 + o.tp75,
            preds: self.preds + o.preds,
            gts: self.gts + o.gts,
        }
    }

    fn metrics(&self) -> Metrics {
        let pct = |n: usize, d: usize| if d == 0 { 100.0 } else { 100.0 * n as f64 / d as f64 };
        Metrics {
            pre50: pct(self.tp50, self.preds),
            rec50: pct(self.tp50, self.gts),
            pre75: pct(self.tp75, self.preds),
            rec75: pct(self.tp75, self.gts),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRow {
    pub stage: Stage,
    pub bbox: Metrics,
    pub mask: Metrics,
}

/// Stage-by-stage precision and recall, averaged over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub rows: Vec<StageRow>,
    pub runs: usize,
    pub images: usize,
}

impl GainReport {
    pub fn row(&self, stage: Stage) -> &StageRow {
        self.rows.iter().find(|r| r.stage == stage).expect("every stage is reported")
    }

    /// Change from the previous stage; zero for the first.
    pub fn delta(&self, stage: Stage) -> (Metrics, Metrics) {
        let i = self.rows.iter().position(|r| r.stage == stage).expect("every stage is reported");
        if i == 0 {
            return (Metrics::default(), Metrics::default());
        }
        let (cur, prev) = (&self.rows[i], &self.rows[i - 1]);
        (cur.bbox.minus(&prev.bbox), cur.mask.minus(&prev.mask))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("stage,kind,pre50,rec50,pre75,rec75,d_pre50,d_rec50,d_pre75,d_rec75\n");
        for r in &self.rows {
            let (db, dm) = self.delta(r.stage);
            for (kind, m, d) in [("bbox", r.bbox, db), ("mask", r.mask, dm)] {
                let _ = write!(s, "{},{kind}", r.stage.label());
                for v in m.as_array().into_iter().chain(d.as_array()) {
                    let _ = write!(s, ",{v:.4}");
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{} images x {} runs\n", self.images, self.runs);
        let _ = writeln!(
            s,
            "{:<7} {:>15} {:>15} {:>15} {:>15} | {:>15} {:>15} {:>15} {:>15}",
            "",
            "bbox Pre50",
            "bbox Rec50",
            "bbox Pre75",
            "bbox Rec75",
            "mask Pre50",
            "mask Rec50",
            "mask Pre75",
            "mask Rec75"
        );
        for r in &self.rows {
            let (db, dm) = self.delta(r.stage);
            let _ = write!(s, "{:<7}", r.stage.label());
            for (i, (m, d)) in [(r.bbox, db), (r.mask, dm)].into_iter().enumerate() {
                if i == 1 {
                    s.push_str(" |");
                }
                for (v, dv) in m.as_array().into_iter().zip(d.as_array()) {
                    let cell = if r.stage == Stage::Raw { format!("{v:.1}") } else { format!("{v:.1} ({dv:+.1})") };
                    let _ = write!(s, " {cell:>15}");
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Detections after each stage of the pipeline. `orientation` plays the
/// part of the global classifier; `None` infers it from the marks.
pub fn stage_outputs(
    image: &image::RgbImage,
    dets: &[Detection],
    orientation: Option<Orientation>,
    reconstruct_cfg: &ReconstructConfig,
    refine_cfg: &RefineConfig,
) -> Result<[Vec<Detection>; 4]> {
    let r = reconstruct(dets, image.dimensions(), orientation, reconstruct_cfg)?;
    let refined = refine_all(image, &r.repaired, refine_cfg);
    Ok([r.raw, r.deduplicated, r.repaired, refined])
}

/// Seed of the simulated detector for one image in one run.
pub fn run_seed(seed: u64, run: usize, image: usize) -> u64 {
    seed ^ ((run as u64) << 32) ^ (image as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Perturb every image with `noise`, run the pipeline and score each stage.
/// Metrics are pooled over images within a run and averaged over runs. The
/// ground-truth orientation stands in for the global classifier.
pub fn gain_report(
    corpus: &[AnnotatedTimeline],
    noise: &NoiseProfile,
    config: &PipelineConfig,
    runs: usize,
    seed: u64,
) -> Result<GainReport> {
    noise.validate()?;
    config.reconstruct.validate()?;
    let runs = runs.max(1);
    let mut totals = [[[0.0; 4]; 2]; 4];
    for run in 0..runs {
        let per_image = corpus
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let dets = detsim::perturb(t, noise, run_seed(seed, run, i))?;
                let stages =
                    stage_outputs(&t.image, &dets, Some(t.global.orientation), &config.reconstruct, &config.refine)?;
                Ok(stages.map(|d| [Counts::of(&d, &t.elements, false), Counts::of(&d, &t.elements, true)]))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sum = [[Counts::default(); 2]; 4];
        for img in per_image {
            for (s, kinds) in img.iter().enumerate() {
                for k in 0..2 {
                    sum[s][k] = sum[s][k].add(kinds[k]);
                }
            }
        }
        for s in 0..4 {
            for k in 0..2 {
                let m = sum[s][k].metrics().as_array();
                for c in 0..4 {
                    totals[s][k][c] += m[c];
                }
            }
        }
    }
    let avg = |a: [f64; 4]| Metrics::from_array(a.map(|v| v / runs as f64));
    let rows = Stage::ALL
        .iter()
        .enumerate()
        .map(|(s, &stage)| StageRow { stage, bbox: avg(totals[s][0]), mask: avg(totals[s][1]) })
        .collect();
    Ok(GainReport { rows, runs, images: corpus.len() })
}

/// Per-image evaluation of a detection list against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub ap50: f64,
    pub ap75: f64,
    pub ap: f64,
    pub bbox: Metrics,
    pub mask: Metrics,
}

/// AP and precision/recall of one detection list. Recovered detections are
/// dropped unless `include_recovered` is set.
pub fn evaluate(preds: &[Detection], gts: &[Element], include_recovered: bool) -> Result<Evaluation> {
    let preds: Vec<Detection> = preds.iter().filter(|d| include_recovered || !d.is_recovered()).cloned().collect();
    Ok(Evaluation {
        ap50: average_precision(&preds, gts, 0.5)?,
        ap75: average_precision(&preds, gts, 0.75)?,
        ap: ap_range(&preds, gts)?,
        bbox: Counts::of(&preds, gts, false).metrics(),
        mask: Counts::of(&preds, gts, true).metrics(),
    })
}

impl Evaluation {
    pub fn to_text(&self) -> String {
        let mut s = format!("AP50 {:.4}\nAP75 {:.4}\nAP50:95 {:.4}\n", self.ap50, self.ap75, self.ap);
        for (kind, m) in [("bbox", self.bbox), ("mask", self.mask)] {
            let _ = writeln!(
                s,
                "{kind} Pre50 {:.2} Rec50 {:.2} Pre75 {:.2} Rec75 {:.2}",
                m.pre50, m.rec50, m.pre75, m.rec75
            );
        }
        s
    }
}
