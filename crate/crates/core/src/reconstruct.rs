//! Detection repair: deduplication, event clustering, relabeling by vote and
//! recovery of missing elements.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{iou, union_bbox, BBox};
use crate::model::{Detection, ElementCategory, Orientation, Provenance, RECOVERED_SCORE};

fn by_score_desc(dets: &[Detection], a: usize, b: usize) -> Ordering {
    dets[b].score.partial_cmp(&dets[a].score).unwrap_or(Ordering::Equal).then(a.cmp(&b))
}

/// Greedy per-category non-maximum suppression. Kept detections stay in
/// input order.
pub fn nms(dets: &[Detection], score_thresh: f64, iou_thresh: f64) -> Vec<Detection> {
    let mut order: Vec<usize> = (0..dets.len()).filter(|&i| dets[i].score >= score_thresh).collect();
    order.sort_by(|&a, &b| by_score_desc(dets, a, b));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let suppressed = kept
            .iter()
            .any(|&k| dets[k].category == dets[i].category && iou(&dets[k].bbox, &dets[i].bbox) >= iou_thresh);
        if !suppressed {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept.into_iter().map(|i| dets[i].clone()).collect()
}

fn merge(a: &Detection, b: &Detection) -> Detection {
    let bbox = union_bbox(&a.bbox, &b.bbox);
    let mask = if a.mask.is_none() && b.mask.is_none() {
        None
    } else {
        let ma = a.mask_or_box().reanchor(&a.bbox, &bbox);
        let mb = b.mask_or_box().reanchor(&b.bbox, &bbox);
        Some(ma.union(&mb).expect("same shape"))
    };
    let provenance = if a.is_recovered() && b.is_recovered() { Provenance::Recovered } else { Provenance::Detected };
    Detection {
        bbox,
        category: a.category,
        score: a.score.max(b.score),
        mask: if provenance == Provenance::Recovered { None } else { mask },
        provenance,
    }
}

fn nmm_pass(dets: &[Detection], iou_thresh: f64, image_area: f64) -> Vec<Detection> {
    let rank = |d: &Detection| d.score + d.bbox.area() as f64 / image_area.max(1.0);
    let mut out = Vec::new();
    for cat in ElementCategory::ALL {
        let mut pool: Vec<Detection> = dets.iter().filter(|d| d.category == cat).cloned().collect();
        while !pool.is_empty() {
            let top = (0..pool.len())
                .max_by(|&a, &b| rank(&pool[a]).partial_cmp(&rank(&pool[b])).unwrap_or(Ordering::Equal).then(b.cmp(&a)))
                .expect("pool is non-empty");
            let mut cur = pool.swap_remove(top);
            // the union grows, so keep absorbing until nothing else overlaps it
            loop {
                let hit = pool.iter().position(|d| iou(&cur.bbox, &d.bbox) >= iou_thresh);
                match hit {
                    Some(j) => cur = merge(&cur, &pool.swap_remove(j)),
                    None => break,
                }
            }
            out.push(cur);
        }
    }
    out
}

/// Per-category non-maximum merging: rank by score plus normalized area,
/// merge every box overlapping the leader into it. Repeats until no
/// same-category pair overlaps by `iou_thresh` or more.
pub fn nmm(dets: &[Detection], iou_thresh: f64, image_area: f64) -> Vec<Detection> {
    let mut cur = nmm_pass(dets, iou_thresh, image_area);
    loop {
        let next = nmm_pass(&cur, iou_thresh, image_area);
        if next.len() == cur.len() {
            return next;
        }
        cur = next;
    }
}

fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Mean shape inconsistency of a detection set: the coefficient of variation
/// of aspect ratio and area, averaged over categories with at least two boxes.
pub fn shape_inconsistency(dets: &[Detection]) -> Option<f64> {
    let mut cvs = Vec::new();
    for cat in ElementCategory::ALL {
        let boxes: Vec<&BBox> = dets.iter().filter(|d| d.category == cat).map(|d| &d.bbox).collect();
        if boxes.len() < 2 {
            continue;
        }
        let aspects: Vec<f64> = boxes.iter().map(|b| b.aspect_ratio()).collect();
        let areas: Vec<f64> = boxes.iter().map(|b| b.area() as f64).collect();
        cvs.push((coefficient_of_variation(&aspects) + coefficient_of_variation(&areas)) / 2.0);
    }
    (!cvs.is_empty()).then(|| cvs.iter().sum::<f64>() / cvs.len() as f64)
}

/// Pick the NMS or NMM result, whichever leaves boxes of each category more
/// alike in shape. Ties and undefined comparisons go to NMM.
pub fn select_dedup(nms_out: Vec<Detection>, nmm_out: Vec<Detection>) -> (DedupMode, Vec<Detection>) {
    match (shape_inconsistency(&nms_out), shape_inconsistency(&nmm_out)) {
        (Some(a), Some(b)) if a < b - 1e-12 => (DedupMode::Nms, nms_out),
        _ => (DedupMode::Nmm, nmm_out),
    }
}

fn mark_centers(dets: &[Detection]) -> Vec<(f64, f64)> {
    dets.iter().filter(|d| d.category == ElementCategory::EventMark).map(|d| d.bbox.center()).collect()
}

/// Angle in degrees of the principal axis of `pts`, in (-90, 90].
fn principal_angle(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(x, y), p| (x + p.0 / n, y + p.1 / n));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let a = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    a.to_degrees()
}

/// Orientation from the principal axis of event-mark centers: within 30
/// degrees of the x axis is horizontal, within 30 of the y axis vertical.
pub fn infer_orientation(dets: &[Detection]) -> Result<Orientation> {
    let pts = mark_centers(dets);
    if pts.len() < 2 {
        return Err(Error::TooFewMarks(pts.len()));
    }
    let angle = principal_angle(&pts).abs();
    Ok(if angle <= 30.0 {
        Orientation::Horizontal
    } else if angle >= 60.0 {
        Orientation::Vertical
    } else {
        Orientation::Other
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventCluster {
    /// Index of the event-mark detection, when there is one.
    pub anchor: Option<usize>,
    /// Detection indices, anchor included.
    pub members: Vec<usize>,
    pub axis_pos: f64,
}

impl EventCluster {
    /// Reference point that member roles are measured from.
    pub fn origin(&self, dets: &[Detection]) -> (f64, f64) {
        match self.anchor {
            Some(a) => dets[a].bbox.center(),
            None => {
                let n = self.members.len() as f64;
                self.members.iter().fold((0.0, 0.0), |(x, y), &i| {
                    let c = dets[i].bbox.center();
                    (x + c.0 / n, y + c.1 / n)
                })
            }
        }
    }

    /// Center offset of detection `i` from the cluster origin.
    pub fn role(&self, dets: &[Detection], i: usize) -> (f64, f64) {
        let (ox, oy) = self.origin(dets);
        let (cx, cy) = dets[i].bbox.center();
        (cx - ox, cy - oy)
    }
}

fn project(c: (f64, f64), orientation: Orientation) -> f64 {
    match orientation {
        Orientation::Vertical => c.1,
        _ => c.0,
    }
}

/// Squared gap between two boxes; zero when they touch or overlap.
fn box_gap2(a: &BBox, b: &BBox) -> f64 {
    let dx = (a.left - b.right()).max(b.left - a.right()).max(0) as f64;
    let dy = (a.top - b.bottom()).max(b.top - a.bottom()).max(0) as f64;
    dx * dx + dy * dy
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Order anchors along a free-form path by chaining nearest neighbours from
/// the top-left-most one.
fn chain_order(centers: &[(f64, f64)]) -> Vec<usize> {
    let Some(start) = (0..centers.len()).min_by(|&a, &b| {
        (centers[a].0 + centers[a].1).partial_cmp(&(centers[b].0 + centers[b].1)).unwrap_or(Ordering::Equal)
    }) else {
        return Vec::new();
    };
    let mut order = vec![start];
    let mut left: Vec<usize> = (0..centers.len()).filter(|&i| i != start).collect();
    while !left.is_empty() {
        let last = centers[*order.last().unwrap()];
        let k = (0..left.len())
            .min_by(|&a, &b| {
                dist2(centers[left[a]], last).partial_cmp(&dist2(centers[left[b]], last)).unwrap_or(Ordering::Equal)
            })
            .unwrap();
        order.push(left.swap_remove(k));
    }
    order
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Group detections into events. Event marks anchor the clusters, which
/// grow by repeatedly absorbing the element nearest (by box gap) to one of
/// their members, ties going to the closer anchor; without marks, elements are split
/// along the axis wherever the gap exceeds 1.5 times the median extent.
/// Clusters come back ordered along the axis (along the path for `Other`).
pub fn cluster_events(dets: &[Detection], orientation: Orientation) -> Result<Vec<EventCluster>> {
    let items: Vec<usize> = (0..dets.len()).filter(|&i| dets[i].category != ElementCategory::MainBody).collect();
    if items.is_empty() {
        return Err(Error::NoElements);
    }
    let anchors: Vec<usize> =
        items.iter().copied().filter(|&i| dets[i].category == ElementCategory::EventMark).collect();

    if anchors.is_empty() {
        let mut sorted: Vec<(f64, usize)> =
            items.iter().map(|&i| (project(dets[i].bbox.center(), orientation), i)).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        let mut extents: Vec<f64> = items
            .iter()
            .map(|&i| match orientation {
                Orientation::Vertical => dets[i].bbox.height as f64,
                _ => dets[i].bbox.width as f64,
            })
            .collect();
        let limit = 1.5 * median(&mut extents);
        let mut clusters: Vec<Vec<(f64, usize)>> = vec![vec![sorted[0]]];
        for w in sorted.windows(2) {
            if w[1].0 - w[0].0 > limit {
                clusters.push(Vec::new());
            }
            clusters.last_mut().unwrap().push(w[1]);
        }
        return Ok(clusters
            .into_iter()
            .map(|c| EventCluster {
                anchor: None,
                axis_pos: c.iter().map(|p| p.0).sum::<f64>() / c.len() as f64,
                members: c.into_iter().map(|p| p.1).collect(),
            })
            .collect());
    }

    let centers: Vec<(f64, f64)> = anchors.iter().map(|&a| dets[a].bbox.center()).collect();
    let order: Vec<usize> = match orientation {
        Orientation::Other => chain_order(&centers),
        _ => {
            let mut o: Vec<usize> = (0..anchors.len()).collect();
            o.sort_by(|&a, &b| {
                project(centers[a], orientation)
                    .partial_cmp(&project(centers[b], orientation))
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(&b))
            });
            o
        }
    };
    let mut clusters: Vec<EventCluster> = order
        .iter()
        .enumerate()
        .map(|(rank, &k)| EventCluster {
            anchor: Some(anchors[k]),
            members: vec![anchors[k]],
            axis_pos: match orientation {
                Orientation::Other => rank as f64,
                _ => project(centers[k], orientation),
            },
        })
        .collect();
    // grow clusters outward from the anchors, always attaching the element
    // closest (by box gap) to something already assigned
    let mut owner: Vec<Option<usize>> = vec![None; dets.len()];
    // links between boxes sitting side by side along the axis usually join
    // neighbouring events, so they only count when nothing else reaches
    let stacked = |a: &BBox, b: &BBox| match orientation {
        Orientation::Vertical => a.top < b.bottom() && b.top < a.bottom(),
        _ => a.left < b.right() && b.left < a.right(),
    };
    let mut best: Vec<(u8, f64, f64, usize)> = vec![(u8::MAX, f64::INFINITY, f64::INFINITY, 0); dets.len()];
    let mut pending: Vec<usize> =
        items.iter().copied().filter(|&i| dets[i].category != ElementCategory::EventMark).collect();
    let relax = |from: usize, cluster: usize, best: &mut Vec<(u8, f64, f64, usize)>, pending: &[usize]| {
        let anchor_idx = clusters[cluster].anchor.unwrap();
        let anchor = dets[anchor_idx].bbox.center();
        for &i in pending {
            let (a, b) = (&dets[from].bbox, &dets[i].bbox);
            let penalty = u8::from(from != anchor_idx && !stacked(a, b));
            let key = (penalty, box_gap2(a, b), dist2(anchor, b.center()), cluster);
            if (key.0, key.1, key.2) < (best[i].0, best[i].1, best[i].2) {
                best[i] = key;
            }
        }
    };
    for (ci, c) in clusters.iter().enumerate() {
        owner[c.anchor.unwrap()] = Some(ci);
    }
    for ci in 0..clusters.len() {
        relax(clusters[ci].anchor.unwrap(), ci, &mut best, &pending);
    }
    while !pending.is_empty() {
        let k = (0..pending.len())
            .min_by(|&a, &b| {
                let (ka, kb) = (best[pending[a]], best[pending[b]]);
                (ka.0, ka.1, ka.2).partial_cmp(&(kb.0, kb.1, kb.2)).unwrap_or(Ordering::Equal)
            })
            .unwrap();
        let i = pending.swap_remove(k);
        let ci = best[i].3;
        owner[i] = Some(ci);
        relax(i, ci, &mut best, &pending);
    }
    for &i in &items {
        if dets[i].category != ElementCategory::EventMark {
            let ci = owner[i].expect("every element is assigned");
            clusters[ci].members.push(i);
        }
    }
    Ok(clusters)
}

/// Typical placement of one category within events.
#[derive(Debug, Clone, PartialEq)]
struct RoleGroup {
    category: ElementCategory,
    offset: (f64, f64),
    size: (f64, f64),
    /// Clusters holding a member in this role.
    clusters: Vec<usize>,
}

impl RoleGroup {
    fn holds(&self, offset: (f64, f64), size: (f64, f64)) -> bool {
        let tx = 0.5 * self.size.0.max(size.0) + 4.0;
        let ty = 0.5 * self.size.1.max(size.1) + 4.0;
        (offset.0 - self.offset.0).abs() <= tx && (offset.1 - self.offset.1).abs() <= ty
    }
}

fn size_of(b: &BBox) -> (f64, f64) {
    (b.width as f64, b.height as f64)
}

/// Role groups per category: members sharing a category and a similar
/// offset from their cluster origin, with median offset and size.
fn role_groups(clusters: &[EventCluster], dets: &[Detection]) -> Vec<RoleGroup> {
    struct Acc {
        category: ElementCategory,
        seed: RoleGroup,
        offsets: Vec<(f64, f64)>,
        sizes: Vec<(f64, f64)>,
    }
    let mut accs: Vec<Acc> = Vec::new();
    for (ci, c) in clusters.iter().enumerate() {
        for &i in &c.members {
            if Some(i) == c.anchor {
                continue;
            }
            let d = &dets[i];
            let off = c.role(dets, i);
            let size = size_of(&d.bbox);
            match accs.iter_mut().find(|a| a.category == d.category && a.seed.holds(off, size)) {
                Some(a) => {
                    a.offsets.push(off);
                    a.sizes.push(size);
                    if !a.seed.clusters.contains(&ci) {
                        a.seed.clusters.push(ci);
                    }
                }
                None => accs.push(Acc {
                    category: d.category,
                    seed: RoleGroup { category: d.category, offset: off, size, clusters: vec![ci] },
                    offsets: vec![off],
                    sizes: vec![size],
                }),
            }
        }
    }
    accs.into_iter()
        .map(|a| {
            let mut xs: Vec<f64> = a.offsets.iter().map(|o| o.0).collect();
            let mut ys: Vec<f64> = a.offsets.iter().map(|o| o.1).collect();
            let mut ws: Vec<f64> = a.sizes.iter().map(|s| s.0).collect();
            let mut hs: Vec<f64> = a.sizes.iter().map(|s| s.1).collect();
            RoleGroup {
                category: a.category,
                offset: (median(&mut xs), median(&mut ys)),
                size: (median(&mut ws), median(&mut hs)),
                clusters: a.seed.clusters,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeGate {
    /// Allowed relative difference in aspect ratio.
    pub aspect_tol: f64,
    /// Allowed relative difference in area.
    pub area_tol: f64,
}

impl Default for ShapeGate {
    fn default() -> Self {
        Self { aspect_tol: 0.2, area_tol: 0.3 }
    }
}

impl ShapeGate {
    fn admits(&self, size: (f64, f64), proto: (f64, f64)) -> bool {
        let rel = |a: f64, b: f64| (a - b).abs() / b.max(1e-9);
        rel(size.0 / size.1, proto.0 / proto.1) <= self.aspect_tol
            && rel(size.0 * size.1, proto.0 * proto.1) <= self.area_tol
    }
}

/// Relabel members whose shape and position match a role that a strict
/// majority of events fill with another category.
pub fn fix_misclassified(clusters: &[EventCluster], dets: &[Detection], gate: ShapeGate) -> Vec<Detection> {
    let mut out = dets.to_vec();
    let majority: Vec<RoleGroup> =
        role_groups(clusters, dets).into_iter().filter(|g| 2 * g.clusters.len() > clusters.len()).collect();
    let presence =
        |cat: ElementCategory| clusters.iter().filter(|c| c.members.iter().any(|&i| dets[i].category == cat)).count();
    for (ci, c) in clusters.iter().enumerate() {
        for &i in &c.members {
            if Some(i) == c.anchor {
                continue;
            }
            let d = &dets[i];
            let off = c.role(dets, i);
            let size = size_of(&d.bbox);
            let target = majority.iter().find(|g| {
                g.category != d.category
                    && !g.clusters.contains(&ci)
                    && presence(d.category) < g.clusters.len()
                    && g.holds(off, size)
                    && gate.admits(size, g.size)
            });
            if let Some(g) = target {
                out[i].category = g.category;
            }
        }
    }
    out
}

/// For every role filled in a strict majority of events, synthesize the
/// element in anchored events that lack it, at the median offset and size.
/// Events already holding as many elements of the category as there are
/// majority roles for it are left alone.
pub fn recover_missing(clusters: &[EventCluster], dets: &[Detection]) -> Vec<Detection> {
    let mut out = dets.to_vec();
    let groups: Vec<RoleGroup> =
        role_groups(clusters, dets).into_iter().filter(|g| 2 * g.clusters.len() > clusters.len()).collect();
    // an event stacked on the other side of its mark still has the element
    let expected = |cat: ElementCategory| groups.iter().filter(|g| g.category == cat).count();
    for g in &groups {
        for (ci, c) in clusters.iter().enumerate() {
            let Some(anchor) = c.anchor else { continue };
            if g.clusters.contains(&ci) {
                continue;
            }
            let have = c.members.iter().filter(|&&i| dets[i].category == g.category).count();
            if have >= expected(g.category) {
                continue;
            }
            let occupied = c
                .members
                .iter()
                .any(|&i| dets[i].category == g.category && g.holds(c.role(dets, i), size_of(&dets[i].bbox)));
            if occupied {
                continue;
            }
            let (ax, ay) = dets[anchor].bbox.center();
            let (w, h) = (g.size.0.round().max(1.0), g.size.1.round().max(1.0));
            let left = (ax + g.offset.0 - w / 2.0).round() as i32;
            let top = (ay + g.offset.1 - h / 2.0).round() as i32;
            let bbox = BBox::new(top, left, w as u32, h as u32);
            out.push(Detection::recovered(g.category, bbox, RECOVERED_SCORE));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupMode {
    /// Run both and keep the more shape-consistent result.
    #[default]
    Auto,
    Nms,
    Nmm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    /// Detections scoring below this are discarded before anything else.
    pub score_thresh: f64,
    pub nms_iou: f64,
    pub nmm_iou: f64,
    pub dedup: DedupMode,
    pub gate: ShapeGate,
    pub fix_misclassified: bool,
    pub recover_missing: bool,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            score_thresh: 0.3,
            nms_iou: 0.5,
            nmm_iou: 0.5,
            dedup: DedupMode::Auto,
            gate: ShapeGate::default(),
            fix_misclassified: true,
            recover_missing: true,
        }
    }
}

impl ReconstructConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("score_thresh", self.score_thresh), ("nms_iou", self.nms_iou), ("nmm_iou", self.nmm_iou)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} not in [0, 1]")));
            }
        }
        if !(self.gate.aspect_tol >= 0.0 && self.gate.area_tol >= 0.0) {
            return Err(Error::Config("shape gate tolerances must be >= 0".into()));
        }
        Ok(())
    }
}

/// Output of each pipeline stage, plus what clustering found.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Score-filtered input.
    pub raw: Vec<Detection>,
    pub deduplicated: Vec<Detection>,
    pub dedup_choice: DedupMode,
    /// After voting and recovery; the final result.
    pub repaired: Vec<Detection>,
    pub orientation: Option<Orientation>,
    /// Clusters over `repaired`.
    pub clusters: Vec<EventCluster>,
}

/// Run the repair pipeline. `orientation` overrides inference from marks.
pub fn reconstruct(
    dets: &[Detection],
    image_dims: (u32, u32),
    orientation: Option<Orientation>,
    config: &ReconstructConfig,
) -> Result<Reconstruction> {
    config.validate()?;
    let raw: Vec<Detection> = dets.iter().filter(|d| d.score >= config.score_thresh).cloned().collect();
    let area = image_dims.0 as f64 * image_dims.1 as f64;
    let (dedup_choice, deduplicated) = match config.dedup {
        DedupMode::Nms => (DedupMode::Nms, nms(&raw, config.score_thresh, config.nms_iou)),
        DedupMode::Nmm => (DedupMode::Nmm, nmm(&raw, config.nmm_iou, area)),
        DedupMode::Auto => {
            select_dedup(nms(&raw, config.score_thresh, config.nms_iou), nmm(&raw, config.nmm_iou, area))
        }
    };
    let orientation = orientation.or_else(|| infer_orientation(&deduplicated).ok());
    let axis = orientation.unwrap_or(Orientation::Horizontal);
    let mut repaired = deduplicated.clone();
    if let Ok(clusters) = cluster_events(&repaired, axis) {
        if config.fix_misclassified {
            repaired = fix_misclassified(&clusters, &repaired, config.gate);
        }
    }
    if let Ok(clusters) = cluster_events(&repaired, axis) {
        if config.recover_missing {
            repaired = recover_missing(&clusters, &repaired);
        }
    }
    let clusters = cluster_events(&repaired, axis).unwrap_or_default();
    Ok(Reconstruction { raw, deduplicated, dedup_choice, repaired, orientation, clusters })
}

#[cfg(test)]
mod tests;
