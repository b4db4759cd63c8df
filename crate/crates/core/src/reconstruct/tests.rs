use proptest::prelude::*;

use super::*;
use crate::mask::PixelMask;
use crate::model::ElementCategory::*;
use crate::synth;

fn det(cat: ElementCategory, top: i32, left: i32, w: u32, h: u32, score: f64) -> Detection {
    Detection::new(cat, BBox::new(top, left, w, h), score)
}

#[test]
fn nms_keeps_the_confident_box() {
    let a = det(AnnotationMark, 0, 0, 20, 10, 1.0);
    let b = det(AnnotationMark, 0, 5, 20, 10, 0.58);
    assert!((iou(&a.bbox, &b.bbox) - 0.6).abs() < 1e-12);
    assert_eq!(nms(&[a.clone(), b], 0.0, 0.5), vec![a]);
}

#[test]
fn nms_trivial_cases() {
    assert!(nms(&[], 0.0, 0.5).is_empty());
    let disjoint =
        vec![det(EventMark, 0, 0, 5, 5, 0.9), det(EventMark, 0, 10, 5, 5, 0.8), det(EventMark, 0, 20, 5, 5, 0.7)];
    assert_eq!(nms(&disjoint, 0.0, 0.5), disjoint);
}

#[test]
fn nms_is_per_category() {
    let a = det(EventMark, 0, 0, 10, 10, 0.9);
    let b = det(EventText, 0, 0, 10, 10, 0.8);
    assert_eq!(nms(&[a, b], 0.0, 0.5).len(), 2);
}

#[test]
fn nmm_merges_part_box_into_full_box() {
    let full = det(AnnotationMark, 10, 10, 10, 10, 1.0);
    let part = det(AnnotationMark, 10, 10, 6, 10, 1.0);
    let out = nmm(&[part, full.clone()], 0.5, 10_000.0);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].bbox, full.bbox);
    assert_eq!(out[0].score, 1.0);
}

#[test]
fn nmm_disjoint_unchanged() {
    let boxes = vec![det(EventMark, 0, 0, 5, 5, 0.9), det(EventMark, 0, 10, 5, 5, 0.8)];
    let mut out = nmm(&boxes, 0.5, 1000.0);
    out.sort_by_key(|d| d.bbox.left);
    assert_eq!(out, boxes);
}

#[test]
fn nmm_hand_traced_merge() {
    // A: 20x5 = 100 px^2; B shifted 5 px right gives 75 / 125 = 0.6
    let a = det(AnnotationText, 0, 0, 20, 5, 0.9);
    let b = det(AnnotationText, 0, 5, 20, 5, 0.85);
    let c = det(AnnotationText, 50, 50, 8, 8, 0.5);
    let mut out = nmm(&[a, b, c.clone()], 0.5, 10_000.0);
    out.sort_by_key(|d| d.bbox.top);
    assert_eq!(out.len(), 2);
    assert_eq!(out[0].bbox, BBox::new(0, 0, 25, 5));
    assert_eq!(out[0].score, 0.9);
    assert_eq!(out[1], c);
}

#[test]
fn nmm_merges_masks_as_union() {
    let a = det(EventMark, 0, 0, 4, 1, 0.9).with_mask(PixelMask::from_fn(4, 1, |x, _| x < 2));
    let b = det(EventMark, 0, 1, 4, 1, 0.8).with_mask(PixelMask::from_fn(4, 1, |x, _| x >= 2));
    let out = nmm(&[a, b], 0.5, 100.0);
    assert_eq!(out.len(), 1);
    let m = out[0].mask.as_ref().unwrap();
    let bits: Vec<bool> = (0..5).map(|x| m.get(x, 0)).collect();
    assert_eq!(bits, [true, true, false, true, true]);
}

#[test]
fn select_prefers_consistent_shapes() {
    let marks = |widths: &[u32]| -> Vec<Detection> {
        widths.iter().enumerate().map(|(i, &w)| det(AnnotationMark, 0, 40 * i as i32, w, 10, 0.9)).collect()
    };
    let nmm_out = marks(&[10, 10, 10, 10, 10]);
    let nms_out = marks(&[10, 10, 5, 10, 10]);
    // CV oracle: aspect and area are both {1,1,.5,1,1} scaled, CV = 0.2/0.9
    let cv = shape_inconsistency(&nms_out).unwrap();
    let values = [1.0, 1.0, 0.5, 1.0, 1.0];
    let mean: f64 = values.iter().sum::<f64>() / 5.0;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 5.0).sqrt();
    assert!((cv - sd / mean).abs() < 1e-12);
    assert_eq!(shape_inconsistency(&nmm_out), Some(0.0));
    assert_eq!(select_dedup(nms_out.clone(), nmm_out.clone()).0, DedupMode::Nmm);
    assert_eq!(select_dedup(nmm_out.clone(), nms_out.clone()).0, DedupMode::Nms);
    assert_eq!(select_dedup(nmm_out.clone(), nmm_out.clone()).0, DedupMode::Nmm);
    let single = marks(&[10]);
    assert_eq!(select_dedup(single.clone(), single).0, DedupMode::Nmm);
}

fn marks_at(points: &[(i32, i32)]) -> Vec<Detection> {
    points.iter().map(|&(x, y)| det(EventMark, y - 5, x - 5, 10, 10, 1.0)).collect()
}

#[test]
fn orientation_from_marks() {
    let h = marks_at(&[(10, 100), (110, 100), (210, 100)]);
    assert_eq!(infer_orientation(&h).unwrap(), Orientation::Horizontal);
    let v = marks_at(&[(50, 10), (50, 110), (50, 210)]);
    assert_eq!(infer_orientation(&v).unwrap(), Orientation::Vertical);
    let d = marks_at(&[(0, 0), (50, 50), (100, 100), (150, 150)]);
    assert!((principal_angle(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]) - 45.0).abs() < 1e-9);
    assert_eq!(infer_orientation(&d).unwrap(), Orientation::Other);
    assert!(matches!(infer_orientation(&h[..1]), Err(Error::TooFewMarks(1))));
}

#[test]
fn marks_with_text_above_make_pairs() {
    let mut dets = marks_at(&[(110, 100), (10, 100), (210, 100)]);
    for x in [10, 110, 210] {
        dets.push(det(EventText, 80, x - 15, 30, 10, 0.9));
    }
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    assert_eq!(clusters.len(), 3);
    assert!(clusters.iter().all(|c| c.members.len() == 2));
    let xs: Vec<f64> = clusters.iter().map(|c| c.axis_pos).collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
    for c in &clusters {
        let (a, t) = (&dets[c.members[0]], &dets[c.members[1]]);
        assert!((a.bbox.center().0 - t.bbox.center().0).abs() < 1.0);
    }
}

#[test]
fn gap_rule_without_marks() {
    // extents 20 px, so gaps above 30 px split; groups sit 100 px apart
    let mut dets = Vec::new();
    for g in 0..4 {
        let x = 100 * g;
        dets.push(det(AnnotationText, 0, x, 20, 8, 0.9));
        dets.push(det(AnnotationIcon, 10, x + 2, 20, 20, 0.9));
    }
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    assert_eq!(clusters.len(), 4);
    assert!(clusters.iter().all(|c| c.members.len() == 2 && c.anchor.is_none()));
    let one = cluster_events(&dets[..2], Orientation::Horizontal).unwrap();
    assert_eq!(one.len(), 1);
    assert!(matches!(
        cluster_events(&[det(MainBody, 0, 0, 100, 3, 1.0)], Orientation::Horizontal),
        Err(Error::NoElements)
    ));
}

#[test]
fn single_cluster_stays_single() {
    let mut dets = marks_at(&[(50, 50)]);
    dets.push(det(EventText, 60, 40, 20, 8, 0.9));
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0].members, vec![0, 1]);
}

/// Five events, marks 100 px apart, with annotation text at (0, -30)
/// relative to the mark center.
fn five_events(fifth: ElementCategory, fifth_size: (u32, u32)) -> Vec<Detection> {
    let mut dets = Vec::new();
    for i in 0..5 {
        let cx = 50 + 100 * i;
        dets.push(det(EventMark, 95, cx - 5, 10, 10, 1.0));
        let (cat, (w, h)) = if i == 4 { (fifth, fifth_size) } else { (AnnotationText, (80, 12)) };
        dets.push(det(cat, 70 - h as i32 / 2, cx - w as i32 / 2, w, h, 0.9));
    }
    dets
}

#[test]
fn vote_relabels_same_shaped_minority() {
    let dets = five_events(AnnotationIcon, (80, 12));
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    let fixed = fix_misclassified(&clusters, &dets, ShapeGate::default());
    assert_eq!(fixed[9].category, AnnotationText);
    assert_eq!(fixed.iter().filter(|d| d.category == AnnotationText).count(), 5);
    for (a, b) in fixed.iter().zip(&dets) {
        assert_eq!(a.bbox, b.bbox);
    }
}

#[test]
fn vote_leaves_agreeing_clusters_alone() {
    let dets = five_events(AnnotationText, (80, 12));
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    assert_eq!(fix_misclassified(&clusters, &dets, ShapeGate::default()), dets);
}

#[test]
fn vote_shape_gate_blocks_square_icon() {
    // 16x16 vs 80x12: aspect 1.0 vs 6.67, far outside 20 %
    let dets = five_events(AnnotationIcon, (16, 16));
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    let fixed = fix_misclassified(&clusters, &dets, ShapeGate::default());
    assert_eq!(fixed[9].category, AnnotationIcon);
}

fn with_event_texts(present: usize, total: usize) -> Vec<Detection> {
    let mut dets = Vec::new();
    for i in 0..total {
        let left = 100 * i as i32;
        dets.push(det(EventMark, 100, left, 10, 10, 1.0));
        if i < present {
            dets.push(det(EventText, 140, left - 5, 60, 14, 0.9));
        }
    }
    dets
}

#[test]
fn recovery_fills_the_missing_event_text() {
    let dets = with_event_texts(4, 5);
    let clusters = cluster_events(&dets, Orientation::Horizontal).unwrap();
    let out = recover_missing(&clusters, &dets);
    assert_eq!(out.len(), dets.len() + 1);
    assert_eq!(&out[..dets.len()], &dets[..]);
    let r = out.last().unwrap();
    assert!(r.is_recovered());
    assert_eq!(r.score, RECOVERED_SCORE);
    assert_eq!(r.category, EventText);
    // fifth anchor is at (top 100, left 400); offset (-5, +40), 60x14
    assert_eq!(r.bbox, BBox::new(140, 395, 60, 14));
}

#[test]
fn recovery_needs_strict_majority() {
    let complete = with_event_texts(5, 5);
    let clusters = cluster_events(&complete, Orientation::Horizontal).unwrap();
    assert_eq!(recover_missing(&clusters, &complete), complete);
    let half = with_event_texts(2, 4);
    let clusters = cluster_events(&half, Orientation::Horizontal).unwrap();
    assert_eq!(recover_missing(&clusters, &half), half);
}

#[test]
fn fig7b_fixture() {
    // a full mark and a part-of-mark box covering 60 % of it
    let full = det(AnnotationMark, 0, 0, 10, 10, 1.0);
    for part_score in [0.58, 1.0] {
        let part = det(AnnotationMark, 0, 0, 6, 10, part_score);
        let dets = vec![full.clone(), part];
        let kept = nms(&dets, 0.8, 0.7);
        if part_score < 0.8 {
            assert_eq!(kept, vec![full.clone()]);
        } else {
            assert_eq!(kept.len(), 2);
        }
        let merged = nmm(&dets, 0.5, 400.0);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].bbox, full.bbox);
    }
}

fn timeline(seed: u64) -> crate::model::AnnotatedTimeline {
    (seed..)
        .find_map(|s| {
            let spec = synth::sample_spec(s, None).ok()?;
            let data = synth::sample_data(&spec, s).ok()?;
            synth::generate(&spec, &data, s).ok()
        })
        .unwrap()
}

#[test]
fn clustering_recovers_ground_truth_events() {
    let mut exact = 0;
    for seed in 0..60 {
        let t = timeline(seed * 7);
        let dets = t.perfect_detections(1.0);
        let clusters = cluster_events(&dets, t.global.orientation).unwrap();
        let mut got: Vec<Vec<usize>> = clusters
            .iter()
            .map(|c| {
                let mut m = c.members.clone();
                m.sort();
                m
            })
            .collect();
        got.sort();
        let mut want: Vec<Vec<usize>> = t
            .events
            .iter()
            .map(|g| {
                let mut m = g.clone();
                m.sort();
                m
            })
            .collect();
        want.sort();
        if got == want {
            exact += 1;
        } else {
            eprintln!("seed {} {:?}: clusters differ", seed * 7, t.global);
        }
    }
    assert!(exact == 60, "{exact}/60 timelines clustered exactly");
}

#[test]
fn pipeline_is_identity_on_perfect_detections() {
    for seed in 0..20 {
        let t = timeline(seed * 13);
        let dets = t.perfect_detections(1.0);
        let r = reconstruct(&dets, t.image.dimensions(), Some(t.global.orientation), &Default::default()).unwrap();
        assert_eq!(r.repaired.len(), dets.len(), "seed {}", seed * 13);
    }
}

fn arb_dets() -> impl Strategy<Value = Vec<Detection>> {
    prop::collection::vec((0usize..3, 0i32..40, 0i32..40, 1u32..15, 1u32..15, 0.0f64..1.0), 0..12).prop_map(|v| {
        v.into_iter().map(|(c, t, l, w, h, s)| det([EventMark, EventText, AnnotationMark][c], t, l, w, h, s)).collect()
    })
}

proptest! {
    #[test]
    fn nms_idempotent(dets in arb_dets(), st in 0.0f64..1.0, it in 0.05f64..1.0) {
        let once = nms(&dets, st, it);
        prop_assert_eq!(nms(&once, st, it), once);
    }

    #[test]
    fn nmm_properties(dets in arb_dets(), it in 0.05f64..1.0) {
        let once = nmm(&dets, it, 4000.0);
        let mut twice = nmm(&once, it, 4000.0);
        let mut sorted = once.clone();
        let key = |d: &Detection| (d.category as u8, d.bbox.top, d.bbox.left, d.bbox.width, d.bbox.height);
        sorted.sort_by_key(key);
        twice.sort_by_key(key);
        prop_assert_eq!(&twice, &sorted);
        for (i, a) in once.iter().enumerate() {
            for b in &once[i + 1..] {
                prop_assert!(a.category != b.category || iou(&a.bbox, &b.bbox) < it);
            }
        }
        for d in &dets {
            prop_assert!(once.iter().any(|o| o.category == d.category
                && o.bbox.intersection(&d.bbox) == Some(d.bbox)));
        }
    }

    #[test]
    fn repair_never_moves_or_drops(dets in arb_dets()) {
        if let Ok(clusters) = cluster_events(&dets, Orientation::Horizontal) {
            let fixed = fix_misclassified(&clusters, &dets, ShapeGate::default());
            prop_assert_eq!(fixed.len(), dets.len());
            for (a, b) in fixed.iter().zip(&dets) {
                prop_assert_eq!(a.bbox, b.bbox);
            }
            let rec = recover_missing(&clusters, &dets);
            prop_assert_eq!(&rec[..dets.len()], &dets[..]);
        }
    }
}
