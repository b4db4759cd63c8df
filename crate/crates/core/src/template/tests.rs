use std::collections::BTreeMap;

use image::Rgb as Pixel;

use super::*;
use crate::model::{AnnotatedTimeline, Layout, ScaleKind};
use crate::raster::Coverage;
use crate::synth::{self, SpecConstraints};

fn timeline(seed: u64, constraints: Option<&SpecConstraints>) -> AnnotatedTimeline {
    (seed..)
        .find_map(|s| {
            let spec = synth::sample_spec(s, constraints).ok()?;
            let data = synth::sample_data(&spec, s).ok()?;
            synth::generate(&spec, &data, s).ok()
        })
        .unwrap()
}

fn template_of(t: &AnnotatedTimeline) -> TemplateDoc {
    extract_template(&t.image, t.global, &t.perfect_detections(1.0)).unwrap()
}

fn text_image(text: &str, size: u32, fg: Rgb, bg: Rgb) -> (RgbImage, BBox) {
    let mut img = RgbImage::from_pixel(120, 40, Pixel(bg));
    let cov = Coverage::text(text, size, 10, 12).unwrap();
    cov.paint(&mut img, fg);
    (img, cov.bbox)
}

#[test]
fn black_text_on_white() {
    let (img, b) = text_image("TIMELINE", 12, [0, 0, 0], [255, 255, 255]);
    let f = extract_font_attrs(&img, &b).unwrap();
    assert!(f.color.iter().all(|&c| c <= 8), "{:?}", f.color);
    assert!(f.size.abs_diff(12) <= 2, "{}", f.size);
    assert_eq!(f.family, None);
}

#[test]
fn white_text_on_dark_is_inverted() {
    let (img, b) = text_image("DARK MODE", 15, [250, 250, 250], [30, 30, 60]);
    let f = extract_font_attrs(&img, &b).unwrap();
    assert_eq!(f.color, [250, 250, 250]);
    assert!(f.size.abs_diff(15) <= 2);
}

#[test]
fn bold_glyph_still_picks_the_ink() {
    // a lone "I" covers most of its own box; the surrounding ring decides
    let (img, b) = text_image("I", 18, [200, 0, 0], [255, 255, 255]);
    assert_eq!(extract_font_attrs(&img, &b).unwrap().color, [200, 0, 0]);
}

#[test]
fn solid_box_is_not_text() {
    let img = RgbImage::from_pixel(20, 20, Pixel([90, 90, 90]));
    assert!(matches!(extract_font_attrs(&img, &BBox::new(2, 2, 10, 8)), Err(Error::NotTextLike(_))));
}

fn fi(size: u32) -> FontInfo {
    FontInfo { size, color: [0, 0, 0], family: None }
}

#[test]
fn title_body_split() {
    use TextRole::*;
    let a = BBox::new(0, 0, 10, 5);
    let b = BBox::new(10, 0, 10, 5);
    assert_eq!(split_title_body(&[(b, fi(11)), (a, fi(18))]), vec![Body, Title]);
    assert_eq!(split_title_body(&[(a, fi(9))]), vec![Title]);
    // equal sizes: the upper one reads first
    assert_eq!(split_title_body(&[(b, fi(12)), (a, fi(12))]), vec![Body, Title]);
    assert!(split_title_body(&[]).is_empty());
}

#[test]
fn reusable_patches_reproduce_source_pixels() {
    for seed in 0..10 {
        let t = timeline(seed * 7, None);
        let doc = template_of(&t);
        for r in &doc.reusable {
            for (x, y) in r.bbox.pixels() {
                let (lx, ly) = ((x - r.bbox.left) as u32, (y - r.bbox.top) as u32);
                let p = r.patch.get_pixel(lx, ly).0;
                if r.mask.get(lx, ly) && r.category != ElementCategory::MainBody {
                    assert_eq!(&p[..3], &t.image.get_pixel(x as u32, y as u32).0[..]);
                    assert_eq!(p[3], 255);
                } else if !r.mask.get(lx, ly) {
                    assert_eq!(p[3], 0);
                }
            }
        }
    }
}

#[test]
fn category_partition_follows_reusability() {
    let c = SpecConstraints { schema: Some(synth::AnnotationSchema::FULL), ..Default::default() };
    let t = timeline(4, Some(&c));
    let doc = template_of(&t);
    let reusable: std::collections::BTreeSet<_> = doc.reusable.iter().map(|r| r.category).collect();
    let updatable: std::collections::BTreeSet<_> = doc.updatable.iter().map(|u| u.category).collect();
    use ElementCategory::*;
    assert_eq!(reusable, [EventMark, AnnotationMark, MainBody].into());
    assert_eq!(updatable, [EventText, AnnotationText, AnnotationIcon].into());
    for u in &doc.updatable {
        assert_eq!(u.font.is_some(), u.category.is_text());
        assert_eq!(u.color.is_some(), u.category == AnnotationIcon);
    }
}

#[test]
fn five_events_give_five_uniform_slots() {
    let c = SpecConstraints { n_events: Some(5), ..Default::default() };
    for seed in 0..8 {
        let t = timeline(seed * 13, Some(&c));
        let doc = template_of(&t);
        assert_eq!(doc.event_slots.len(), 5);
        let sig = |s: &EventSlot| {
            let mut m: BTreeMap<ElementCategory, usize> = BTreeMap::new();
            for member in &s.members {
                *m.entry(doc.element_category(member.element)).or_default() += 1;
            }
            m
        };
        let first = sig(&doc.event_slots[0]);
        assert!(doc.event_slots.iter().all(|s| sig(s) == first));
    }
}

#[test]
fn slots_follow_data_order() {
    for seed in 0..60 {
        let t = timeline(seed * 31, None);
        let doc = template_of(&t);
        assert_eq!(doc.event_slots.len(), t.events.len(), "seed {seed}");
        for (i, group) in t.events.iter().enumerate() {
            let mark = group.iter().find(|&&e| t.elements[e].category == ElementCategory::EventMark).unwrap();
            assert_eq!(doc.anchor_box(i), t.elements[*mark].bbox, "seed {seed} event {i}");
            let mut want: Vec<BBox> = group.iter().filter(|&e| e != mark).map(|&e| t.elements[e].bbox).collect();
            let mut got: Vec<BBox> = doc.event_slots[i].members.iter().map(|m| doc.element_bbox(m.element)).collect();
            want.sort_by_key(|b| b.to_array());
            got.sort_by_key(|b| b.to_array());
            assert_eq!(got, want, "seed {seed} event {i}");
        }
        if t.global.representation == Representation::Linear {
            assert_eq!(doc.rows, layout_rows(t.global.layout, t.events.len()));
        }
    }
}

#[test]
fn recomposition_covers_the_foreground() {
    for seed in 0..20 {
        let t = timeline(seed * 17 + 1, None);
        let doc = template_of(&t);
        let img = recompose(&doc);
        let bg = Pixel(doc.background);
        let fg: Vec<_> = t.image.enumerate_pixels().filter(|p| *p.2 != bg).collect();
        let same = fg.iter().filter(|(x, y, p)| img.get_pixel(*x, *y) == *p).count();
        let frac = same as f64 / fg.len() as f64;
        assert!(frac >= 0.95, "seed {seed}: {frac}");
    }
}

#[test]
fn body_gaps_under_marks_are_closed() {
    let c = SpecConstraints {
        representation: Some(Representation::Linear),
        layout: Some(Layout::Unified),
        ..Default::default()
    };
    let t = timeline(2, Some(&c));
    let doc = template_of(&t);
    let body = doc.reusable.iter().find(|r| r.category == ElementCategory::MainBody).unwrap();
    let along = if doc.global.orientation == Orientation::Vertical { body.bbox.width } else { body.bbox.height };
    let full_lines = (0..along)
        .filter(|&k| {
            let n = if doc.global.orientation == Orientation::Vertical { body.bbox.height } else { body.bbox.width };
            (0..n).all(|j| {
                let (x, y) = if doc.global.orientation == Orientation::Vertical { (k, j) } else { (j, k) };
                body.mask.get(x, y)
            })
        })
        .count();
    assert_eq!(full_lines as u32, along);
}

#[test]
fn no_event_clusters() {
    let img = RgbImage::from_pixel(50, 50, Pixel([255, 255, 255]));
    let g = GlobalInfo::new(Representation::Linear, ScaleKind::Sequential, Layout::Unified, Orientation::Horizontal)
        .unwrap();
    let body = Detection::new(ElementCategory::MainBody, BBox::new(20, 0, 50, 4), 0.9);
    assert!(matches!(extract_template(&img, g, &[body]), Err(Error::NoEvents)));
    assert!(matches!(extract_template(&img, g, &[]), Err(Error::NoEvents)));
}

#[test]
fn json_round_trip() {
    for seed in 0..10 {
        let t = timeline(seed * 3 + 100, None);
        let doc = template_of(&t);
        let back = TemplateDoc::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }
}

#[test]
fn golden_fixture() {
    let doc = TemplateDoc::from_json(include_str!("../../tests/fixtures/template_golden.json")).unwrap();
    assert_eq!(doc.canvas, (40, 20));
    assert_eq!(doc.global.orientation, Orientation::Horizontal);
    let mark = &doc.reusable[1];
    assert_eq!(mark.category, ElementCategory::EventMark);
    assert_eq!((mark.bbox.top, mark.bbox.left, mark.bbox.width, mark.bbox.height), (3, 5, 2, 2));
    assert_eq!(mark.mask, PixelMask::from_bits(2, 2, vec![true, true, true, false]).unwrap());
    assert_eq!(mark.patch.get_pixel(0, 0).0, [200, 30, 30, 255]);
    assert_eq!(mark.patch.get_pixel(1, 1).0[3], 0);
    let text = &doc.updatable[0];
    assert_eq!(text.font, Some(FontInfo { size: 12, color: [20, 20, 20], family: Some("Mono".into()) }));
    assert_eq!(text.role, Some(TextRole::Title));
    assert_eq!(doc.updatable[1].color, Some([0, 90, 200]));
    assert!(doc.updatable[1].patch.is_none());
    assert_eq!(doc.event_slots[0].anchor, 1);
    assert_eq!(doc.event_slots[0].members[1].offset, (25, 9));
    assert_eq!(doc.event_slots[0].members[0].element, ElementRef::Updatable(0));
    assert_eq!(TemplateDoc::from_json(&doc.to_json()).unwrap(), doc);
}

#[test]
fn schema_errors_name_the_field() {
    let golden = include_str!("../../tests/fixtures/template_golden.json");
    let cases = [
        (golden.replace("\"main_body\"", "\"event_text\""), "reusable[0].category"),
        (golden.replace("\"anchor\": 1", "\"anchor\": 0"), "event_slots[0].anchor"),
        (golden.replace("\"updatable\": 1", "\"updatable\": 7"), "event_slots[0].members[1].element"),
        (golden.replace("\"schema_version\": 1", "\"schema_version\": 2"), "schema_version"),
        (golden.replace("\"rows\": [\n    [\n      0\n    ]\n  ]", "\"rows\": []"), "rows"),
    ];
    for (text, field) in cases {
        assert_ne!(text, golden, "{field}: fixture edit did not apply");
        let msg = TemplateDoc::from_json(&text).unwrap_err().to_string();
        assert!(msg.contains(field), "{field}: {msg}");
    }
    let bad_png = golden.replacen("iVBOR", "AAAA", 1);
    assert!(TemplateDoc::from_json(&bad_png).unwrap_err().to_string().contains("patch_png"));
}

#[test]
fn external_command_hook() {
    let echo =
        ExternalCommand { program: "sh".into(), args: vec!["-c".into(), "test -s \"$0\" && echo Helvetica".into()] };
    let patch = RgbaImage::from_pixel(3, 3, Rgba([0, 0, 0, 255]));
    assert_eq!(echo.run_on_png(&patch).as_deref(), Some("Helvetica"));
    let missing = ExternalCommand { program: "/nonexistent/font-matcher".into(), args: vec![] };
    assert_eq!(missing.run_on_png(&patch), None);
}
