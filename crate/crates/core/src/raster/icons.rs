//! Bundled vector icon glyphs, defined on the unit square and scaled at
//! render time.

use std::f64::consts::PI;

use super::Shape;

pub const ICON_COUNT: usize = 24;

pub const ICON_NAMES: [&str; ICON_COUNT] = [
    "circle",
    "square",
    "triangle_up",
    "triangle_down",
    "diamond",
    "pentagon",
    "hexagon",
    "octagon",
    "star4",
    "star5",
    "star6",
    "plus",
    "cross",
    "ring",
    "arrow_up",
    "arrow_right",
    "heart",
    "crescent",
    "hourglass",
    "chevron",
    "flag",
    "bolt",
    "house",
    "half_disk",
];

pub fn icon_id(name: &str) -> Option<usize> {
    ICON_NAMES.iter().position(|&n| n == name)
}

fn regular_polygon(sides: usize, rotation: f64) -> Vec<(f64, f64)> {
    (0..sides)
        .map(|i| {
            let a = rotation + 2.0 * PI * i as f64 / sides as f64;
            (0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin())
        })
        .collect()
}

fn star(points: usize, inner: f64) -> Vec<(f64, f64)> {
    (0..2 * points)
        .map(|i| {
            let r = if i % 2 == 0 { 0.5 } else { 0.5 * inner };
            let a = -PI / 2.0 + PI * i as f64 / points as f64;
            (0.5 + r * a.cos(), 0.5 + r * a.sin())
        })
        .collect()
}

fn unit_shape(id: usize) -> Shape {
    use Shape::*;
    let poly = |pts: &[(f64, f64)]| Polygon(pts.to_vec());
    match id % ICON_COUNT {
        0 => Ellipse { cx: 0.5, cy: 0.5, rx: 0.5, ry: 0.5 },
        1 => Rect { x: 0.0, y: 0.0, w: 1.0, h: 1.0 },
        2 => poly(&[(0.5, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        3 => poly(&[(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)]),
        4 => poly(&[(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)]),
        5 => Polygon(regular_polygon(5, -PI / 2.0)),
        6 => Polygon(regular_polygon(6, 0.0)),
        7 => Polygon(regular_polygon(8, PI / 8.0)),
        8 => Polygon(star(4, 0.45)),
        9 => Polygon(star(5, 0.5)),
        10 => Polygon(star(6, 0.55)),
        11 => Union(vec![Rect { x: 0.35, y: 0.0, w: 0.3, h: 1.0 }, Rect { x: 0.0, y: 0.35, w: 1.0, h: 0.3 }]),
        12 => Union(vec![
            Capsule { a: (0.12, 0.12), b: (0.88, 0.88), r: 0.12 },
            Capsule { a: (0.12, 0.88), b: (0.88, 0.12), r: 0.12 },
        ]),
        13 => Difference(
            Box::new(Ellipse { cx: 0.5, cy: 0.5, rx: 0.5, ry: 0.5 }),
            Box::new(Ellipse { cx: 0.5, cy: 0.5, rx: 0.28, ry: 0.28 }),
        ),
        14 => poly(&[(0.5, 0.0), (1.0, 0.5), (0.68, 0.5), (0.68, 1.0), (0.32, 1.0), (0.32, 0.5), (0.0, 0.5)]),
        15 => poly(&[(1.0, 0.5), (0.5, 1.0), (0.5, 0.68), (0.0, 0.68), (0.0, 0.32), (0.5, 0.32), (0.5, 0.0)]),
        16 => Union(vec![
            Ellipse { cx: 0.27, cy: 0.3, rx: 0.27, ry: 0.27 },
            Ellipse { cx: 0.73, cy: 0.3, rx: 0.27, ry: 0.27 },
            poly(&[(0.02, 0.4), (0.98, 0.4), (0.5, 1.0)]),
        ]),
        17 => Difference(
            Box::new(Ellipse { cx: 0.5, cy: 0.5, rx: 0.5, ry: 0.5 }),
            Box::new(Ellipse { cx: 0.75, cy: 0.4, rx: 0.42, ry: 0.42 }),
        ),
        18 => Union(vec![poly(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.5)]), poly(&[(0.5, 0.5), (1.0, 1.0), (0.0, 1.0)])]),
        19 => poly(&[(0.0, 0.0), (0.45, 0.0), (1.0, 0.5), (0.45, 1.0), (0.0, 1.0), (0.55, 0.5)]),
        20 => Union(vec![Rect { x: 0.0, y: 0.0, w: 0.15, h: 1.0 }, poly(&[(0.15, 0.0), (1.0, 0.3), (0.15, 0.6)])]),
        21 => poly(&[(0.6, 0.0), (0.15, 0.55), (0.45, 0.55), (0.35, 1.0), (0.85, 0.4), (0.55, 0.4), (0.75, 0.0)]),
        22 => Union(vec![poly(&[(0.5, 0.0), (1.0, 0.45), (0.0, 0.45)]), Rect { x: 0.15, y: 0.45, w: 0.7, h: 0.55 }]),
        _ => Polygon(
            (0..=24)
                .map(|i| {
                    let a = PI + PI * i as f64 / 24.0;
                    (0.5 + 0.5 * a.cos(), 1.0 + a.sin())
                })
                .collect(),
        ),
    }
}

fn transform(shape: Shape, x: f64, y: f64, w: f64, h: f64) -> Shape {
    let p = |(u, v): (f64, f64)| (x + u * w, y + v * h);
    match shape {
        Shape::Rect { x: rx, y: ry, w: rw, h: rh } => {
            Shape::Rect { x: x + rx * w, y: y + ry * h, w: rw * w, h: rh * h }
        }
        Shape::Ellipse { cx, cy, rx, ry } => Shape::Ellipse { cx: x + cx * w, cy: y + cy * h, rx: rx * w, ry: ry * h },
        Shape::Polygon(pts) => Shape::Polygon(pts.into_iter().map(p).collect()),
        Shape::Capsule { a, b, r } => Shape::Capsule { a: p(a), b: p(b), r: r * w.min(h) },
        Shape::Union(parts) => Shape::Union(parts.into_iter().map(|s| transform(s, x, y, w, h)).collect()),
        Shape::Difference(a, b) => {
            Shape::Difference(Box::new(transform(*a, x, y, w, h)), Box::new(transform(*b, x, y, w, h)))
        }
    }
}

/// The glyph scaled so its bounds fill the box `(x, y, w, h)`.
pub fn icon_shape(id: usize, x: f64, y: f64, w: f64, h: f64) -> Shape {
    let unit = unit_shape(id);
    let (bx0, by0, bx1, by1) = unit.bounds();
    let (sw, sh) = (w / (bx1 - bx0), h / (by1 - by0));
    transform(unit, x - bx0 * sw, y - by0 * sh, sw, sh)
}
