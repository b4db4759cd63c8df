//! SVG serialization of a render scene. Filled pixel sets become one path
//! of unit-height runs; patches become embedded PNG images.

use std::fmt::Write;
use std::io::Cursor;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use image::ImageFormat;

use super::{Paint, Scene};
use crate::model::Rgb;
use crate::raster::Coverage;

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn runs_path(cov: &Coverage) -> String {
    let mut d = String::new();
    let (w, h) = (cov.mask.width(), cov.mask.height());
    for y in 0..h {
        let mut x = 0;
        while x < w {
            if !cov.mask.get(x, y) {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && cov.mask.get(x, y) {
                x += 1;
            }
            let (ax, ay) = (cov.bbox.left + start as i32, cov.bbox.top + y as i32);
            let _ = write!(d, "M{ax} {ay}h{}v1h-{}z", x - start, x - start);
        }
    }
    d
}

pub(crate) fn to_svg(scene: &Scene) -> String {
    let (w, h) = scene.canvas;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(out, r#"  <rect width="{w}" height="{h}" fill="{}"/>"#, hex(scene.background));
    for (paint, el) in &scene.items {
        let class = el.category.as_str();
        match paint {
            Paint::Fill { coverage, color } => {
                let _ =
                    writeln!(out, r#"  <path class="{class}" fill="{}" d="{}"/>"#, hex(*color), runs_path(coverage));
            }
            Paint::Patch { patch, left, top } => {
                let mut buf = Cursor::new(Vec::new());
                patch.write_to(&mut buf, ImageFormat::Png).expect("PNG encoding into memory");
                let _ = writeln!(
                    out,
                    r#"  <image class="{class}" x="{left}" y="{top}" width="{}" height="{}" style="image-rendering:pixelated" href="data:image/png;base64,{}"/>"#,
                    patch.width(),
                    patch.height(),
                    STANDARD.encode(buf.into_inner())
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
