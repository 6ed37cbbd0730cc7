//! SVG rendering of planar decompositions.

use anyhow::{bail, Result};
use peelkit_core::geometry::{Point, Polytope};
use peelkit_core::peel::PeelDecomposition;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub width: f64,
    pub height: f64,
    pub stroke_scale: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 800.0,
            stroke_scale: 1.0,
        }
    }
}

/// Fill for stage `s` of `stages`: light blue for early stages shading
/// towards dark orange for the last.
fn stage_fill(s: usize, stages: usize) -> (u8, u8, u8) {
    let t = if stages <= 1 {
        0.0
    } else {
        (s.saturating_sub(1)) as f64 / (stages - 1) as f64
    };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    (lerp(173.0, 214.0), lerp(216.0, 96.0), lerp(230.0, 40.0))
}

/// Sorts planar points counter-clockwise around their mean.
fn angle_sorted(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    pts
}

/// Renders `dec` of `input`. Fails unless the input spans a plane.
pub fn render(input: &Polytope, dec: &PeelDecomposition, opts: &RenderOptions) -> Result<String> {
    if input.dim() != 2 {
        bail!("render needs a 2-dimensional hull, input hull has dimension {}", input.dim());
    }
    if !(opts.width > 0.0 && opts.height > 0.0 && opts.stroke_scale > 0.0) {
        bail!("width, height and stroke scale must be positive");
    }
    let hull = input.hull();
    let frame = |x: &[f64]| -> [f64; 2] {
        let y = hull.project(x);
        [y[0], y[1]]
    };

    let outline: Vec<[f64; 2]> = input.ambient_vertices().iter().map(|v| frame(v)).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &outline {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let margin = 0.05 * opts.width.min(opts.height);
    let scale = ((opts.width - 2.0 * margin) / span).min((opts.height - 2.0 * margin) / span);
    let to_px = |p: [f64; 2]| -> (f64, f64) {
        (margin + (p[0] - lo[0]) * scale, opts.height - margin - (p[1] - lo[1]) * scale)
    };
    let stroke = 0.002 * opts.width.min(opts.height) * opts.stroke_scale;
    let stages = dec.pieces.iter().map(|p| p.stage).max().unwrap_or(1);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = opts.width,
        h = opts.height
    )?;
    writeln!(out, r#"<g stroke="black" stroke-width="{stroke:.3}" stroke-linejoin="round">"#)?;
    for (i, piece) in dec.pieces.iter().enumerate() {
        let pts = angle_sorted(piece.body.ambient_vertices().iter().map(|v| frame(v)).collect());
        let (r, g, b) = stage_fill(piece.stage, stages);
        let mut d = String::new();
        for (j, p) in pts.iter().enumerate() {
            let (x, y) = to_px(*p);
            write!(d, "{}{x:.3} {y:.3} ", if j == 0 { "M" } else { "L" })?;
        }
        d.push('Z');
        writeln!(
            out,
            r#"<path data-piece="{i}" data-stage="{}" fill="rgb({r},{g},{b})" d="{d}"/>"#,
            piece.stage
        )?;
    }
    writeln!(out, "</g>")?;

    writeln!(out, r#"<g stroke="crimson" stroke-width="{:.3}">"#, 1.5 * stroke)?;
    for (i, piece) in dec.pieces.iter().enumerate() {
        let Some(plane) = &piece.cut_plane else { continue };
        if let Some((a, b)) = chord(&piece.body, plane, dec.params.tol) {
            let (x1, y1) = to_px(frame(&a));
            let (x2, y2) = to_px(frame(&b));
            writeln!(
                out,
                r#"<line data-cut="{i}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
            )?;
        }
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    Ok(out)
}

/// The two piece vertices on `plane` that lie farthest apart.
fn chord(body: &Polytope, plane: &peelkit_core::geometry::Hyperplane, tol: f64) -> Option<(Point, Point)> {
    let eps = tol * body.magnitude().max(1.0) * 100.0;
    let on: Vec<Point> = body
        .ambient_vertices()
        .into_iter()
        .filter(|v| plane.signed_distance(v).abs() <= eps)
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..on.len() {
        for j in i + 1..on.len() {
            let d: f64 = on[i].iter().zip(&on[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (on[i].clone(), on[j].clone()))
}
