//! Standalone SVG pictures of the tiling in the Poincaré disk.

use crate::hyperbolic_core::{BoundaryPoint, Geodesic, Triplet};
use crate::spectrum::FramePath;
use crate::tiling::{Tiling, VType, Vertex};
use crate::words::{matrix_of_word, CyclicWord};
use num_complex::Complex64;
use std::collections::{HashSet, VecDeque};
use std::fmt::Write;
use std::path::PathBuf;

/// Largest accepted tiling depth; the vertex count grows exponentially with it.
pub const MAX_DEPTH: usize = 14;

const SIZE: f64 = 800.0;
const RADIUS: f64 = 370.0;
const SAMPLES: usize = 24;
const KEY_GRID: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Overlay {
    /// Axis of the closed geodesic of a word, with four periods of its vertex path.
    Word(CyclicWord),
    /// Complete geodesic between two boundary angles.
    Geodesic(f64, f64),
    /// Spectacle path from `A0` towards a boundary angle.
    Path(f64),
    /// Regular and dual spectacle intervals of the edges leaving `A0`.
    Intervals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub triplet: Triplet,
    pub depth: usize,
    pub overlays: Vec<Overlay>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("depth must lie in 1..={MAX_DEPTH}, got {0}")]
    Depth(usize),
    #[error("render spec is for {0:?} but the tiling is for {1:?}")]
    TripletMismatch(Triplet, Triplet),
    #[error("word {0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("geodesic endpoints coincide")]
    Degenerate,
}

fn px(z: Complex64) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * z.re, SIZE / 2.0 - RADIUS * z.im)
}

fn key(z: Complex64) -> (i64, i64) {
    ((z.re / KEY_GRID).round() as i64, (z.im / KEY_GRID).round() as i64)
}

/// Points along the geodesic segment `[u, v]`: straight from the origin
/// after moving `u` there, then mapped back.
fn segment_points(u: Complex64, v: Complex64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = (v - u) / (one - u.conj() * v);
    (0..=SAMPLES)
        .map(|i| {
            let y = w * (i as f64 / SAMPLES as f64);
            (y + u) / (one + u.conj() * y)
        })
        .collect()
}

fn geodesic_points(g: &Geodesic) -> Vec<Complex64> {
    (-160..=160).map(|i| g.point_at(i as f64 * 0.1)).collect()
}

fn polyline(svg: &mut String, pts: &[Complex64], stroke: &str, width: f64) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&z| {
            let (x, y) = px(z);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
        coords.join(" ")
    );
}

fn dot(svg: &mut String, z: Complex64, r: f64, fill: &str) {
    let (x, y) = px(z);
    let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
}

/// Boundary arc drawn clockwise from `left` to `right` at radius `rho`.
fn boundary_arc(svg: &mut String, left: f64, right: f64, rho: f64, stroke: &str) {
    let mut span = (left - right).rem_euclid(std::f64::consts::TAU);
    if span == 0.0 {
        span = std::f64::consts::TAU;
    }
    let n = ((span / 0.02).ceil() as usize).max(2);
    let pts: Vec<Complex64> = (0..=n).map(|i| Complex64::from_polar(rho, left - span * i as f64 / n as f64)).collect();
    polyline(svg, &pts, stroke, 4.0);
}

/// Edges of the tiling within `depth` steps of `A0`, as disk endpoint pairs.
fn tiling_edges(tiling: &Tiling, depth: usize) -> Vec<(Complex64, Complex64)> {
    let gd = &tiling.gd;
    let start = Vertex::base(VType::A);
    let mut seen = HashSet::from([key(start.position_disk(gd))]);
    let mut edges_seen = HashSet::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        let a = v.position_disk(gd);
        for e in tiling.neighbors(&v) {
            let b = e.head.position_disk(gd);
            let (ka, kb) = (key(a), key(b));
            if edges_seen.insert(if ka < kb { (ka, kb) } else { (kb, ka) }) {
                edges.push((a, b));
            }
            if seen.insert(kb) {
                queue.push_back((e.head, d + 1));
            }
        }
    }
    edges
}

/// The SVG document for `spec`.
pub fn render_svg(tiling: &Tiling, spec: &RenderSpec) -> Result<String, RenderError> {
    if spec.depth == 0 || spec.depth > MAX_DEPTH {
        return Err(RenderError::Depth(spec.depth));
    }
    if tiling.triplet() != spec.triplet {
        return Err(RenderError::TripletMismatch(spec.triplet, tiling.triplet()));
    }
    let gd = &tiling.gd;
    let t = spec.triplet;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, "<title>Tiling of the ({},{},{}) triangle group, depth {}</title>", t.p, t.q, t.r, spec.depth);
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (cx, cy) = px(Complex64::new(0.0, 0.0));
    let _ = writeln!(svg, r##"<circle cx="{cx}" cy="{cy}" r="{RADIUS}" fill="#f7f7f2" stroke="black" stroke-width="1.5"/>"##);

    let _ = writeln!(svg, r#"<g id="tiling">"#);
    for (a, b) in tiling_edges(tiling, spec.depth) {
        polyline(&mut svg, &segment_points(a, b), "#777777", 0.6);
    }
    let _ = writeln!(svg, "</g>");
    dot(&mut svg, gd.a0_disk(), 3.0, "#c0392b");
    dot(&mut svg, gd.b0_disk(), 3.0, "#2471a3");
    dot(&mut svg, gd.c0_disk(), 3.0, "#1e8449");

    let palette = ["#d35400", "#8e44ad", "#16a085", "#c0392b", "#2c3e50", "#b7950b"];
    for (i, ov) in spec.overlays.iter().enumerate() {
        let color = palette[i % palette.len()];
        let _ = writeln!(svg, r#"<g id="overlay-{i}">"#);
        match ov {
            Overlay::Word(w) => {
                let m = matrix_of_word(w, gd);
                let axis = Geodesic::axis(&m).map_err(|_| RenderError::NotHyperbolic(w.to_string()))?;
                polyline(&mut svg, &geodesic_points(&axis), color, 2.0);
                let sy: Vec<_> = (0..3).flat_map(|_| w.syllables.iter().copied()).collect();
                let path = FramePath::of_word(&sy, tiling);
                let fwd: Vec<Complex64> = (0..path.frames.len()).map(|k| path.tail_position(k, tiling)).collect();
                let back = m.inverse();
                let n = w.syllables.len();
                let mut pts: Vec<Complex64> = fwd[..n].iter().map(|&z| back.act_disk(z)).collect();
                pts.extend(fwd);
                for pair in pts.windows(2) {
                    polyline(&mut svg, &segment_points(pair[0], pair[1]), color, 1.2);
                }
            }
            Overlay::Geodesic(a, b) => {
                let g = Geodesic::new(BoundaryPoint::new(*a), BoundaryPoint::new(*b)).map_err(|_| RenderError::Degenerate)?;
                polyline(&mut svg, &geodesic_points(&g), color, 2.0);
            }
            Overlay::Path(angle) => {
                let target = BoundaryPoint::new(*angle);
                let vp = tiling.follow_path(Vertex::base(VType::A), target, false, 40);
                let pts: Vec<Complex64> = vp.vertices.iter().map(|v| v.position_disk(gd)).collect();
                for pair in pts.windows(2) {
                    polyline(&mut svg, &segment_points(pair[0], pair[1]), color, 1.8);
                }
                dot(&mut svg, target.to_disk(), 4.0, color);
            }
            Overlay::Intervals => {
                for (j, e) in tiling.neighbors(&Vertex::base(VType::A)).iter().enumerate() {
                    let c = palette[j % palette.len()];
                    let reg = tiling.spectacle_interval(e, false);
                    boundary_arc(&mut svg, reg.left.angle, reg.right.angle, 1.015, c);
                    let dual = tiling.spectacle_interval(e, true);
                    boundary_arc(&mut svg, dual.left.angle, dual.right.angle, 1.035, c);
                }
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
