use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::StrokePath;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("stroke path is degenerate: {0}")]
    DegeneratePath(String),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon area {0:e} is too small")]
    ZeroArea(f64),
    #[error("bad SVG path data: {0}")]
    PathData(String),
}

/// Closed polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPolygon {
    pub vertices: Vec<(f64, f64)>,
}

impl ContourPolygon {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        Ok(ContourPolygon { vertices })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ContourPolygon {
            vertices: self.vertices.iter().map(|&(x, y)| (x * factor, y * factor)).collect(),
        }
    }

    /// `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
        )
    }

    /// `M x,y L x,y ... Z` with `decimals` digits after the point.
    pub fn to_svg_path_data(&self, decimals: usize) -> String {
        let mut d = String::new();
        for (k, (x, y)) in self.vertices.iter().enumerate() {
            let cmd = if k == 0 { "M" } else { " L" };
            let _ = write!(d, "{cmd}{x:.decimals$},{y:.decimals$}");
        }
        d.push_str(" Z");
        d
    }
}

/// Reads path data written by [`ContourPolygon::to_svg_path_data`].
pub fn parse_svg_path_data(d: &str) -> Result<ContourPolygon, GeometryError> {
    let mut vertices = Vec::new();
    for part in d.split_whitespace() {
        if part == "Z" || part == "z" {
            break;
        }
        let coords = part
            .strip_prefix('M')
            .or_else(|| part.strip_prefix('L'))
            .ok_or_else(|| GeometryError::PathData(format!("unexpected token {part:?}")))?;
        let (x, y) = coords
            .split_once(',')
            .ok_or_else(|| GeometryError::PathData(format!("expected x,y in {part:?}")))?;
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| GeometryError::PathData(format!("bad number {s:?}")))
        };
        vertices.push((num(x)?, num(y)?));
    }
    ContourPolygon::new(vertices)
}

/// Outline of a variable-width stroke with flat end caps.
///
/// Each point is pushed by half its width to either side along the normal of
/// the local tangent (central difference inside, one-sided at the ends). The
/// polygon is the left side in order followed by the right side reversed, so
/// an `n`-point path gives `2n` vertices.
pub fn ribbon_polygon(path: &StrokePath) -> Result<ContourPolygon, GeometryError> {
    let pts = &path.points;
    let n = pts.len();
    if n < 2 {
        return Err(GeometryError::DegeneratePath(format!("{n} point(s)")));
    }
    let length: f64 = pts
        .windows(2)
        .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
        .sum();
    if length <= 0.0 {
        return Err(GeometryError::DegeneratePath("zero length".to_string()));
    }

    let unit = |dx: f64, dy: f64| {
        let len = dx.hypot(dy);
        (len > 1e-12).then(|| (dx / len, dy / len))
    };
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut last_tangent = (1.0, 0.0);
    for i in 0..n {
        let prev = &pts[i.saturating_sub(1)];
        let next = &pts[(i + 1).min(n - 1)];
        // A hairpin can cancel the central difference; fall back to the
        // one-sided ones, then to the previous tangent.
        let tangent = unit(next.x - prev.x, next.y - prev.y)
            .or_else(|| unit(next.x - pts[i].x, next.y - pts[i].y))
            .or_else(|| unit(pts[i].x - prev.x, pts[i].y - prev.y))
            .unwrap_or(last_tangent);
        last_tangent = tangent;
        let (nx, ny) = (-tangent.1, tangent.0);
        let half = pts[i].width / 2.0;
        left.push((pts[i].x + nx * half, pts[i].y + ny * half));
        right.push((pts[i].x - nx * half, pts[i].y - ny * half));
    }
    right.reverse();
    left.extend(right);
    ContourPolygon::new(left)
}

pub fn polygon_perimeter(poly: &ContourPolygon) -> f64 {
    let v = &poly.vertices;
    (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            (b.0 - a.0).hypot(b.1 - a.1)
        })
        .sum()
}

/// Absolute shoelace area.
pub fn polygon_area(poly: &ContourPolygon) -> f64 {
    let v = &poly.vertices;
    let twice: f64 = (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs() / 2.0
}

/// Perimeter² / area. Scale-free; 4π for a circle and larger for anything else.
pub fn polygon_complexity(poly: &ContourPolygon) -> Result<f64, GeometryError> {
    let area = polygon_area(poly);
    if !(area >= 1e-12) {
        return Err(GeometryError::ZeroArea(area));
    }
    let perimeter = polygon_perimeter(poly);
    Ok(perimeter * perimeter / area)
}
