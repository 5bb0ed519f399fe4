//! SVG layout pairing each selected segment with its matched stroke.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{EmotionScore, Quadrant};
use crate::extract::SemanticSegment;
use crate::stroke::ContourPolygon;
use crate::strokedb::StrokeRecord;
use crate::text::Document;

pub const CANVAS_WIDTH: f64 = 1600.0;
pub const HEADER_HEIGHT: f64 = 120.0;
pub const ROW_HEIGHT: f64 = 240.0;
pub const CELL_SIZE: f64 = 220.0;
/// Gap between the stroke outline and its cell border.
pub const CELL_PADDING: f64 = 10.0;
const CELL_X: f64 = CANVAS_WIDTH - 40.0 - CELL_SIZE;
const CELL_TOP_OFFSET: f64 = (ROW_HEIGHT - CELL_SIZE) / 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum ComposeError {
    #[error("annotation for segment {segment} {problem}")]
    Invalid { segment: usize, problem: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedStroke {
    pub record: StrokeRecord,
    pub outline: ContourPolygon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub segment: SemanticSegment,
    pub score: EmotionScore,
    /// Present exactly when the quadrant is not neutral.
    pub stroke: Option<MatchedStroke>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub poem: Document,
    pub annotations: Vec<Annotation>,
    pub canvas: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

impl Composition {
    pub fn new(poem: Document, annotations: Vec<Annotation>) -> Result<Self, ComposeError> {
        let canvas = (
            CANVAS_WIDTH,
            HEADER_HEIGHT + ROW_HEIGHT * annotations.len() as f64,
        );
        let composition = Composition {
            poem,
            annotations,
            canvas,
        };
        composition.validate()?;
        Ok(composition)
    }

    pub fn validate(&self) -> Result<(), ComposeError> {
        for a in &self.annotations {
            let invalid = |problem: String| ComposeError::Invalid {
                segment: a.segment.id,
                problem,
            };
            if a.segment.sentence_id >= self.poem.len() {
                return Err(invalid(format!(
                    "refers to sentence {} of a {}-sentence poem",
                    a.segment.sentence_id,
                    self.poem.len()
                )));
            }
            let neutral = a.score.quadrant == Quadrant::Neutral;
            if neutral == a.stroke.is_some() {
                return Err(invalid(format!(
                    "is {} but {} a stroke",
                    a.score.quadrant,
                    if neutral { "has" } else { "lacks" }
                )));
            }
        }
        Ok(())
    }

    /// Annotations in document order.
    pub fn ordered(&self) -> Vec<&Annotation> {
        let mut rows: Vec<&Annotation> = self.annotations.iter().collect();
        rows.sort_by_key(|a| (a.segment.position(), a.segment.id));
        rows
    }
}

/// Stroke cell of the `row`-th annotation row.
pub fn stroke_cell(row: usize) -> Cell {
    Cell {
        x: CELL_X,
        y: HEADER_HEIGHT + ROW_HEIGHT * row as f64 + CELL_TOP_OFFSET,
        size: CELL_SIZE,
    }
}

/// `0.35 + 0.65 · normalized_intensity`.
pub fn stroke_opacity(normalized_intensity: f64) -> f64 {
    0.35 + 0.65 * normalized_intensity.clamp(0.0, 1.0)
}

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

/// Uniformly scales the outline into the cell, centred, inside the padding.
fn fit_outline(outline: &ContourPolygon, cell: Cell) -> String {
    let (x0, y0, x1, y1) = outline.bounds();
    let extent = (x1 - x0).max(y1 - y0);
    let inner = cell.size - 2.0 * CELL_PADDING;
    let scale = if extent > 0.0 { inner / extent } else { 1.0 };
    let off_x = cell.x + (cell.size - (x1 - x0) * scale) / 2.0;
    let off_y = cell.y + (cell.size - (y1 - y0) * scale) / 2.0;
    let mut d = String::new();
    for (k, &(x, y)) in outline.vertices.iter().enumerate() {
        let cmd = if k == 0 { "M" } else { " L" };
        let px = off_x + (x - x0) * scale;
        let py = off_y + (y - y0) * scale;
        let _ = write!(d, "{cmd}{px:.3},{py:.3}");
    }
    d.push_str(" Z");
    d
}

/// Renders the composition. Same input, same bytes.
pub fn compose_svg(composition: &Composition) -> String {
    let (width, height) = composition.canvas;
    let mut svg = String::new();
    let _ = writeln!(svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" \
         height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(svg, "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>");

    let lines = composition.poem.len();
    let _ = writeln!(
        svg,
        "<g class=\"header\"><text x=\"40\" y=\"64\" font-family=\"serif\" font-size=\"36\" \
         fill=\"#000000\">{}</text><text x=\"40\" y=\"100\" font-family=\"serif\" font-size=\"20\" \
         fill=\"#555555\">{lines} line{}</text></g>",
        escape_xml(composition.poem.title()),
        if lines == 1 { "" } else { "s" }
    );

    for (row, a) in composition.ordered().into_iter().enumerate() {
        let top = HEADER_HEIGHT + ROW_HEIGHT * row as f64;
        let _ = writeln!(
            svg,
            "<g class=\"row\" data-segment=\"{}\" data-quadrant=\"{}\">",
            a.segment.id, a.score.quadrant
        );
        let _ = writeln!(
            svg,
            "<text x=\"40\" y=\"{:.0}\" font-family=\"serif\" font-size=\"28\" fill=\"#000000\">{}</text>",
            top + 112.0,
            escape_xml(&a.segment.text)
        );
        let _ = writeln!(
            svg,
            "<text x=\"40\" y=\"{:.0}\" font-family=\"serif\" font-size=\"18\" fill=\"#555555\">{} \
             (valence {:.3}, arousal {:.3}, intensity {:.3})</text>",
            top + 148.0,
            a.score.quadrant,
            a.score.valence,
            a.score.arousal,
            a.score.intensity
        );
        if let Some(stroke) = &a.stroke {
            let cell = stroke_cell(row);
            let _ = writeln!(
                svg,
                "<path d=\"{}\" fill=\"#000000\" opacity=\"{:.3}\" data-stroke=\"{}\"/>",
                fit_outline(&stroke.outline, cell),
                stroke_opacity(a.score.normalized_intensity),
                stroke.record.id
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    svg
}
