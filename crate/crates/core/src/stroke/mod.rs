//! Procedural calligraphic strokes.
//!
//! Each emotion quadrant has a base parameter set encoding its brush
//! character: excitement is fast and light, anger fast, heavy and jagged,
//! sadness slow, heavy and trembling, relaxation slow, light and steady.
//! Intensity scales width, tremor and turning. All randomness comes from a
//! single SplitMix64 stream, drawn per point in the order
//! turn, tremor x, tremor y, width.

mod gan;
mod geometry;

pub use gan::{gan_objective, GanError, LOG_CLAMP};
pub use geometry::{
    parse_svg_path_data, polygon_area, polygon_complexity, polygon_perimeter, ribbon_polygon,
    ContourPolygon, GeometryError,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::Quadrant;
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum StrokeError {
    #[error("neutral segments carry no stroke")]
    NeutralQuadrant,
    #[error("normalized intensity {0} is outside [0, 1]")]
    IntensityOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TurnRule {
    /// Gaussian turn angle with this standard deviation.
    Smooth { sigma_deg: f64 },
    /// Turn magnitude uniform in `[min_deg, max_deg]`, sign alternating per step.
    Sharp { min_deg: f64, max_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeParams {
    pub point_count: usize,
    pub step_length: f64,
    pub turn: TurnRule,
    pub base_width: f64,
    pub tremor_amp: f64,
}

impl StrokeParams {
    /// Unscaled parameters for a quadrant; `None` for neutral.
    pub fn base(quadrant: Quadrant) -> Option<Self> {
        let (point_count, step_length, turn, base_width, tremor_amp) = match quadrant {
            Quadrant::Excitement => (24, 28.0, TurnRule::Smooth { sigma_deg: 20.0 }, 4.0, 0.5),
            Quadrant::Anger => (
                20,
                30.0,
                TurnRule::Sharp {
                    min_deg: 90.0,
                    max_deg: 150.0,
                },
                10.0,
                1.0,
            ),
            Quadrant::Sadness => (30, 10.0, TurnRule::Smooth { sigma_deg: 12.0 }, 9.0, 3.5),
            Quadrant::Relaxation => (16, 14.0, TurnRule::Smooth { sigma_deg: 6.0 }, 3.5, 0.5),
            Quadrant::Neutral => return None,
        };
        Some(StrokeParams {
            point_count,
            step_length,
            turn,
            base_width,
            tremor_amp,
        })
    }

    /// Parameters with intensity applied: width ×(0.6 + 0.8·I),
    /// tremor ×(0.5 + I), turn magnitude ×(0.7 + 0.6·I).
    pub fn for_intensity(quadrant: Quadrant, normalized_intensity: f64) -> Result<Self, StrokeError> {
        if !(0.0..=1.0).contains(&normalized_intensity) {
            return Err(StrokeError::IntensityOutOfRange(normalized_intensity));
        }
        let base = Self::base(quadrant).ok_or(StrokeError::NeutralQuadrant)?;
        let i = normalized_intensity;
        let turn_scale = 0.7 + 0.6 * i;
        Ok(StrokeParams {
            base_width: base.base_width * (0.6 + 0.8 * i),
            tremor_amp: base.tremor_amp * (0.5 + i),
            turn: match base.turn {
                TurnRule::Smooth { sigma_deg } => TurnRule::Smooth {
                    sigma_deg: sigma_deg * turn_scale,
                },
                TurnRule::Sharp { min_deg, max_deg } => TurnRule::Sharp {
                    min_deg: min_deg * turn_scale,
                    max_deg: max_deg * turn_scale,
                },
            },
            ..base
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokePoint {
    pub x: f64,
    pub y: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokePath {
    pub points: Vec<StrokePoint>,
    pub quadrant: Quadrant,
    pub intensity_used: f64,
    pub seed: u64,
}

impl StrokePath {
    pub fn mean_width(&self) -> f64 {
        self.points.iter().map(|p| p.width).sum::<f64>() / self.points.len() as f64
    }
}

/// Synthesizes a stroke; a pure function of its arguments.
///
/// The pen starts at the origin heading along +x. At every point it draws a
/// turn angle, records the point with its tremor offset and width, then turns
/// and advances one step. The turn drawn at the last point is unused.
pub fn synthesize_stroke(
    quadrant: Quadrant,
    normalized_intensity: f64,
    seed: u64,
) -> Result<StrokePath, StrokeError> {
    let params = StrokeParams::for_intensity(quadrant, normalized_intensity)?;
    let mut rng = SplitMix64::new(seed);
    let (mut x, mut y, mut heading) = (0.0f64, 0.0f64, 0.0f64);
    let mut points = Vec::with_capacity(params.point_count);

    for k in 0..params.point_count {
        let turn_deg = match params.turn {
            TurnRule::Smooth { sigma_deg } => sigma_deg * rng.next_gaussian(),
            TurnRule::Sharp { min_deg, max_deg } => {
                let magnitude = min_deg + (max_deg - min_deg) * rng.next_f64();
                if k % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            }
        };
        let tremor_x = params.tremor_amp * (2.0 * rng.next_f64() - 1.0);
        let tremor_y = params.tremor_amp * (2.0 * rng.next_f64() - 1.0);
        let width = params.base_width * (0.85 + 0.3 * rng.next_f64());

        points.push(StrokePoint {
            x: x + tremor_x,
            y: y + tremor_y,
            width,
        });

        heading += turn_deg.to_radians();
        x += params.step_length * heading.cos();
        y += params.step_length * heading.sin();
    }

    Ok(StrokePath {
        points,
        quadrant,
        intensity_used: normalized_intensity,
        seed,
    })
}
