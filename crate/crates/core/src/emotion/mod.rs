//! Valence/arousal scoring, intensity and circumplex quadrants.

mod external;
mod lexicon;

pub use external::{
    score_segments_external, ExternalScorer, ScorerError, PROTOCOL_NAME, PROTOCOL_VERSION,
};
pub use lexicon::{load_lexicon, load_lexicon_str, score_segment_lexicon, score_text_lexicon, LexiconError, VadLexicon};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("{name} = {value} is outside [-1, 1]")]
    OutOfRange { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrant {
    Excitement,
    Anger,
    Sadness,
    Relaxation,
    Neutral,
}

impl Quadrant {
    /// The four stroke-bearing quadrants, in database order.
    pub const EMOTIONS: [Quadrant; 4] = [
        Quadrant::Excitement,
        Quadrant::Anger,
        Quadrant::Sadness,
        Quadrant::Relaxation,
    ];

    /// Position in [`Quadrant::EMOTIONS`]; `None` for neutral.
    pub fn ordinal(self) -> Option<usize> {
        Self::EMOTIONS.iter().position(|&q| q == self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Excitement => "excitement",
            Quadrant::Anger => "anger",
            Quadrant::Sadness => "sadness",
            Quadrant::Relaxation => "relaxation",
            Quadrant::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quadrant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "excitement" => Ok(Quadrant::Excitement),
            "anger" => Ok(Quadrant::Anger),
            "sadness" => Ok(Quadrant::Sadness),
            "relaxation" => Ok(Quadrant::Relaxation),
            "neutral" => Ok(Quadrant::Neutral),
            other => Err(format!("unknown quadrant {other:?}")),
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), DomainError> {
    if (-1.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(DomainError::OutOfRange { name, value })
    }
}

/// Euclidean distance of `(valence, arousal)` from the origin.
pub fn intensity(valence: f64, arousal: f64) -> Result<f64, DomainError> {
    check_unit("valence", valence)?;
    check_unit("arousal", arousal)?;
    Ok(valence.hypot(arousal))
}

/// The origin is neutral; zero on either axis counts as positive.
pub fn classify_quadrant(valence: f64, arousal: f64) -> Result<Quadrant, DomainError> {
    check_unit("valence", valence)?;
    check_unit("arousal", arousal)?;
    Ok(match (valence, arousal) {
        (v, a) if v == 0.0 && a == 0.0 => Quadrant::Neutral,
        (v, a) if v >= 0.0 && a >= 0.0 => Quadrant::Excitement,
        (_, a) if a >= 0.0 => Quadrant::Anger,
        (v, _) if v < 0.0 => Quadrant::Sadness,
        _ => Quadrant::Relaxation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionScore {
    pub valence: f64,
    pub arousal: f64,
    /// In `[0, √2]`.
    pub intensity: f64,
    /// `intensity / √2`, in `[0, 1]`.
    pub normalized_intensity: f64,
    pub quadrant: Quadrant,
}

impl EmotionScore {
    pub fn new(valence: f64, arousal: f64) -> Result<Self, DomainError> {
        let intensity = intensity(valence, arousal)?;
        Ok(EmotionScore {
            valence,
            arousal,
            intensity,
            normalized_intensity: (intensity / std::f64::consts::SQRT_2).min(1.0),
            quadrant: classify_quadrant(valence, arousal)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn intensity_examples() {
        assert!((intensity(0.6, 0.8).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(intensity(0.0, 0.0).unwrap(), 0.0);
        assert!((intensity(-1.0, -1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(intensity(1.2, 0.0).is_err());
        assert!(intensity(0.0, f64::NAN).is_err());
    }

    #[test]
    fn quadrant_labels() {
        assert_eq!(classify_quadrant(0.5, 0.5), Ok(Quadrant::Excitement));
        assert_eq!(classify_quadrant(-0.5, 0.5), Ok(Quadrant::Anger));
        assert_eq!(classify_quadrant(-0.5, -0.5), Ok(Quadrant::Sadness));
        assert_eq!(classify_quadrant(0.5, -0.5), Ok(Quadrant::Relaxation));
        assert_eq!(classify_quadrant(0.0, 0.0), Ok(Quadrant::Neutral));
        assert_eq!(classify_quadrant(0.1, 0.2), classify_quadrant(0.5, 1.0));
    }

    #[test]
    fn zero_axis_goes_positive() {
        assert_eq!(classify_quadrant(0.0, 0.3), Ok(Quadrant::Excitement));
        assert_eq!(classify_quadrant(0.3, 0.0), Ok(Quadrant::Excitement));
        assert_eq!(classify_quadrant(-0.3, 0.0), Ok(Quadrant::Anger));
        assert_eq!(classify_quadrant(0.0, -0.3), Ok(Quadrant::Relaxation));
        assert_eq!(classify_quadrant(-0.0, -0.0), Ok(Quadrant::Neutral));
        assert!(classify_quadrant(-1.5, 0.0).is_err());
    }

    #[test]
    fn score_fields() {
        let s = EmotionScore::new(-1.0, 1.0).unwrap();
        assert_eq!(s.quadrant, Quadrant::Anger);
        assert!((s.normalized_intensity - 1.0).abs() < 1e-15);
        let z = EmotionScore::new(0.0, 0.0).unwrap();
        assert_eq!(z.quadrant, Quadrant::Neutral);
        assert_eq!(z.normalized_intensity, 0.0);
    }

    #[test]
    fn quadrant_names_round_trip() {
        for q in Quadrant::EMOTIONS.into_iter().chain([Quadrant::Neutral]) {
            assert_eq!(q.as_str().parse::<Quadrant>(), Ok(q));
        }
        assert_eq!(Quadrant::Sadness.ordinal(), Some(2));
        assert_eq!(Quadrant::Neutral.ordinal(), None);
    }

    proptest! {
        #[test]
        fn intensity_symmetries(v in -1.0..=1.0f64, a in -1.0..=1.0f64) {
            let i = intensity(v, a).unwrap();
            prop_assert!((i - (v * v + a * a).sqrt()).abs() < 1e-12);
            prop_assert_eq!(i, intensity(a, v).unwrap());
            prop_assert_eq!(i, intensity(-v, a).unwrap());
            prop_assert!(i <= std::f64::consts::SQRT_2 + 1e-15);
        }

        #[test]
        fn intensity_monotone(v in 0.0..=1.0f64, dv in 0.0..=1.0f64, a in -1.0..=1.0f64) {
            let v2 = (v + dv).min(1.0);
            prop_assert!(intensity(v, a).unwrap() <= intensity(v2, a).unwrap());
            prop_assert!(intensity(-v, a).unwrap() <= intensity(-v2, a).unwrap());
            prop_assert!(intensity(a, v).unwrap() <= intensity(a, v2).unwrap());
        }

        #[test]
        fn quadrant_scaling(v in -1.0..=1.0f64, a in -1.0..=1.0f64, t in 0.0001..=1.0f64) {
            prop_assume!(v != 0.0 || a != 0.0);
            let c = t / v.abs().max(a.abs());
            prop_assert_eq!(
                classify_quadrant((c * v).clamp(-1.0, 1.0), (c * a).clamp(-1.0, 1.0)).unwrap(),
                classify_quadrant(v, a).unwrap()
            );
        }
    }
}
