//! Turns a poem into an emotion-annotated calligraphic composition.
//!
//! The pipeline splits the poem into sentence units ([`text`]), extracts noun
//! and verb phrases from dependency parses ([`conllu`], [`extract`]), ranks
//! them with TextRank and keeps the most important ones ([`rank`]), scores
//! valence and arousal ([`emotion`]), and pairs each scored segment with a
//! procedurally synthesized brush stroke whose contour complexity tracks the
//! emotion's intensity ([`stroke`], [`strokedb`]). [`compose`] renders the
//! result as SVG and [`pipeline`] wires the stages together.

pub mod compose;
pub mod conllu;
pub mod emotion;
pub mod extract;
pub mod pipeline;
pub mod rank;
pub mod rng;
pub mod stroke;
pub mod strokedb;
pub mod text;

pub use compose::{compose_svg, Annotation, Composition, MatchedStroke};
pub use conllu::{parse_conllu, parse_conllu_str, ConlluError, DepSentence, DepToken};
pub use emotion::{classify_quadrant, intensity, EmotionScore, Quadrant, VadLexicon};
pub use extract::{extract_segments, SegmentKind, SemanticSegment};
pub use pipeline::{analyze, run_pipeline, PipelineConfig, PipelineError, Report, ScorerKind};
pub use rank::{build_graph, embed_segment, select_top, textrank_scores, RankedPool, SegmentGraph};
pub use stroke::{
    gan_objective, polygon_complexity, ribbon_polygon, synthesize_stroke, ContourPolygon,
    StrokeParams, StrokePath,
};
pub use strokedb::{build_database, load_database, match_stroke, StrokeIndex, StrokeRecord};
pub use text::{segment_sentences, Document, Sentence};
