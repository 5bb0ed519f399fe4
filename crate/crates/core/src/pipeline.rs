//! End-to-end run: poem text in, SVG composition and JSON report out.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::compose::{compose_svg, Annotation, Composition, MatchedStroke};
use crate::conllu::parse_conllu;
use crate::emotion::{
    load_lexicon, score_segment_lexicon, score_segments_external, EmotionScore, Quadrant,
    ScorerError, VadLexicon,
};
use crate::extract::{number_segments, pool_segments, whole_sentence_segments, SemanticSegment};
use crate::rank::{
    build_graph, select_top, textrank_scores, ConvergenceReport, RankError, RankedPool,
    DEFAULT_DAMPING, DEFAULT_KEEP_RATIO, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use crate::stroke::ContourPolygon;
use crate::strokedb::{
    load_database, load_outline, match_stroke, synthesize_database, StrokeIndex,
    DEFAULT_DB_SEED, DEFAULT_PER_QUADRANT, INDEX_VERSION,
};
use crate::text::segment_sentences;

pub const REPORT_VERSION: u32 = 1;
pub const DEFAULT_SCORER_TIMEOUT_S: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Lexicon,
    External,
}

impl FromStr for ScorerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lexicon" => Ok(ScorerKind::Lexicon),
            "external" => Ok(ScorerKind::External),
            other => Err(format!("unknown scorer {other:?} (expected lexicon or external)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub conllu_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
    pub scorer: ScorerKind,
    pub scorer_cmd: Option<String>,
    pub scorer_timeout_s: f64,
    pub keep_ratio: f64,
    pub damping: f64,
    /// Without a database directory, one is synthesized in memory from `seed`.
    pub db_dir: Option<PathBuf>,
    pub out_path: PathBuf,
    /// Defaults to `out_path` with a `.json` extension.
    pub report_path: Option<PathBuf>,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(input_path: impl Into<PathBuf>, out_path: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input_path: input_path.into(),
            conllu_path: None,
            lexicon_path: None,
            scorer: ScorerKind::Lexicon,
            scorer_cmd: None,
            scorer_timeout_s: DEFAULT_SCORER_TIMEOUT_S,
            keep_ratio: DEFAULT_KEEP_RATIO,
            damping: DEFAULT_DAMPING,
            db_dir: None,
            out_path: out_path.into(),
            report_path: None,
            seed: DEFAULT_DB_SEED,
        }
    }

    pub fn report_path(&self) -> PathBuf {
        self.report_path
            .clone()
            .unwrap_or_else(|| self.out_path.with_extension("json"))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let config = |m: String| Err(PipelineError::Config(m));
        match self.scorer {
            ScorerKind::Lexicon if self.lexicon_path.is_none() => {
                return config("--scorer lexicon requires --lexicon".to_string())
            }
            ScorerKind::External if self.scorer_cmd.is_none() => {
                return config("--scorer external requires --scorer-cmd".to_string())
            }
            _ => {}
        }
        if !(self.keep_ratio > 0.0 && self.keep_ratio <= 1.0) {
            return config(format!("keep ratio {} is outside (0, 1]", self.keep_ratio));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return config(format!("damping {} is outside (0, 1)", self.damping));
        }
        if !(self.scorer_timeout_s > 0.0 && self.scorer_timeout_s.is_finite()) {
            return config(format!("scorer timeout {} must be positive", self.scorer_timeout_s));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error("no semantic segments found in the input")]
    EmptyPool,
    #[error("could not write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    /// 2 for bad input or configuration, 3 for scorer failures, 4 for an
    /// empty segment pool, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Input { .. } => 2,
            PipelineError::Scorer(_) => 3,
            PipelineError::EmptyPool => 4,
            PipelineError::Output { .. } | PipelineError::Internal(_) => 1,
        }
    }
}

fn input_err(path: &Path, message: impl ToString) -> PipelineError {
    PipelineError::Input {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledSegmentReport {
    pub segment_id: usize,
    pub sentence_id: usize,
    pub text: String,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedSegmentReport {
    pub segment_id: usize,
    pub sentence_id: usize,
    pub kind: &'static str,
    pub text: String,
    pub token_ids: Vec<usize>,
    /// 1 for the most important segment.
    pub rank: usize,
    pub importance: f64,
    pub valence: f64,
    pub arousal: f64,
    pub intensity: f64,
    pub normalized_intensity: f64,
    pub quadrant: Quadrant,
    pub stroke_id: Option<usize>,
    pub stroke_normalized_complexity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub title: String,
    pub sentence_count: usize,
    pub pool_size: usize,
    pub selected_count: usize,
    pub non_neutral_count: usize,
    pub keep_ratio: f64,
    pub damping: f64,
    pub scorer: ScorerKind,
    pub db_seed: String,
    pub textrank: ConvergenceReport,
    pub pool: Vec<PooledSegmentReport>,
    /// In document order.
    pub selected: Vec<SelectedSegmentReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("report serializes");
        json.push('\n');
        json
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub composition: Composition,
    pub svg: String,
    pub report: Report,
}

enum StrokeSource {
    Disk { dir: PathBuf, index: StrokeIndex },
    Memory { index: StrokeIndex, outlines: Vec<ContourPolygon> },
}

impl StrokeSource {
    fn open(config: &PipelineConfig) -> Result<Self, PipelineError> {
        match &config.db_dir {
            Some(dir) => {
                let index = load_database(dir).map_err(|e| input_err(dir, e))?;
                Ok(StrokeSource::Disk {
                    dir: dir.clone(),
                    index,
                })
            }
            None => {
                let entries = synthesize_database(DEFAULT_PER_QUADRANT, config.seed)
                    .map_err(|e| PipelineError::Internal(e.to_string()))?;
                let (records, outlines) = entries.into_iter().map(|e| (e.record, e.outline)).unzip();
                Ok(StrokeSource::Memory {
                    index: StrokeIndex {
                        version: INDEX_VERSION,
                        db_seed: config.seed,
                        records,
                    },
                    outlines,
                })
            }
        }
    }

    fn index(&self) -> &StrokeIndex {
        match self {
            StrokeSource::Disk { index, .. } | StrokeSource::Memory { index, .. } => index,
        }
    }

    fn matched(&self, quadrant: Quadrant, intensity: f64) -> Result<MatchedStroke, PipelineError> {
        let record = match_stroke(self.index(), quadrant, intensity)
            .map_err(|e| PipelineError::Internal(e.to_string()))?
            .clone();
        let outline = match self {
            StrokeSource::Disk { dir, .. } => {
                load_outline(dir, &record).map_err(|e| input_err(dir, e))?
            }
            StrokeSource::Memory { outlines, .. } => outlines[record.id].clone(),
        };
        Ok(MatchedStroke { record, outline })
    }
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

/// Runs every stage and returns the results without writing anything.
pub fn analyze(config: &PipelineConfig) -> Result<Analysis, PipelineError> {
    config.validate()?;
    let raw = read_text(&config.input_path)?;

    let lexicon: Option<VadLexicon> = match config.scorer {
        ScorerKind::Lexicon => {
            let path = config.lexicon_path.as_ref().expect("validated");
            let file = fs::File::open(path).map_err(|e| input_err(path, e))?;
            Some(load_lexicon(BufReader::new(file)).map_err(|e| input_err(path, e))?)
        }
        ScorerKind::External => None,
    };
    let strokes = StrokeSource::open(config)?;

    let doc = segment_sentences(&raw);
    let pool: Vec<SemanticSegment> = match &config.conllu_path {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| input_err(path, e))?;
            let parses = parse_conllu(BufReader::new(file)).map_err(|e| input_err(path, e))?;
            if parses.len() != doc.len() {
                return Err(input_err(
                    path,
                    format!(
                        "{} parsed sentences but the poem has {} sentence units",
                        parses.len(),
                        doc.len()
                    ),
                ));
            }
            pool_segments(&parses)
        }
        None => {
            let mut segs = whole_sentence_segments(&doc);
            number_segments(&mut segs);
            segs
        }
    };
    if pool.is_empty() {
        return Err(PipelineError::EmptyPool);
    }

    let graph = build_graph(&pool).map_err(|e| match e {
        RankError::EmptyPool => PipelineError::EmptyPool,
        other => PipelineError::Internal(other.to_string()),
    })?;
    let ranking = textrank_scores(&graph, config.damping, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let ranked = RankedPool::new(pool.clone(), &ranking.scores);
    let mut selected: Vec<(usize, SemanticSegment, f64)> = select_top(&ranked, config.keep_ratio)
        .map_err(|e| PipelineError::Config(e.to_string()))?
        .into_iter()
        .enumerate()
        .map(|(k, (seg, score))| (k + 1, seg, score))
        .collect();
    selected.sort_by_key(|(_, seg, _)| (seg.position(), seg.id));

    let segments: Vec<SemanticSegment> = selected.iter().map(|(_, s, _)| s.clone()).collect();
    let raw_scores: Vec<(f64, f64)> = match &lexicon {
        Some(lex) => segments.iter().map(|s| score_segment_lexicon(s, lex)).collect(),
        None => score_segments_external(
            &segments,
            config.scorer_cmd.as_deref().expect("validated"),
            config.scorer_timeout_s,
        )?,
    };

    let mut annotations = Vec::with_capacity(segments.len());
    let mut selected_report = Vec::with_capacity(segments.len());
    for ((rank, segment, importance), (v, a)) in selected.into_iter().zip(raw_scores) {
        let score = EmotionScore::new(v, a).map_err(|e| PipelineError::Internal(e.to_string()))?;
        let stroke = match score.quadrant {
            Quadrant::Neutral => None,
            q => Some(strokes.matched(q, score.normalized_intensity)?),
        };
        selected_report.push(SelectedSegmentReport {
            segment_id: segment.id,
            sentence_id: segment.sentence_id,
            kind: segment.kind.as_str(),
            text: segment.text.clone(),
            token_ids: segment.token_ids.clone(),
            rank,
            importance,
            valence: score.valence,
            arousal: score.arousal,
            intensity: score.intensity,
            normalized_intensity: score.normalized_intensity,
            quadrant: score.quadrant,
            stroke_id: stroke.as_ref().map(|s| s.record.id),
            stroke_normalized_complexity: stroke.as_ref().map(|s| s.record.normalized_complexity),
        });
        annotations.push(Annotation {
            segment,
            score,
            stroke,
        });
    }

    let composition =
        Composition::new(doc, annotations).map_err(|e| PipelineError::Internal(e.to_string()))?;
    let svg = compose_svg(&composition);
    let report = Report {
        version: REPORT_VERSION,
        title: composition.poem.title().to_string(),
        sentence_count: composition.poem.len(),
        pool_size: pool.len(),
        selected_count: selected_report.len(),
        non_neutral_count: selected_report
            .iter()
            .filter(|s| s.quadrant != Quadrant::Neutral)
            .count(),
        keep_ratio: config.keep_ratio,
        damping: config.damping,
        scorer: config.scorer,
        db_seed: strokes.index().db_seed.to_string(),
        textrank: ranking.report,
        pool: pool
            .iter()
            .zip(&ranking.scores)
            .map(|(s, &importance)| PooledSegmentReport {
                segment_id: s.id,
                sentence_id: s.sentence_id,
                text: s.text.clone(),
                importance,
            })
            .collect(),
        selected: selected_report,
    };
    Ok(Analysis {
        composition,
        svg,
        report,
    })
}

/// Runs the pipeline and writes the SVG and the report. Nothing is written
/// unless every stage succeeds.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Report, PipelineError> {
    let analysis = analyze(config)?;
    let write = |path: &Path, contents: &str| {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|source| PipelineError::Output {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(path, contents).map_err(|source| PipelineError::Output {
            path: path.to_path_buf(),
            source,
        })
    };
    write(&config.out_path, &analysis.svg)?;
    write(&config.report_path(), &analysis.report.to_json())?;
    Ok(analysis.report)
}
