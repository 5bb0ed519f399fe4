//! Python bindings. Build the cdylib and import it as `poemotion`.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use poemotion::conllu::parse_conllu_str;
use poemotion::emotion::{self, Quadrant};
use poemotion::extract::{self, number_segments};
use poemotion::pipeline::{self, PipelineConfig, PipelineError, ScorerKind};
use poemotion::rank::{self, RankedPool};
use poemotion::stroke::{self, ContourPolygon};
use poemotion::strokedb;
use poemotion::text;

create_exception!(poemotion, PoemotionError, PyRuntimeError);

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pipeline_err(e: PipelineError) -> PyErr {
    match e {
        PipelineError::Config(_) | PipelineError::Input { .. } => value_err(e),
        other => PoemotionError::new_err(format!("{other} (exit code {})", other.exit_code())),
    }
}

fn parse_quadrant(name: &str) -> PyResult<Quadrant> {
    name.parse::<Quadrant>().map_err(value_err)
}

/// A noun or verb phrase extracted from a dependency parse.
#[pyclass(frozen, get_all, from_py_object, module = "poemotion")]
#[derive(Clone)]
struct Segment {
    id: usize,
    text: String,
    kind: String,
    sentence_id: usize,
    token_ids: Vec<usize>,
}

#[pymethods]
impl Segment {
    fn __repr__(&self) -> String {
        format!("Segment(id={}, kind={:?}, text={:?})", self.id, self.kind, self.text)
    }
}

impl From<&extract::SemanticSegment> for Segment {
    fn from(s: &extract::SemanticSegment) -> Self {
        Segment {
            id: s.id,
            text: s.text.clone(),
            kind: s.kind.as_str().to_string(),
            sentence_id: s.sentence_id,
            token_ids: s.token_ids.clone(),
        }
    }
}

/// A matched stroke from a database.
#[pyclass(frozen, get_all, skip_from_py_object, module = "poemotion")]
#[derive(Clone)]
struct StrokeRecord {
    id: usize,
    quadrant: String,
    seed: u64,
    complexity: f64,
    normalized_complexity: f64,
    asset_path: String,
}

impl From<&strokedb::StrokeRecord> for StrokeRecord {
    fn from(r: &strokedb::StrokeRecord) -> Self {
        StrokeRecord {
            id: r.id,
            quadrant: r.quadrant.as_str().to_string(),
            seed: r.seed,
            complexity: r.complexity,
            normalized_complexity: r.normalized_complexity,
            asset_path: r.asset_path.clone(),
        }
    }
}

/// A loaded stroke database.
#[pyclass(frozen, module = "poemotion")]
struct StrokeDatabase {
    index: strokedb::StrokeIndex,
}

#[pymethods]
impl StrokeDatabase {
    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        let index = strokedb::load_database(&dir).map_err(value_err)?;
        Ok(StrokeDatabase { index })
    }

    #[getter]
    fn db_seed(&self) -> u64 {
        self.index.db_seed
    }

    fn __len__(&self) -> usize {
        self.index.records.len()
    }

    fn records(&self) -> Vec<StrokeRecord> {
        self.index.records.iter().map(StrokeRecord::from).collect()
    }

    /// Nearest stroke in `quadrant` to the normalized intensity.
    fn match_stroke(&self, quadrant: &str, normalized_intensity: f64) -> PyResult<StrokeRecord> {
        let q = parse_quadrant(quadrant)?;
        strokedb::match_stroke(&self.index, q, normalized_intensity)
            .map(StrokeRecord::from)
            .map_err(value_err)
    }
}

#[pyfunction]
fn intensity(valence: f64, arousal: f64) -> PyResult<f64> {
    emotion::intensity(valence, arousal).map_err(value_err)
}

#[pyfunction]
fn classify_quadrant(valence: f64, arousal: f64) -> PyResult<String> {
    emotion::classify_quadrant(valence, arousal)
        .map(|q| q.as_str().to_string())
        .map_err(value_err)
}

/// Sentence units of a poem, in order.
#[pyfunction]
fn segment_sentences(poem: &str) -> Vec<String> {
    text::segment_sentences(poem)
        .sentences
        .into_iter()
        .map(|s| s.text)
        .collect()
}

/// Numbered noun and verb phrases from CoNLL-U text.
#[pyfunction]
fn extract_segments(conllu: &str) -> PyResult<Vec<Segment>> {
    let sentences = parse_conllu_str(conllu).map_err(value_err)?;
    let mut segments: Vec<_> = sentences
        .iter()
        .enumerate()
        .flat_map(|(i, s)| extract::extract_segments(s, i))
        .collect();
    number_segments(&mut segments);
    Ok(segments.iter().map(Segment::from).collect())
}

/// TextRank scores for a symmetric weight matrix.
#[pyfunction]
#[pyo3(signature = (weights, damping = 0.85, tol = 1e-8, max_iter = 200))]
fn textrank(weights: Vec<Vec<f64>>, damping: f64, tol: f64, max_iter: usize) -> PyResult<Vec<f64>> {
    if weights.iter().any(|row| row.len() != weights.len()) {
        return Err(value_err("weight matrix must be square"));
    }
    let graph = rank::SegmentGraph::from_weights(weights);
    rank::textrank_scores(&graph, damping, tol, max_iter)
        .map(|r| r.scores)
        .map_err(value_err)
}

/// Ranks segments by TextRank over their embeddings and keeps the top share.
#[pyfunction]
#[pyo3(signature = (segments, keep_ratio = 0.5, damping = 0.85))]
fn select_segments(segments: Vec<Segment>, keep_ratio: f64, damping: f64) -> PyResult<Vec<(Segment, f64)>> {
    let pool: Vec<extract::SemanticSegment> = segments
        .into_iter()
        .map(|s| {
            let kind = match s.kind.as_str() {
                "noun_phrase" => Ok(extract::SegmentKind::NounPhrase),
                "verb_phrase" => Ok(extract::SegmentKind::VerbPhrase),
                other => Err(value_err(format!("unknown segment kind {other:?}"))),
            }?;
            Ok(extract::SemanticSegment {
                id: s.id,
                text: s.text,
                kind,
                sentence_id: s.sentence_id,
                token_ids: s.token_ids,
            })
        })
        .collect::<PyResult<_>>()?;
    let graph = rank::build_graph(&pool).map_err(value_err)?;
    let scores = rank::textrank_scores(&graph, damping, 1e-8, 200).map_err(value_err)?;
    let kept = rank::select_top(&RankedPool::new(pool, &scores.scores), keep_ratio).map_err(value_err)?;
    Ok(kept.iter().map(|(s, w)| (Segment::from(s), *w)).collect())
}

/// Perimeter squared over area of a simple polygon.
#[pyfunction]
fn polygon_complexity(vertices: Vec<(f64, f64)>) -> PyResult<f64> {
    let poly = ContourPolygon::new(vertices).map_err(value_err)?;
    stroke::polygon_complexity(&poly).map_err(value_err)
}

#[pyfunction]
fn gan_objective(d_real: Vec<f64>, d_fake: Vec<f64>) -> PyResult<f64> {
    stroke::gan_objective(&d_real, &d_fake).map_err(value_err)
}

/// Stroke centerline as `(x, y, width)` triples.
#[pyfunction]
fn synthesize_stroke(quadrant: &str, normalized_intensity: f64, seed: u64) -> PyResult<Vec<(f64, f64, f64)>> {
    let path = stroke::synthesize_stroke(parse_quadrant(quadrant)?, normalized_intensity, seed).map_err(value_err)?;
    Ok(path.points.iter().map(|p| (p.x, p.y, p.width)).collect())
}

/// Writes a stroke database and returns it.
#[pyfunction]
#[pyo3(signature = (out_dir, per_quadrant = strokedb::DEFAULT_PER_QUADRANT, seed = strokedb::DEFAULT_DB_SEED))]
fn build_database(out_dir: PathBuf, per_quadrant: usize, seed: u64) -> PyResult<StrokeDatabase> {
    let index = strokedb::build_database(per_quadrant, seed, &out_dir).map_err(value_err)?;
    Ok(StrokeDatabase { index })
}

#[allow(clippy::too_many_arguments)]
fn config(
    input: PathBuf,
    out: PathBuf,
    lexicon: Option<PathBuf>,
    conllu: Option<PathBuf>,
    db: Option<PathBuf>,
    keep_ratio: f64,
    seed: u64,
    scorer_cmd: Option<String>,
    report: Option<PathBuf>,
) -> PipelineConfig {
    let mut c = PipelineConfig::new(input, out);
    c.scorer = if scorer_cmd.is_some() { ScorerKind::External } else { ScorerKind::Lexicon };
    c.lexicon_path = lexicon;
    c.conllu_path = conllu;
    c.db_dir = db;
    c.keep_ratio = keep_ratio;
    c.seed = seed;
    c.scorer_cmd = scorer_cmd;
    c.report_path = report;
    c
}

/// Runs the pipeline without writing; returns `(svg, report_json)`.
/// Passing `scorer_cmd` selects the external scorer.
#[pyfunction]
#[pyo3(signature = (input, *, lexicon = None, conllu = None, db = None, keep_ratio = 0.5, seed = strokedb::DEFAULT_DB_SEED, scorer_cmd = None))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    py: Python<'_>,
    input: PathBuf,
    lexicon: Option<PathBuf>,
    conllu: Option<PathBuf>,
    db: Option<PathBuf>,
    keep_ratio: f64,
    seed: u64,
    scorer_cmd: Option<String>,
) -> PyResult<(String, String)> {
    let out = input.with_extension("svg");
    let c = config(input, out, lexicon, conllu, db, keep_ratio, seed, scorer_cmd, None);
    let analysis = py.detach(|| pipeline::analyze(&c)).map_err(pipeline_err)?;
    Ok((analysis.svg, analysis.report.to_json()))
}

/// Runs the pipeline and writes the SVG and report; returns the report JSON.
#[pyfunction]
#[pyo3(signature = (input, out, *, lexicon = None, conllu = None, db = None, keep_ratio = 0.5, seed = strokedb::DEFAULT_DB_SEED, scorer_cmd = None, report = None))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    input: PathBuf,
    out: PathBuf,
    lexicon: Option<PathBuf>,
    conllu: Option<PathBuf>,
    db: Option<PathBuf>,
    keep_ratio: f64,
    seed: u64,
    scorer_cmd: Option<String>,
    report: Option<PathBuf>,
) -> PyResult<String> {
    let c = config(input, out, lexicon, conllu, db, keep_ratio, seed, scorer_cmd, report);
    let report = py.detach(|| pipeline::run_pipeline(&c)).map_err(pipeline_err)?;
    Ok(report.to_json())
}

#[pymodule]
#[pyo3(name = "poemotion")]
fn poemotion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PoemotionError", m.py().get_type::<PoemotionError>())?;
    m.add_class::<Segment>()?;
    m.add_class::<StrokeRecord>()?;
    m.add_class::<StrokeDatabase>()?;
    m.add_function(wrap_pyfunction!(intensity, m)?)?;
    m.add_function(wrap_pyfunction!(classify_quadrant, m)?)?;
    m.add_function(wrap_pyfunction!(segment_sentences, m)?)?;
    m.add_function(wrap_pyfunction!(extract_segments, m)?)?;
    m.add_function(wrap_pyfunction!(textrank, m)?)?;
    m.add_function(wrap_pyfunction!(select_segments, m)?)?;
    m.add_function(wrap_pyfunction!(polygon_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(gan_objective, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_stroke, m)?)?;
    m.add_function(wrap_pyfunction!(build_database, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
