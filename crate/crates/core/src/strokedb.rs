//! Persisted stroke database and intensity-to-complexity matching.
//!
//! Layout on disk:
//!
//! ```text
//! <dir>/index.json
//! <dir>/strokes/<id>.svg
//! ```
//!
//! `index.json` holds `version` (1), `db_seed` as a decimal string, and
//! `records`, each with `id`, `quadrant`, `seed` (decimal string),
//! `complexity`, `normalized_complexity` and `asset_path`. Floats are rounded
//! to 9 significant digits.

use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::Quadrant;
use crate::rng::splitmix64_at;
use crate::stroke::{
    parse_svg_path_data, polygon_complexity, ribbon_polygon, synthesize_stroke, ContourPolygon,
    GeometryError, StrokeError,
};

pub const INDEX_VERSION: u32 = 1;
pub const INDEX_FILE: &str = "index.json";
pub const STROKE_DIR: &str = "strokes";
pub const DEFAULT_PER_QUADRANT: usize = 64;
pub const DEFAULT_DB_SEED: u64 = 42;

const ASSET_MARGIN: f64 = 4.0;
const ASSET_DECIMALS: usize = 4;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid stroke database: {0}")]
    Schema(String),
    #[error("no strokes for quadrant {0}")]
    EmptyQuadrant(Quadrant),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Stroke(#[from] StrokeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DbError + '_ {
    move |source| DbError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeRecord {
    pub id: usize,
    pub quadrant: Quadrant,
    #[serde(with = "u64_string")]
    pub seed: u64,
    pub complexity: f64,
    pub normalized_complexity: f64,
    /// Relative to the database directory, `/`-separated.
    pub asset_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeIndex {
    pub version: u32,
    #[serde(with = "u64_string")]
    pub db_seed: u64,
    /// Sorted by id; ids are `0..len`, grouped by quadrant.
    pub records: Vec<StrokeRecord>,
}

mod u64_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rounds to 9 significant decimal digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// One synthesized stroke with its outline.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeEntry {
    pub record: StrokeRecord,
    pub outline: ContourPolygon,
}

fn asset_path_for(id: usize) -> String {
    format!("{STROKE_DIR}/{id}.svg")
}

/// Min-max normalization within each quadrant. A quadrant whose strokes all
/// share one complexity (including a single stroke) maps to 0.5.
fn normalize(records: &mut [StrokeRecord]) {
    for q in Quadrant::EMOTIONS {
        let (lo, hi) = records
            .iter()
            .filter(|r| r.quadrant == q)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.complexity), hi.max(r.complexity))
            });
        for r in records.iter_mut().filter(|r| r.quadrant == q) {
            r.normalized_complexity = if hi > lo {
                round_sig9((r.complexity - lo) / (hi - lo))
            } else {
                0.5
            };
        }
    }
}

/// Synthesizes the database in memory.
///
/// Stroke `i` of quadrant `q` gets id `k = ordinal(q) · per_quadrant + i`,
/// seed `splitmix64_at(db_seed, k)` and intensity `i / (per_quadrant - 1)`
/// (0.5 when there is a single stroke per quadrant).
pub fn synthesize_database(per_quadrant: usize, db_seed: u64) -> Result<Vec<StrokeEntry>, DbError> {
    if per_quadrant == 0 {
        return Err(DbError::InvalidArgument("per_quadrant must be at least 1".to_string()));
    }
    let mut entries = Vec::with_capacity(4 * per_quadrant);
    for (ordinal, q) in Quadrant::EMOTIONS.into_iter().enumerate() {
        for i in 0..per_quadrant {
            let id = ordinal * per_quadrant + i;
            let seed = splitmix64_at(db_seed, id as u64);
            let intensity = if per_quadrant == 1 {
                0.5
            } else {
                i as f64 / (per_quadrant - 1) as f64
            };
            let path = synthesize_stroke(q, intensity, seed)?;
            let outline = ribbon_polygon(&path)?;
            let complexity = polygon_complexity(&outline)?;
            entries.push(StrokeEntry {
                record: StrokeRecord {
                    id,
                    quadrant: q,
                    seed,
                    complexity: round_sig9(complexity),
                    normalized_complexity: 0.0,
                    asset_path: asset_path_for(id),
                },
                outline,
            });
        }
    }
    let mut records: Vec<StrokeRecord> = entries.iter().map(|e| e.record.clone()).collect();
    normalize(&mut records);
    for (e, r) in entries.iter_mut().zip(records) {
        e.record = r;
    }
    Ok(entries)
}

/// Standalone SVG document for one stroke outline.
pub fn stroke_asset_svg(record: &StrokeRecord, outline: &ContourPolygon) -> String {
    let (x0, y0, x1, y1) = outline.bounds();
    let (vx, vy) = (x0 - ASSET_MARGIN, y0 - ASSET_MARGIN);
    let (vw, vh) = (x1 - x0 + 2.0 * ASSET_MARGIN, y1 - y0 + 2.0 * ASSET_MARGIN);
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"{vx:.4} {vy:.4} {vw:.4} {vh:.4}\" width=\"{vw:.0}\" height=\"{vh:.0}\">\n\
         <path d=\"{d}\" fill=\"#000000\" data-id=\"{id}\" data-quadrant=\"{q}\" data-seed=\"{seed}\"/>\n\
         </svg>\n",
        d = outline.to_svg_path_data(ASSET_DECIMALS),
        id = record.id,
        q = record.quadrant,
        seed = record.seed,
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), DbError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn index_json(index: &StrokeIndex) -> String {
    let mut json = serde_json::to_string_pretty(index).expect("index serializes");
    json.push('\n');
    json
}

/// Builds the database and writes it under `out_dir`.
pub fn build_database(per_quadrant: usize, db_seed: u64, out_dir: &Path) -> Result<StrokeIndex, DbError> {
    let entries = synthesize_database(per_quadrant, db_seed)?;
    let stroke_dir = out_dir.join(STROKE_DIR);
    fs::create_dir_all(&stroke_dir).map_err(io_err(&stroke_dir))?;
    for e in &entries {
        write_file(&out_dir.join(&e.record.asset_path), &stroke_asset_svg(&e.record, &e.outline))?;
    }
    let index = StrokeIndex {
        version: INDEX_VERSION,
        db_seed,
        records: entries.into_iter().map(|e| e.record).collect(),
    };
    write_file(&out_dir.join(INDEX_FILE), &index_json(&index))?;
    Ok(index)
}

fn safe_relative(path: &str) -> bool {
    let p = Path::new(path);
    !path.is_empty()
        && p.components()
            .all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
}

impl StrokeIndex {
    /// Checks every structural invariant except asset presence.
    pub fn validate(&self) -> Result<(), DbError> {
        let schema = |m: String| Err(DbError::Schema(m));
        if self.version != INDEX_VERSION {
            return schema(format!(
                "unsupported version {} (expected {INDEX_VERSION})",
                self.version
            ));
        }
        for (k, r) in self.records.iter().enumerate() {
            if r.id != k {
                return schema(format!("record {k} has id {}; ids must be dense from 0", r.id));
            }
            if r.quadrant == Quadrant::Neutral {
                return schema(format!("record {} has the neutral quadrant", r.id));
            }
            if !r.complexity.is_finite() || r.complexity <= 0.0 {
                return schema(format!("record {} has complexity {}", r.id, r.complexity));
            }
            if !(0.0..=1.0).contains(&r.normalized_complexity) {
                return schema(format!(
                    "record {} has normalized_complexity {} outside [0, 1]",
                    r.id, r.normalized_complexity
                ));
            }
            if !safe_relative(&r.asset_path) {
                return schema(format!("record {} has unsafe asset path {:?}", r.id, r.asset_path));
            }
        }
        for q in Quadrant::EMOTIONS {
            let group: Vec<&StrokeRecord> = self.records.iter().filter(|r| r.quadrant == q).collect();
            let lo = group.iter().map(|r| r.complexity).fold(f64::INFINITY, f64::min);
            let hi = group.iter().map(|r| r.complexity).fold(f64::NEG_INFINITY, f64::max);
            if group.len() < 2 || hi <= lo {
                continue;
            }
            for r in group {
                let expected = (r.complexity - lo) / (hi - lo);
                if (r.normalized_complexity - expected).abs() > 1e-6 {
                    return schema(format!(
                        "record {} normalized_complexity {} does not match {expected}",
                        r.id, r.normalized_complexity
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn in_quadrant(&self, quadrant: Quadrant) -> impl Iterator<Item = &StrokeRecord> {
        self.records.iter().filter(move |r| r.quadrant == quadrant)
    }
}

/// Reads and validates `<dir>/index.json`, checking that every asset exists.
pub fn load_database(dir: &Path) -> Result<StrokeIndex, DbError> {
    let index_path = dir.join(INDEX_FILE);
    let text = fs::read_to_string(&index_path).map_err(io_err(&index_path))?;
    let index: StrokeIndex = serde_json::from_str(&text)
        .map_err(|e| DbError::Schema(format!("{}: {e}", index_path.display())))?;
    index.validate()?;
    for r in &index.records {
        let asset = dir.join(&r.asset_path);
        if !asset.is_file() {
            return Err(DbError::Schema(format!(
                "record {} references missing asset {}",
                r.id,
                asset.display()
            )));
        }
    }
    Ok(index)
}

/// Reads the outline stored in a record's SVG asset.
pub fn load_outline(dir: &Path, record: &StrokeRecord) -> Result<ContourPolygon, DbError> {
    let path = dir.join(&record.asset_path);
    let svg = fs::read_to_string(&path).map_err(io_err(&path))?;
    let d = svg
        .split_once(" d=\"")
        .and_then(|(_, rest)| rest.split_once('"'))
        .map(|(d, _)| d)
        .ok_or_else(|| DbError::Schema(format!("{} has no path data", path.display())))?;
    parse_svg_path_data(d).map_err(|e| DbError::Schema(format!("{}: {e}", path.display())))
}

/// The record of `quadrant` whose normalized complexity is nearest to
/// `normalized_intensity`; ties go to the smaller id.
pub fn match_stroke(
    index: &StrokeIndex,
    quadrant: Quadrant,
    normalized_intensity: f64,
) -> Result<&StrokeRecord, DbError> {
    if quadrant == Quadrant::Neutral {
        return Err(StrokeError::NeutralQuadrant.into());
    }
    if !(0.0..=1.0).contains(&normalized_intensity) {
        return Err(StrokeError::IntensityOutOfRange(normalized_intensity).into());
    }
    index
        .in_quadrant(quadrant)
        .min_by(|a, b| {
            let da = (a.normalized_complexity - normalized_intensity).abs();
            let db = (b.normalized_complexity - normalized_intensity).abs();
            da.total_cmp(&db).then(a.id.cmp(&b.id))
        })
        .ok_or(DbError::EmptyQuadrant(quadrant))
}
