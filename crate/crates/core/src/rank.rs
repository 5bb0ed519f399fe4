//! Segment pooling, similarity graph and TextRank importance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::SemanticSegment;

pub const EMBEDDING_DIM: usize = 256;
pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_KEEP_RATIO: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("segment pool is empty")]
    EmptyPool,
    #[error("keep ratio {0} is outside (0, 1]")]
    RatioOutOfRange(f64),
    #[error("damping {0} is outside (0, 1)")]
    DampingOutOfRange(f64),
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |hash, &b| (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Maps text to a vector; swap in learned embeddings by implementing this.
pub trait SegmentEmbedder {
    fn embed(&self, text: &str) -> Vec<f64>;
}

/// Character-trigram counts hashed into [`EMBEDDING_DIM`] buckets, L2-normalized.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrigramEmbedder;

impl SegmentEmbedder for TrigramEmbedder {
    fn embed(&self, text: &str) -> Vec<f64> {
        embed_segment(text)
    }
}

/// Lowercases, trims and collapses whitespace runs to one space, then hashes
/// every 3-character window (FNV-1a over its UTF-8 bytes, mod 256).
/// Text shorter than three characters maps to the zero vector.
pub fn embed_segment(text: &str) -> Vec<f64> {
    let normalized = text
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let chars: Vec<char> = normalized.chars().collect();
    let mut v = vec![0.0; EMBEDDING_DIM];
    if chars.len() < 3 {
        return v;
    }
    let mut buf = String::new();
    for w in chars.windows(3) {
        buf.clear();
        buf.extend(w);
        let bucket = (fnv1a64(buf.as_bytes()) % EMBEDDING_DIM as u64) as usize;
        v[bucket] += 1.0;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentGraph {
    pub node_ids: Vec<usize>,
    /// Row-major `n × n`, symmetric, zero diagonal, entries in `[0, 1]`.
    pub weights: Vec<Vec<f64>>,
}

impl SegmentGraph {
    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    /// A graph over nodes `0..n` from an explicit weight matrix.
    pub fn from_weights(weights: Vec<Vec<f64>>) -> Self {
        SegmentGraph {
            node_ids: (0..weights.len()).collect(),
            weights,
        }
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
}

pub fn build_graph(pool: &[SemanticSegment]) -> Result<SegmentGraph, RankError> {
    build_graph_with(pool, &TrigramEmbedder)
}

/// Complete graph with clipped cosine similarity as edge weight.
pub fn build_graph_with<E: SegmentEmbedder + ?Sized>(
    pool: &[SemanticSegment],
    embedder: &E,
) -> Result<SegmentGraph, RankError> {
    if pool.is_empty() {
        return Err(RankError::EmptyPool);
    }
    let vectors: Vec<Vec<f64>> = pool.iter().map(|s| embedder.embed(&s.text)).collect();
    let n = pool.len();
    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = cosine(&vectors[i], &vectors[j]).clamp(0.0, 1.0);
            weights[i][j] = w;
            weights[j][i] = w;
        }
    }
    Ok(SegmentGraph {
        node_ids: pool.iter().map(|s| s.id).collect(),
        weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub converged: bool,
    /// L1 change of the last iteration.
    pub final_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextRankResult {
    pub scores: Vec<f64>,
    pub report: ConvergenceReport,
}

/// Weighted PageRank by power iteration from the uniform vector.
///
/// Each node spreads its score over its out-edges in proportion to weight;
/// nodes without edges spread uniformly over all nodes. Iteration stops once
/// the L1 change drops below `tol` or after `max_iter` rounds.
pub fn textrank_scores(
    graph: &SegmentGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TextRankResult, RankError> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(RankError::DampingOutOfRange(damping));
    }
    let n = graph.len();
    if n == 0 {
        return Err(RankError::EmptyPool);
    }
    let nf = n as f64;
    let row_sums: Vec<f64> = graph.weights.iter().map(|r| r.iter().sum()).collect();

    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut report = ConvergenceReport {
        iterations: 0,
        converged: false,
        final_delta: f64::INFINITY,
    };
    for iter in 1..=max_iter {
        let dangling: f64 = (0..n).filter(|&j| row_sums[j] == 0.0).map(|j| scores[j]).sum();
        for i in 0..n {
            let mut incoming = dangling / nf;
            for j in 0..n {
                if row_sums[j] > 0.0 {
                    incoming += graph.weights[j][i] / row_sums[j] * scores[j];
                }
            }
            next[i] = (1.0 - damping) / nf + damping * incoming;
        }
        let delta: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        report.iterations = iter;
        report.final_delta = delta;
        if delta < tol {
            report.converged = true;
            break;
        }
    }
    Ok(TextRankResult { scores, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPool {
    pub segments: Vec<(SemanticSegment, f64)>,
}

impl RankedPool {
    /// Pairs each segment with its score; lengths must match.
    pub fn new(segments: Vec<SemanticSegment>, scores: &[f64]) -> Self {
        assert_eq!(segments.len(), scores.len(), "one score per segment");
        RankedPool {
            segments: segments.into_iter().zip(scores.iter().copied()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// `max(1, ceil(ratio · n))`.
///
/// Products within 1e-9 of an integer are treated as that integer, so that
/// `0.7 · 10` keeps 7 and not 8.
pub fn keep_count(n: usize, keep_ratio: f64) -> Result<usize, RankError> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(RankError::RatioOutOfRange(keep_ratio));
    }
    let k = (keep_ratio * n as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(k.min(n.max(1)))
}

/// Highest-scoring segments, best first. Exact ties go to the segment that
/// appears earlier in the document.
pub fn select_top(pool: &RankedPool, keep_ratio: f64) -> Result<Vec<(SemanticSegment, f64)>, RankError> {
    let k = keep_count(pool.len(), keep_ratio)?;
    let mut order: Vec<&(SemanticSegment, f64)> = pool.segments.iter().collect();
    order.sort_by(|(a, sa), (b, sb)| {
        sb.total_cmp(sa).then_with(|| a.position().cmp(&b.position()))
    });
    Ok(order.into_iter().take(k).cloned().collect())
}
