//! Cosine scoring and the adaptive `Q3 + k·IQR` retention threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingVector;

#[derive(Debug, Error, PartialEq)]
pub enum RelevanceError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine of a zero vector is undefined")]
    ZeroVector,
    #[error("no scores to summarize")]
    EmptyScores,
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPaper {
    pub arxiv_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub threshold: f64,
    pub skewness: f64,
}

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, RelevanceError> {
    if a.dim() != b.dim() {
        return Err(RelevanceError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(RelevanceError::ZeroVector);
    }
    let dot: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Quantile of ascending-sorted data by linear interpolation at position
/// `p·(n−1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    let (a, b) = (sorted[lo], sorted[hi]);
    (a + frac * (b - a)).clamp(a.min(b), a.max(b))
}

/// Population (Fisher–Pearson g1) skewness: `m3 / m2^1.5`; zero for
/// constant data.
pub fn skewness(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

pub fn compute_stats(scores: &[f64], multiplier: f64) -> Result<DistributionStats, RelevanceError> {
    if scores.is_empty() {
        return Err(RelevanceError::EmptyScores);
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(RelevanceError::NonFiniteScore(bad));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(DistributionStats {
        n: sorted.len(),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        q1,
        q3,
        iqr,
        threshold: q3 + multiplier * iqr,
        skewness: skewness(scores),
    })
}

/// Entries scoring at or above the threshold, best first; ties ordered by
/// ascending id.
pub fn filter_by_threshold(scored: &[ScoredPaper], stats: &DistributionStats) -> Vec<ScoredPaper> {
    let mut kept: Vec<ScoredPaper> = scored
        .iter()
        .filter(|s| s.score >= stats.threshold)
        .cloned()
        .collect();
    kept.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.arxiv_id.cmp(&b.arxiv_id))
    });
    kept
}

/// Scores every candidate against the query. Zero-vector candidates get a
/// score of 0 and are reported in the returned warnings.
pub fn score_candidates(
    query: &EmbeddingVector,
    candidates: &[(String, EmbeddingVector)],
) -> Result<(Vec<ScoredPaper>, Vec<String>), RelevanceError> {
    if query.is_zero() {
        return Err(RelevanceError::ZeroVector);
    }
    let mut warnings = Vec::new();
    let mut scored = Vec::with_capacity(candidates.len());
    for (id, vector) in candidates {
        let score = match cosine(query, vector) {
            Ok(s) => s,
            Err(RelevanceError::ZeroVector) => {
                warnings.push(format!("{id}: zero embedding vector, scored 0"));
                0.0
            }
            Err(e) => return Err(e),
        };
        scored.push(ScoredPaper {
            arxiv_id: id.clone(),
            score,
        });
    }
    Ok((scored, warnings))
}
