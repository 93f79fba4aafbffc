//! Side-by-side comparison of embedding providers on one candidate pool.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::arxiv::PaperRecord;
use crate::embedding::{paper_text, query_text, EmbedError, Embedder, EmbeddingVector};
use crate::query::InputQuery;
use crate::relevance::{
    compute_stats, filter_by_threshold, quantile_sorted, score_candidates, ScoredPaper,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no scores for provider `{0}`")]
    MissingScores(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One provider's distribution summary. Numeric fields are empty when the
/// provider failed; `error` then says why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub provider_id: String,
    pub n: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub threshold: Option<f64>,
    pub skewness: Option<f64>,
    pub retained_count: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Per-provider scores in corpus order; absent for failed providers.
    pub scores: Vec<(String, Vec<ScoredPaper>)>,
}

impl BenchReport {
    pub fn scores_for(&self, provider_id: &str) -> Option<&[ScoredPaper]> {
        self.scores
            .iter()
            .find(|(p, _)| p == provider_id)
            .map(|(_, s)| s.as_slice())
    }
}

/// Stand-in for a provider that could not be constructed, so that it still
/// shows up as an annotated row.
pub struct UnavailableEmbedder {
    pub provider_id: String,
    pub reason: String,
}

impl Embedder for UnavailableEmbedder {
    fn provider_id(&self) -> &str {
        &self.provider_id
    }

    fn embed(&self, _: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        Err(EmbedError::ProviderUnavailable(self.reason.clone()))
    }
}

fn run_provider(
    embedder: &dyn Embedder,
    texts: &[String],
    ids: &[String],
    multiplier: f64,
) -> Result<(BenchRow, Vec<ScoredPaper>), String> {
    let vectors = embedder.embed(texts).map_err(|e| e.to_string())?;
    let (query, docs) = vectors
        .split_first()
        .ok_or("provider returned no vectors")?;
    let candidates: Vec<_> = ids.iter().cloned().zip(docs.iter().cloned()).collect();
    let (scored, _) = score_candidates(query, &candidates).map_err(|e| e.to_string())?;
    let values: Vec<f64> = scored.iter().map(|s| s.score).collect();
    let stats = compute_stats(&values, multiplier).map_err(|e| e.to_string())?;
    let retained = filter_by_threshold(&scored, &stats).len();
    let row = BenchRow {
        provider_id: embedder.provider_id().to_string(),
        n: stats.n,
        min: Some(stats.min),
        max: Some(stats.max),
        threshold: Some(stats.threshold),
        skewness: Some(stats.skewness),
        retained_count: Some(retained),
        error: None,
    };
    Ok((row, scored))
}

/// Scores the same corpus with every provider. A failing provider yields a
/// row carrying the error instead of aborting the comparison.
pub fn compare_providers(
    query: &InputQuery,
    corpus: &[PaperRecord],
    providers: &[&dyn Embedder],
    multiplier: f64,
) -> Result<BenchReport, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    let texts: Vec<String> = std::iter::once(query_text(query))
        .chain(corpus.iter().map(paper_text))
        .collect();
    let ids: Vec<String> = corpus.iter().map(|r| r.arxiv_id.clone()).collect();
    let mut report = BenchReport::default();
    for provider in providers {
        match run_provider(*provider, &texts, &ids, multiplier) {
            Ok((row, scored)) => {
                report.scores.push((row.provider_id.clone(), scored));
                report.rows.push(row);
            }
            Err(error) => {
                tracing::warn!(provider = provider.provider_id(), %error, "provider failed");
                report.rows.push(BenchRow {
                    provider_id: provider.provider_id().to_string(),
                    n: 0,
                    min: None,
                    max: None,
                    threshold: None,
                    skewness: None,
                    retained_count: None,
                    error: Some(error),
                });
            }
        }
    }
    Ok(report)
}

pub fn write_bench_csv(rows: &[BenchRow], path: &Path) -> Result<(), BenchError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `plot_scores.csv` (one row per score, for histograms) and
/// `plot_box.csv` (five-number summary per provider) into `dir`. Every
/// provider without an error must have a non-empty score list.
pub fn emit_plot_data(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir)?;
    let scores_path = dir.join("plot_scores.csv");
    let box_path = dir.join("plot_box.csv");
    let mut scores_w = csv::Writer::from_path(&scores_path)?;
    let mut box_w = csv::Writer::from_path(&box_path)?;
    scores_w.write_record(["index", "provider_id", "score"])?;
    box_w.write_record(["provider_id", "min", "q1", "median", "q3", "max"])?;
    for row in report.rows.iter().filter(|r| r.error.is_none()) {
        let scored = report
            .scores_for(&row.provider_id)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| BenchError::MissingScores(row.provider_id.clone()))?;
        for (i, s) in scored.iter().enumerate() {
            scores_w.write_record([i.to_string(), row.provider_id.clone(), s.score.to_string()])?;
        }
        let mut sorted: Vec<f64> = scored.iter().map(|s| s.score).collect();
        sorted.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&sorted, p).to_string();
        box_w.write_record([
            row.provider_id.clone(),
            sorted[0].to_string(),
            q(0.25),
            q(0.5),
            q(0.75),
            sorted[sorted.len() - 1].to_string(),
        ])?;
    }
    scores_w.flush()?;
    box_w.flush()?;
    Ok(vec![scores_path, box_path])
}
