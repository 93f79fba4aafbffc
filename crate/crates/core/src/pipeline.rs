//! End-to-end orchestration: keywords, retrieval, scoring, analysis and
//! synthesis, with every intermediate artifact written to the output
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    summarize, tag_contribution, tag_intent, CitationIntent, ContributionType, StructuredSummary,
};
use crate::arxiv::{
    dedup, fetch_all, ArxivClient, FeedSource, FixtureFeeds, PaperRecord, PdfSource,
};
use crate::cache::StageCache;
use crate::config::{ConfigError, Endpoints, PipelineConfig};
use crate::embedding::{
    paper_text, query_text, EmbedError, Embedder, ProviderDescriptor, ProviderKind, RemoteEmbedder,
    TfidfEmbedder,
};
use crate::keywords::{generate_keywords, KeywordSet};
use crate::llm::{
    CachedLlm, FixtureLlm, HttpLlmClient, LlmClient, LlmError, LlmRequest, LlmResponse,
};
use crate::query::{InputQuery, QueryError};
use crate::relevance::{
    compute_stats, filter_by_threshold, score_candidates, DistributionStats, ScoredPaper,
};
use crate::sections::{section_paper, LopdfExtractor, SectionedPaper, TextExtractor};
use crate::synthesis::{
    build_bibliography, render_bibliography, synthesize_review, BibEntry, ReviewDocument,
    ReviewItem,
};
use crate::transport::{HttpTransport, OfflineTransport};

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    InvalidQuery(#[from] QueryError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage `{stage}` failed: {source}")]
    StageFailure {
        stage: &'static str,
        #[source]
        source: BoxError,
    },
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
}

fn stage<E: Into<BoxError>>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::StageFailure {
        stage,
        source: e.into(),
    }
}

/// The collaborators a run talks to. Swapping these is how tests and
/// offline runs avoid the network.
pub struct Services {
    pub llm: Box<dyn LlmClient>,
    pub feeds: Box<dyn FeedSource>,
    /// `None` skips PDF download; papers are then analysed from abstracts.
    pub pdfs: Option<Box<dyn PdfSource>>,
    pub embedder: Box<dyn Embedder>,
    pub extractor: Box<dyn TextExtractor>,
}

struct UnconfiguredLlm;

impl LlmClient for UnconfiguredLlm {
    fn complete(&self, _: &LlmRequest) -> Result<LlmResponse, LlmError> {
        Err(LlmError::Unavailable("LLM_API_URL is not set".into()))
    }
}

/// Embedder for a provider kind. Remote kinds need
/// `endpoints.embedding_api_url`.
pub fn build_embedder(
    kind: ProviderKind,
    endpoints: &Endpoints,
    transport: Arc<dyn HttpTransport>,
    cache: StageCache,
) -> Result<Box<dyn Embedder>, EmbedError> {
    if kind == ProviderKind::Tfidf {
        return Ok(Box::new(TfidfEmbedder));
    }
    let descriptor = ProviderDescriptor::for_kind(kind, endpoints.embedding_api_url.as_deref());
    Ok(Box::new(RemoteEmbedder::new(descriptor, transport, cache)?))
}

/// Endpoints under which remote providers only serve cached embeddings.
pub fn offline_endpoints() -> Endpoints {
    Endpoints {
        embedding_api_url: Some("offline://embed".into()),
        ..Endpoints::default()
    }
}

impl Services {
    /// Network-backed services. All responses are cached under
    /// `config.cache_dir()`, so a repeated run replays without requests.
    pub fn live(
        config: &PipelineConfig,
        endpoints: &Endpoints,
        transport: Arc<dyn HttpTransport>,
    ) -> Result<Self, PipelineError> {
        let cache = StageCache::new(config.cache_dir());
        let llm: Box<dyn LlmClient> = match &endpoints.llm_api_url {
            Some(url) => Box::new(CachedLlm::new(
                HttpLlmClient::new(
                    transport.clone(),
                    url.clone(),
                    endpoints.llm_api_key.clone(),
                ),
                cache.clone(),
            )),
            None => Box::new(CachedLlm::new(UnconfiguredLlm, cache.clone())),
        };
        let arxiv = Arc::new(ArxivClient::new(
            transport.clone(),
            Duration::from_millis(config.request_delay_ms),
            cache.clone(),
        ));
        Ok(Self {
            llm,
            feeds: Box::new(arxiv.clone()),
            pdfs: Some(Box::new(arxiv)),
            embedder: build_embedder(config.provider(), endpoints, transport, cache)
                .map_err(stage("embed"))?,
            extractor: Box::new(LopdfExtractor),
        })
    }

    /// Services backed by a fixture directory holding `llm.json` rules,
    /// `feeds/<slug>.xml` and optional `pdfs/<id>.pdf`. Remote embedding
    /// providers only work from a warm cache.
    pub fn offline(config: &PipelineConfig, fixtures: &Path) -> Result<Self, PipelineError> {
        let cache = StageCache::new(config.cache_dir());
        let rules = FixtureLlm::from_file(&fixtures.join("llm.json")).map_err(stage("keywords"))?;
        let feeds = Arc::new(FixtureFeeds::new(fixtures));
        Ok(Self {
            llm: Box::new(CachedLlm::new(rules, cache.clone())),
            feeds: Box::new(feeds.clone()),
            pdfs: Some(Box::new(feeds)),
            embedder: build_embedder(
                config.provider(),
                &offline_endpoints(),
                Arc::new(OfflineTransport),
                cache,
            )
            .map_err(stage("embed"))?,
            extractor: Box::new(LopdfExtractor),
        })
    }
}

/// Analysis results for one retained paper.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysedPaper {
    pub arxiv_id: String,
    pub bib_key: String,
    pub title: String,
    pub score: f64,
    pub summary: StructuredSummary,
    pub intent: CitationIntent,
    pub contribution: ContributionType,
}

#[derive(Debug, Clone)]
pub struct ReviewBundle {
    pub keywords: KeywordSet,
    /// Deduplicated candidates that were scored.
    pub candidates: Vec<PaperRecord>,
    /// Scores for every candidate, in candidate order.
    pub scores: Vec<ScoredPaper>,
    pub stats: DistributionStats,
    /// Candidates at or above the threshold, best first.
    pub retained: Vec<ScoredPaper>,
    pub sections: BTreeMap<String, SectionedPaper>,
    pub analysed: Vec<AnalysedPaper>,
    pub bibliography: Vec<BibEntry>,
    pub review: ReviewDocument,
    pub warnings: Vec<String>,
    /// Papers dropped during analysis, with the reason.
    pub failures: Vec<(String, String)>,
    pub output_dir: PathBuf,
}

/// File names written under the output directory.
pub mod outputs {
    pub const KEYWORDS: &str = "keywords.json";
    pub const PAPERS: &str = "papers.json";
    pub const SCORES: &str = "scores.csv";
    pub const STATS: &str = "stats.json";
    pub const SECTIONS_DIR: &str = "sections";
    pub const SUMMARIES: &str = "summaries.json";
    pub const BIBLIOGRAPHY: &str = "refs.bib";
    pub const REVIEW: &str = "review.md";
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(value).map_err(stage("write"))?;
    std::fs::write(path, text + "\n").map_err(stage("write"))
}

#[derive(Serialize)]
struct StatsFile<'a> {
    provider_id: &'a str,
    iqr_multiplier: f64,
    #[serde(flatten)]
    stats: &'a DistributionStats,
}

#[derive(Serialize)]
struct ScoreRow<'a> {
    arxiv_id: &'a str,
    score: f64,
    retained: bool,
}

fn fetch_candidates(
    services: &Services,
    keywords: &[String],
    config: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<PaperRecord>, PipelineError> {
    let mut raw = Vec::new();
    let mut last_error = None;
    for keyword in keywords {
        match fetch_all(
            services.feeds.as_ref(),
            std::slice::from_ref(keyword),
            config.max_per_keyword,
        ) {
            Ok(records) => raw.extend(records),
            Err(e) => {
                warnings.push(format!("keyword `{keyword}`: {e}"));
                last_error = Some(e);
            }
        }
    }
    if raw.is_empty() {
        if let Some(e) = last_error {
            return Err(stage("fetch")(e));
        }
    }
    let mut candidates = dedup(raw);
    candidates.retain(|r| {
        let ok = r.has_valid_id();
        if !ok {
            warnings.push(format!("dropped `{}`: no usable arXiv identifier", r.title));
        }
        ok
    });
    if candidates.is_empty() {
        return Err(PipelineError::EmptyCorpus("no candidates retrieved".into()));
    }
    Ok(candidates)
}

/// Runs every stage in order and writes `keywords.json`, `papers.json`,
/// `scores.csv`, `stats.json`, `sections/<id>.json`, `summaries.json`,
/// `refs.bib` and `review.md` under `config.output_dir`.
pub fn run_pipeline(
    query: &InputQuery,
    config: &PipelineConfig,
    services: &Services,
) -> Result<ReviewBundle, PipelineError> {
    query.validate()?;
    config.validate()?;
    let out = config.output_dir.clone();
    std::fs::create_dir_all(out.join(outputs::SECTIONS_DIR)).map_err(stage("write"))?;
    let mut warnings = Vec::new();

    let keywords =
        generate_keywords(query, services.llm.as_ref(), config).map_err(stage("keywords"))?;
    write_json(&out.join(outputs::KEYWORDS), &keywords)?;
    tracing::info!(n = keywords.keywords.len(), "keywords generated");

    let candidates = fetch_candidates(services, &keywords.keywords, config, &mut warnings)?;
    write_json(&out.join(outputs::PAPERS), &candidates)?;
    tracing::info!(n = candidates.len(), "candidates retrieved");

    let texts: Vec<String> = std::iter::once(query_text(query))
        .chain(candidates.iter().map(paper_text))
        .collect();
    let vectors = services.embedder.embed(&texts).map_err(stage("embed"))?;
    let (query_vec, doc_vecs) = vectors
        .split_first()
        .ok_or_else(|| stage("embed")("embedder returned no vectors"))?;
    let pairs: Vec<_> = candidates
        .iter()
        .map(|r| r.arxiv_id.clone())
        .zip(doc_vecs.iter().cloned())
        .collect();
    let (scores, score_warnings) = score_candidates(query_vec, &pairs).map_err(stage("score"))?;
    warnings.extend(score_warnings);
    let values: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let stats = compute_stats(&values, config.iqr_multiplier).map_err(stage("score"))?;
    let retained = filter_by_threshold(&scores, &stats);
    write_json(
        &out.join(outputs::STATS),
        &StatsFile {
            provider_id: services.embedder.provider_id(),
            iqr_multiplier: config.iqr_multiplier,
            stats: &stats,
        },
    )?;
    {
        let mut w = csv::Writer::from_path(out.join(outputs::SCORES)).map_err(stage("write"))?;
        for s in &scores {
            w.serialize(ScoreRow {
                arxiv_id: &s.arxiv_id,
                score: s.score,
                retained: s.score >= stats.threshold,
            })
            .map_err(stage("write"))?;
        }
        w.flush().map_err(stage("write"))?;
    }
    tracing::info!(
        threshold = stats.threshold,
        retained = retained.len(),
        "relevance filter applied"
    );
    if retained.is_empty() {
        return Err(PipelineError::EmptyCorpus(format!(
            "no candidate reached the threshold {:.4}",
            stats.threshold
        )));
    }

    let by_id: BTreeMap<&str, &PaperRecord> = candidates
        .iter()
        .map(|r| (r.arxiv_id.as_str(), r))
        .collect();
    let mut sections = BTreeMap::new();
    let mut failures = Vec::new();
    let mut kept: Vec<(
        &PaperRecord,
        f64,
        StructuredSummary,
        CitationIntent,
        ContributionType,
    )> = Vec::new();
    for scored in &retained {
        let record = by_id[scored.arxiv_id.as_str()];
        let pdf = services
            .pdfs
            .as_ref()
            .and_then(|p| match p.fetch_pdf(record) {
                Ok(bytes) => Some(bytes),
                Err(e) => {
                    warnings.push(format!("{}: {e}, using abstract", record.arxiv_id));
                    None
                }
            });
        let (paper, note) = section_paper(record, pdf.as_deref(), services.extractor.as_ref());
        warnings.extend(note);
        let file = format!("{}.json", record.arxiv_id.replace('/', "_"));
        write_json(&out.join(outputs::SECTIONS_DIR).join(file), &paper)?;

        let summary = match summarize(record, &paper, services.llm.as_ref(), &config.llm_model_id) {
            Ok(s) => s,
            Err(e) => {
                tracing::warn!(id = %record.arxiv_id, error = %e, "summary failed");
                failures.push((record.arxiv_id.clone(), e.to_string()));
                sections.insert(record.arxiv_id.clone(), paper);
                continue;
            }
        };
        sections.insert(record.arxiv_id.clone(), paper);
        let intent = tag_intent(
            &summary,
            record,
            services.llm.as_ref(),
            &config.llm_model_id,
        )
        .unwrap_or_else(|e| {
            warnings.push(format!(
                "{}: intent tagging failed ({e}), using Other",
                record.arxiv_id
            ));
            CitationIntent::Other
        });
        let contribution = tag_contribution(
            &summary,
            record,
            services.llm.as_ref(),
            &config.llm_model_id,
        )
        .unwrap_or_else(|e| {
            warnings.push(format!(
                "{}: contribution tagging failed ({e}), using Other",
                record.arxiv_id
            ));
            ContributionType::Other
        });
        kept.push((record, scored.score, summary, intent, contribution));
    }
    if kept.is_empty() {
        return Err(PipelineError::EmptyCorpus(
            "no retained paper could be summarized".into(),
        ));
    }

    let records: Vec<PaperRecord> = kept.iter().map(|k| k.0.clone()).collect();
    let bibliography = build_bibliography(&records);
    let analysed: Vec<AnalysedPaper> = kept
        .into_iter()
        .zip(&bibliography)
        .map(
            |((record, score, summary, intent, contribution), entry)| AnalysedPaper {
                arxiv_id: record.arxiv_id.clone(),
                bib_key: entry.key.clone(),
                title: record.title.clone(),
                score,
                summary,
                intent,
                contribution,
            },
        )
        .collect();
    let summaries: BTreeMap<&str, &AnalysedPaper> =
        analysed.iter().map(|a| (a.arxiv_id.as_str(), a)).collect();
    write_json(&out.join(outputs::SUMMARIES), &summaries)?;
    let bib_text = render_bibliography(&bibliography).map_err(stage("bibtex"))?;
    std::fs::write(out.join(outputs::BIBLIOGRAPHY), bib_text).map_err(stage("write"))?;

    let items: Vec<ReviewItem> = analysed
        .iter()
        .map(|a| ReviewItem {
            bib_key: a.bib_key.clone(),
            title: a.title.clone(),
            summary: a.summary.clone(),
            intent: a.intent,
            contribution: a.contribution,
        })
        .collect();
    let review = synthesize_review(
        &query.title,
        &items,
        &bibliography,
        services.llm.as_ref(),
        &config.llm_model_id,
    )
    .map_err(stage("synthesize"))?;
    warnings.extend(review.warnings.iter().cloned());
    std::fs::write(out.join(outputs::REVIEW), format!("{}\n", review.body))
        .map_err(stage("write"))?;

    for w in &warnings {
        tracing::warn!("{w}");
    }
    Ok(ReviewBundle {
        keywords,
        candidates,
        scores,
        stats,
        retained,
        sections,
        analysed,
        bibliography,
        review,
        warnings,
        failures,
        output_dir: out,
    })
}
