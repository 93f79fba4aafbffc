//! Rate-limited arXiv access plus a directory-backed stand-in for offline
//! runs.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::feed::{parse_atom_feed, FeedError};
use super::query::{build_query_at, ARXIV_API_URL};
use super::record::PaperRecord;
use crate::cache::{cache_key, StageCache};
use crate::transport::{with_retries, Attempt, HttpTransport, RetryPolicy, TransportError};

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("HTTP {status} from {url}")]
    Http { url: String, status: u16 },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("no fixture at {0}")]
    MissingFixture(PathBuf),
    #[error("paper {0} has no PDF link")]
    NoPdf(String),
    #[error("feed for keyword `{keyword}`: {source}")]
    Feed {
        keyword: String,
        #[source]
        source: FeedError,
    },
}

/// Source of raw Atom feeds, one request per keyword.
pub trait FeedSource {
    fn fetch_feed(&self, keyword: &str, max_results: usize) -> Result<Vec<u8>, FetchError>;
}

/// Source of PDF bytes for a paper.
pub trait PdfSource {
    fn fetch_pdf(&self, record: &PaperRecord) -> Result<Vec<u8>, FetchError>;
}

impl<T: FeedSource + ?Sized> FeedSource for Arc<T> {
    fn fetch_feed(&self, keyword: &str, max_results: usize) -> Result<Vec<u8>, FetchError> {
        (**self).fetch_feed(keyword, max_results)
    }
}

impl<T: PdfSource + ?Sized> PdfSource for Arc<T> {
    fn fetch_pdf(&self, record: &PaperRecord) -> Result<Vec<u8>, FetchError> {
        (**self).fetch_pdf(record)
    }
}

/// Sequential arXiv client. Requests are spaced by `delay`, retried on 5xx
/// and network errors, and raw responses are cached under `fetch/` and
/// `pdf/`.
pub struct ArxivClient {
    transport: Arc<dyn HttpTransport>,
    base_url: String,
    delay: Duration,
    retry: RetryPolicy,
    cache: StageCache,
    last_request: Mutex<Option<Instant>>,
}

impl ArxivClient {
    pub fn new(transport: Arc<dyn HttpTransport>, delay: Duration, cache: StageCache) -> Self {
        Self {
            transport,
            base_url: ARXIV_API_URL.to_string(),
            delay,
            retry: RetryPolicy::default(),
            cache,
            last_request: Mutex::new(None),
        }
    }

    pub fn with_base_url(mut self, base: impl Into<String>) -> Self {
        self.base_url = base.into();
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    fn throttle(&self) {
        let mut last = self.last_request.lock().unwrap();
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.delay {
                std::thread::sleep(self.delay - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn get_cached(&self, stage: &str, url: &str) -> Result<Vec<u8>, FetchError> {
        let key = cache_key(stage, url.as_bytes());
        if let Some(bytes) = self.cache.get(stage, &key) {
            return Ok(bytes);
        }
        // Permanent misses are remembered so reruns do not ask again.
        let gone_key = format!("{key}.gone");
        if let Some(status) = self.cache.get(stage, &gone_key) {
            let status = String::from_utf8_lossy(&status).parse().unwrap_or(404);
            return Err(FetchError::Http {
                url: url.to_string(),
                status,
            });
        }
        let result = with_retries(self.retry, || {
            self.throttle();
            match self.transport.get(url) {
                Ok(r) if r.is_success() => Attempt::Done(r.body),
                Ok(r) => {
                    let err = FetchError::Http {
                        url: url.to_string(),
                        status: r.status,
                    };
                    if r.is_retryable() {
                        Attempt::Retry(err)
                    } else {
                        Attempt::Fail(err)
                    }
                }
                Err(e @ TransportError::Offline(_)) => Attempt::Fail(e.into()),
                Err(e) => Attempt::Retry(e.into()),
            }
        });
        if let Err(FetchError::Http {
            status: status @ (404 | 410),
            ..
        }) = &result
        {
            if let Err(e) = self
                .cache
                .put(stage, &gone_key, status.to_string().as_bytes())
            {
                tracing::warn!(error = %e, "failed to cache {stage} miss");
            }
        }
        let body = result?;
        if let Err(e) = self.cache.put(stage, &key, &body) {
            tracing::warn!(error = %e, "failed to cache {stage} response");
        }
        Ok(body)
    }
}

impl FeedSource for ArxivClient {
    fn fetch_feed(&self, keyword: &str, max_results: usize) -> Result<Vec<u8>, FetchError> {
        let url = build_query_at(&self.base_url, keyword, max_results);
        self.get_cached("fetch", &url)
    }
}

impl PdfSource for ArxivClient {
    fn fetch_pdf(&self, record: &PaperRecord) -> Result<Vec<u8>, FetchError> {
        if record.pdf_url.is_empty() {
            return Err(FetchError::NoPdf(record.arxiv_id.clone()));
        }
        self.get_cached("pdf", &record.pdf_url)
    }
}

/// File name used for a keyword's fixture feed: lowercase ASCII
/// alphanumerics joined by `-`, plus `.xml`.
pub fn keyword_slug(keyword: &str) -> String {
    let mut slug = String::new();
    for word in keyword
        .to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
    {
        if !slug.is_empty() {
            slug.push('-');
        }
        slug.push_str(word);
    }
    slug
}

/// Serves feeds from `<dir>/feeds/<slug>.xml` and PDFs from
/// `<dir>/pdfs/<id>.pdf` (with `/` in legacy ids replaced by `_`).
#[derive(Debug, Clone)]
pub struct FixtureFeeds {
    dir: PathBuf,
}

impl FixtureFeeds {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn read(&self, path: PathBuf) -> Result<Vec<u8>, FetchError> {
        std::fs::read(&path).map_err(|_| FetchError::MissingFixture(path))
    }
}

impl FeedSource for FixtureFeeds {
    fn fetch_feed(&self, keyword: &str, _max_results: usize) -> Result<Vec<u8>, FetchError> {
        self.read(
            self.dir
                .join("feeds")
                .join(format!("{}.xml", keyword_slug(keyword))),
        )
    }
}

impl PdfSource for FixtureFeeds {
    fn fetch_pdf(&self, record: &PaperRecord) -> Result<Vec<u8>, FetchError> {
        let name = record.arxiv_id.replace('/', "_");
        self.read(self.dir.join("pdfs").join(format!("{name}.pdf")))
    }
}

/// Fetches and parses one feed per keyword, keeping at most `max_per_keyword`
/// records from each and tagging them with their source keyword. The
/// result is the raw union; duplicates are left for [`super::dedup`].
pub fn fetch_all(
    source: &dyn FeedSource,
    keywords: &[String],
    max_per_keyword: usize,
) -> Result<Vec<PaperRecord>, FetchError> {
    let mut all = Vec::new();
    for keyword in keywords {
        let bytes = source.fetch_feed(keyword, max_per_keyword)?;
        let parsed = parse_atom_feed(&bytes).map_err(|source| FetchError::Feed {
            keyword: keyword.clone(),
            source,
        })?;
        tracing::info!(keyword, n = parsed.records.len(), "fetched feed");
        all.extend(
            parsed
                .records
                .into_iter()
                .take(max_per_keyword)
                .map(|mut r| {
                    r.source_keywords.insert(keyword.clone());
                    r
                }),
        );
    }
    Ok(all)
}
