//! Blocking HTTP transport shared by the arXiv, embedding and LLM clients.
//!
//! Every outbound request goes through [`HttpTransport`], which lets tests
//! swap in [`MockTransport`] and count traffic with [`CountingTransport`].

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        Self {
            status: 200,
            body: body.into(),
        }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    /// 5xx and 429 are worth retrying; other failures are not.
    pub fn is_retryable(&self) -> bool {
        self.status >= 500 || self.status == 429
    }
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("network error for {url}: {message}")]
    Network { url: String, message: String },
    #[error("offline mode: refusing request to {0}")]
    Offline(String),
}

pub trait HttpTransport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;

    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError>;
}

impl<T: HttpTransport + ?Sized> HttpTransport for Arc<T> {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        (**self).get(url)
    }

    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError> {
        (**self).post_json(url, headers, body)
    }
}

/// Real network transport backed by `ureq`.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent(concat!("litsift/", env!("CARGO_PKG_VERSION")))
            .build();
        Self {
            agent: ureq::Agent::new_with_config(config),
        }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(60))
    }
}

fn network_err(url: &str, e: impl std::fmt::Display) -> TransportError {
    TransportError::Network {
        url: url.to_string(),
        message: e.to_string(),
    }
}

impl HttpTransport for UreqTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let mut resp = self
            .agent
            .get(url)
            .call()
            .map_err(|e| network_err(url, e))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(256 * 1024 * 1024)
            .read_to_vec()
            .map_err(|e| network_err(url, e))?;
        Ok(HttpResponse { status, body })
    }

    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError> {
        let mut req = self.agent.post(url);
        for (name, value) in headers {
            req = req.header(name.as_str(), value.as_str());
        }
        let mut resp = req.send_json(body).map_err(|e| network_err(url, e))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_vec()
            .map_err(|e| network_err(url, e))?;
        Ok(HttpResponse { status, body })
    }
}

/// Rejects every request. Used for `--offline` runs so a cache miss surfaces
/// as an error instead of silent network traffic.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl HttpTransport for OfflineTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        Err(TransportError::Offline(url.to_string()))
    }

    fn post_json(
        &self,
        url: &str,
        _headers: &[(String, String)],
        _body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError> {
        Err(TransportError::Offline(url.to_string()))
    }
}

/// Wraps a transport and counts every request handed to it.
pub struct CountingTransport<T> {
    inner: T,
    count: AtomicUsize,
}

impl<T> CountingTransport<T> {
    pub fn new(inner: T) -> Self {
        Self {
            inner,
            count: AtomicUsize::new(0),
        }
    }

    pub fn requests(&self) -> usize {
        self.count.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::SeqCst);
    }
}

impl<T: HttpTransport> HttpTransport for CountingTransport<T> {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        self.count.fetch_add(1, Ordering::SeqCst);
        self.inner.get(url)
    }

    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError> {
        self.count.fetch_add(1, Ordering::SeqCst);
        self.inner.post_json(url, headers, body)
    }
}

type Responder = Box<dyn Fn(&str, Option<&serde_json::Value>) -> HttpResponse + Send + Sync>;

/// In-process fake server. Routes are matched by URL prefix, longest first;
/// unmatched requests get a 404.
#[derive(Default)]
pub struct MockTransport {
    routes: Vec<(String, Responder)>,
    log: Mutex<Vec<String>>,
}

impl MockTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn route<F>(mut self, prefix: impl Into<String>, responder: F) -> Self
    where
        F: Fn(&str, Option<&serde_json::Value>) -> HttpResponse + Send + Sync + 'static,
    {
        self.routes.push((prefix.into(), Box::new(responder)));
        self.routes.sort_by_key(|r| std::cmp::Reverse(r.0.len()));
        self
    }

    /// Serves fixed bodies keyed by exact URL.
    pub fn with_static(mut self, pages: HashMap<String, Vec<u8>>) -> Self {
        for (url, body) in pages {
            self = self.route(url, move |_, _| HttpResponse::ok(body.clone()));
        }
        self
    }

    pub fn requested_urls(&self) -> Vec<String> {
        self.log.lock().unwrap().clone()
    }

    fn dispatch(&self, url: &str, body: Option<&serde_json::Value>) -> HttpResponse {
        self.log.lock().unwrap().push(url.to_string());
        for (prefix, responder) in &self.routes {
            if url.starts_with(prefix.as_str()) {
                return responder(url, body);
            }
        }
        HttpResponse {
            status: 404,
            body: Vec::new(),
        }
    }
}

impl HttpTransport for MockTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        Ok(self.dispatch(url, None))
    }

    fn post_json(
        &self,
        url: &str,
        _headers: &[(String, String)],
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportError> {
        Ok(self.dispatch(url, Some(body)))
    }
}

/// Retry schedule: `max_retries` additional attempts after the first, with
/// the delay doubling from `base_delay`.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            base_delay: Duration::ZERO,
        }
    }

    pub fn immediate(max_retries: u32) -> Self {
        Self {
            max_retries,
            base_delay: Duration::ZERO,
        }
    }

    pub fn delay_for(&self, attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1u32 << attempt.min(16))
    }
}

/// Outcome of a single attempt inside [`with_retries`].
pub(crate) enum Attempt<T, E> {
    Done(T),
    Retry(E),
    Fail(E),
}

pub(crate) fn with_retries<T, E>(
    policy: RetryPolicy,
    mut attempt: impl FnMut() -> Attempt<T, E>,
) -> Result<T, E> {
    let mut n = 0;
    loop {
        match attempt() {
            Attempt::Done(v) => return Ok(v),
            Attempt::Fail(e) => return Err(e),
            Attempt::Retry(e) => {
                if n >= policy.max_retries {
                    return Err(e);
                }
                let delay = policy.delay_for(n);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
                n += 1;
            }
        }
    }
}
