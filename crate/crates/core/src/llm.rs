//! LLM transport: request/response types, a chat-completion HTTP client,
//! a transcript cache, and scripted/fixture clients for offline runs.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{cache_key_json, StageCache};
use crate::transport::{with_retries, Attempt, HttpTransport, RetryPolicy};

/// Which pipeline stage issued a request. Doubles as the cache subdirectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlmTask {
    Keywords,
    Summarize,
    TagIntent,
    TagContribution,
    Synthesize,
}

impl LlmTask {
    pub fn stage(self) -> &'static str {
        match self {
            LlmTask::Keywords => "keywords",
            LlmTask::Summarize => "summarize",
            LlmTask::TagIntent => "tag-intent",
            LlmTask::TagContribution => "tag-contribution",
            LlmTask::Synthesize => "synthesize",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub task: LlmTask,
    pub model_id: String,
    pub prompt: String,
    pub response_format_hint: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinishState {
    Complete,
    Truncated,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmResponse {
    /// Kept verbatim for audit.
    pub raw_text: String,
    pub finish_state: FinishState,
}

impl LlmResponse {
    pub fn complete(raw_text: impl Into<String>) -> Self {
        Self {
            raw_text: raw_text.into(),
            finish_state: FinishState::Complete,
        }
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("LLM unavailable: {0}")]
    Unavailable(String),
    #[error("no fixture response for task {0:?}")]
    NoFixture(LlmTask),
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError>;
}

impl<T: LlmClient + ?Sized> LlmClient for Arc<T> {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        (**self).complete(request)
    }
}

impl<T: LlmClient + ?Sized> LlmClient for &T {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        (**self).complete(request)
    }
}

/// Chat-completion style endpoint (`{"model", "messages"}` in,
/// `choices[0].message.content` out).
pub struct HttpLlmClient {
    transport: Arc<dyn HttpTransport>,
    url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl HttpLlmClient {
    pub fn new(
        transport: Arc<dyn HttpTransport>,
        url: impl Into<String>,
        api_key: Option<String>,
    ) -> Self {
        Self {
            transport,
            url: url.into(),
            api_key,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }
}

#[derive(Deserialize)]
struct ChatCompletion {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

fn finish_state(reason: Option<&str>) -> FinishState {
    match reason {
        Some("length") | Some("max_tokens") => FinishState::Truncated,
        Some("content_filter") | Some("safety") | Some("refusal") => FinishState::Refused,
        _ => FinishState::Complete,
    }
}

impl LlmClient for HttpLlmClient {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        let body = serde_json::json!({
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let mut headers = vec![("Content-Type".to_string(), "application/json".to_string())];
        if let Some(key) = &self.api_key {
            headers.push(("Authorization".to_string(), format!("Bearer {key}")));
        }
        let resp = with_retries(self.retry, || {
            match self.transport.post_json(&self.url, &headers, &body) {
                Ok(r) if r.is_success() => Attempt::Done(r),
                Ok(r) if r.is_retryable() => {
                    Attempt::Retry(LlmError::Unavailable(format!("HTTP {}", r.status)))
                }
                Ok(r) => Attempt::Fail(LlmError::Unavailable(format!(
                    "HTTP {}: {}",
                    r.status,
                    String::from_utf8_lossy(&r.body)
                ))),
                Err(e) => Attempt::Retry(LlmError::Unavailable(e.to_string())),
            }
        })?;
        let parsed: ChatCompletion = serde_json::from_slice(&resp.body)
            .map_err(|e| LlmError::Unavailable(format!("malformed completion body: {e}")))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| LlmError::Unavailable("completion has no choices".into()))?;
        Ok(LlmResponse {
            raw_text: choice.message.content.unwrap_or_default(),
            finish_state: finish_state(choice.finish_reason.as_deref()),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Transcript {
    request: LlmRequest,
    response: LlmResponse,
}

/// Records every request/response pair as a JSON transcript under
/// `<cache>/<task stage>/<key>` and replays it on identical requests.
pub struct CachedLlm<C> {
    inner: C,
    cache: StageCache,
}

impl<C: LlmClient> CachedLlm<C> {
    pub fn new(inner: C, cache: StageCache) -> Self {
        Self { inner, cache }
    }
}

impl<C: LlmClient> LlmClient for CachedLlm<C> {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        let stage = request.task.stage();
        let key = cache_key_json(stage, request);
        if let Some(t) = self.cache.get_json::<Transcript>(stage, &key) {
            return Ok(t.response);
        }
        let response = self.inner.complete(request)?;
        let transcript = Transcript {
            request: request.clone(),
            response: response.clone(),
        };
        if let Err(e) = self.cache.put_json(stage, &key, &transcript) {
            tracing::warn!(error = %e, "failed to write LLM transcript");
        }
        Ok(response)
    }
}

/// Replays canned responses in FIFO order and records the requests it saw.
#[derive(Default)]
pub struct ScriptedLlm {
    responses: Mutex<VecDeque<String>>,
    seen: Mutex<Vec<LlmRequest>>,
}

impl ScriptedLlm {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            responses: Mutex::new(responses.into_iter().map(Into::into).collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<LlmRequest> {
        self.seen.lock().unwrap().clone()
    }

    pub fn remaining(&self) -> usize {
        self.responses.lock().unwrap().len()
    }
}

impl LlmClient for ScriptedLlm {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        self.seen.lock().unwrap().push(request.clone());
        self.responses
            .lock()
            .unwrap()
            .pop_front()
            .map(LlmResponse::complete)
            .ok_or_else(|| LlmError::Unavailable("script exhausted".into()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureRule {
    pub task: LlmTask,
    /// Only match prompts containing this substring.
    #[serde(default)]
    pub contains: Option<String>,
    pub response: String,
}

/// Rule-based stand-in for an LLM: the first rule whose task matches and
/// whose `contains` substring occurs in the prompt supplies the response.
#[derive(Debug, Clone, Default)]
pub struct FixtureLlm {
    rules: Vec<FixtureRule>,
}

impl FixtureLlm {
    pub fn new(rules: Vec<FixtureRule>) -> Self {
        Self { rules }
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        let rules = serde_json::from_slice(&bytes).map_err(std::io::Error::other)?;
        Ok(Self { rules })
    }
}

impl LlmClient for FixtureLlm {
    fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        self.rules
            .iter()
            .find(|r| {
                r.task == request.task
                    && r.contains
                        .as_deref()
                        .is_none_or(|needle| request.prompt.contains(needle))
            })
            .map(|r| LlmResponse::complete(r.response.clone()))
            .ok_or(LlmError::NoFixture(request.task))
    }
}
