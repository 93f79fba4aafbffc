//! HTTP client for transformer embedding services.
//!
//! Wire format: `POST {"texts": [...]}` answered by `{"vectors": [[...], ...]}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EmbedError, Embedder, EmbeddingVector, ProviderDescriptor};
use crate::cache::{cache_key_json, StageCache};
use crate::transport::{with_retries, Attempt, HttpTransport, RetryPolicy, TransportError};

const BATCH: usize = 64;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct CachePayload<'a> {
    provider_id: &'a str,
    texts: &'a [String],
}

pub struct RemoteEmbedder {
    descriptor: ProviderDescriptor,
    transport: Arc<dyn HttpTransport>,
    cache: StageCache,
    retry: RetryPolicy,
}

impl RemoteEmbedder {
    pub fn new(
        descriptor: ProviderDescriptor,
        transport: Arc<dyn HttpTransport>,
        cache: StageCache,
    ) -> Result<Self, EmbedError> {
        descriptor.validate()?;
        Ok(Self {
            descriptor,
            transport,
            cache,
            retry: RetryPolicy::default(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    fn call(&self, endpoint: &str, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let body = serde_json::to_value(EmbedRequest { texts }).expect("plain data");
        let headers = [("Content-Type".to_string(), "application/json".to_string())];
        let resp = with_retries(self.retry, || {
            match self.transport.post_json(endpoint, &headers, &body) {
                Ok(r) if r.is_success() => Attempt::Done(r),
                Ok(r) if r.is_retryable() => Attempt::Retry(EmbedError::ProviderUnavailable(
                    format!("HTTP {}", r.status),
                )),
                Ok(r) => Attempt::Fail(EmbedError::ProviderUnavailable(format!(
                    "HTTP {}",
                    r.status
                ))),
                Err(e @ TransportError::Offline(_)) => {
                    Attempt::Fail(EmbedError::ProviderUnavailable(e.to_string()))
                }
                Err(e) => Attempt::Retry(EmbedError::ProviderUnavailable(e.to_string())),
            }
        })?;
        let parsed: EmbedResponse = serde_json::from_slice(&resp.body)
            .map_err(|e| EmbedError::ProviderUnavailable(format!("malformed response: {e}")))?;
        Ok(parsed.vectors)
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let key = cache_key_json(
            "embed",
            &CachePayload {
                provider_id: &self.descriptor.provider_id,
                texts,
            },
        );
        let raw = match self.cache.get_json::<Vec<Vec<f64>>>("embed", &key) {
            Some(v) => v,
            None => {
                let endpoint = self.descriptor.endpoint.as_deref().expect("validated");
                let v = self.call(endpoint, texts)?;
                self.check(texts.len(), &v)?;
                if let Err(e) = self.cache.put_json("embed", &key, &v) {
                    tracing::warn!(error = %e, "failed to cache embeddings");
                }
                v
            }
        };
        self.check(texts.len(), &raw)?;
        raw.into_iter().map(EmbeddingVector::new).collect()
    }

    fn check(&self, expected: usize, vectors: &[Vec<f64>]) -> Result<(), EmbedError> {
        if vectors.len() != expected {
            return Err(EmbedError::PartialResponse {
                expected,
                got: vectors.len(),
            });
        }
        let want = self
            .descriptor
            .expected_dim
            .or_else(|| vectors.first().map(Vec::len));
        if let Some(want) = want {
            if let Some(bad) = vectors.iter().find(|v| v.len() != want) {
                return Err(EmbedError::DimensionMismatch {
                    expected: want,
                    got: bad.len(),
                });
            }
        }
        Ok(())
    }
}

impl Embedder for RemoteEmbedder {
    fn provider_id(&self) -> &str {
        &self.descriptor.provider_id
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::EmptyInput);
        }
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(BATCH) {
            out.extend(self.embed_batch(chunk)?);
        }
        Ok(out)
    }
}

/// Convenience wrapper matching the one-shot operation signature.
pub fn embed_remote(
    descriptor: &ProviderDescriptor,
    transport: Arc<dyn HttpTransport>,
    texts: &[String],
) -> Result<Vec<EmbeddingVector>, EmbedError> {
    RemoteEmbedder::new(descriptor.clone(), transport, StageCache::disabled())?.embed(texts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::ProviderKind;
    use crate::transport::{CountingTransport, HttpResponse, MockTransport};

    /// Fake service: each text maps to a deterministic vector of `dim`
    /// values derived from its bytes; `drop_last` simulates a short reply.
    fn service(dim: usize, drop_last: bool) -> MockTransport {
        MockTransport::new().route("http://embed.test/", move |_, body| {
            let texts = body.unwrap()["texts"].as_array().unwrap().clone();
            let mut vectors: Vec<Vec<f64>> = texts
                .iter()
                .map(|t| {
                    let s = t.as_str().unwrap();
                    (0..dim)
                        .map(|i| (s.len() + i) as f64 + s.bytes().map(f64::from).sum::<f64>())
                        .collect()
                })
                .collect();
            if drop_last {
                vectors.pop();
            }
            HttpResponse::ok(
                serde_json::to_vec(&serde_json::json!({ "vectors": vectors })).unwrap(),
            )
        })
    }

    fn minilm() -> ProviderDescriptor {
        ProviderDescriptor::for_kind(ProviderKind::Minilm, Some("http://embed.test"))
    }

    fn texts(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_texts_give_384_dim_vectors() {
        let out = embed_remote(
            &minilm(),
            Arc::new(service(384, false)),
            &texts(&["a", "b", "c"]),
        )
        .unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|v| v.dim() == 384));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            embed_remote(&minilm(), Arc::new(service(384, false)), &[]),
            Err(EmbedError::EmptyInput)
        ));
    }

    #[test]
    fn short_reply_is_partial() {
        assert!(matches!(
            embed_remote(
                &minilm(),
                Arc::new(service(384, true)),
                &texts(&["a", "b", "c"])
            ),
            Err(EmbedError::PartialResponse {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn declared_dimension_enforced() {
        assert!(matches!(
            embed_remote(&minilm(), Arc::new(service(16, false)), &texts(&["a"])),
            Err(EmbedError::DimensionMismatch {
                expected: 384,
                got: 16
            })
        ));
    }

    #[test]
    fn permutation_of_inputs_permutes_outputs() {
        let t: Arc<dyn HttpTransport> = Arc::new(service(384, false));
        let fwd = embed_remote(&minilm(), t.clone(), &texts(&["alpha", "beta", "gamma"])).unwrap();
        let rev = embed_remote(&minilm(), t, &texts(&["gamma", "alpha", "beta"])).unwrap();
        assert_eq!(fwd[0], rev[1]);
        assert_eq!(fwd[1], rev[2]);
        assert_eq!(fwd[2], rev[0]);
    }

    #[test]
    fn cached_batches_skip_network() {
        let dir = tempfile::tempdir().unwrap();
        let t = Arc::new(CountingTransport::new(service(384, false)));
        let e = RemoteEmbedder::new(minilm(), t.clone(), StageCache::new(dir.path())).unwrap();
        let many: Vec<String> = (0..100).map(|i| format!("text {i}")).collect();
        let a = e.embed(&many).unwrap();
        assert_eq!(t.requests(), 2);
        let b = e.embed(&many).unwrap();
        assert_eq!(t.requests(), 2);
        assert_eq!(a, b);
    }

    #[test]
    fn unavailable_after_retries() {
        let t = Arc::new(CountingTransport::new(MockTransport::new()));
        let e = RemoteEmbedder::new(minilm(), t.clone(), StageCache::disabled())
            .unwrap()
            .with_retry(RetryPolicy::immediate(2));
        assert!(matches!(
            e.embed(&texts(&["a"])),
            Err(EmbedError::ProviderUnavailable(_))
        ));
        assert_eq!(t.requests(), 1, "404 is not retried");
    }
}
