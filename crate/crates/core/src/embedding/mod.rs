//! Embedding providers behind one [`Embedder`] interface: native TF-IDF and
//! remote transformer services.

mod remote;
mod tfidf;
mod vector;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use remote::{embed_remote, RemoteEmbedder};
pub use tfidf::{fit_tfidf, tfidf_transform, tokenize, TfidfEmbedder, TfidfModel};
pub use vector::EmbeddingVector;

use crate::arxiv::PaperRecord;
use crate::query::InputQuery;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding vector is empty")]
    EmptyVector,
    #[error("embedding contains non-finite values")]
    NonFinite,
    #[error("cannot fit TF-IDF on an empty corpus")]
    EmptyCorpus,
    #[error("no texts to embed")]
    EmptyInput,
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider returned {got} vectors for {expected} texts")]
    PartialResponse { expected: usize, got: usize },
    #[error("embedding provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("provider `{0}` needs an endpoint (set EMBEDDING_API_URL)")]
    MissingEndpoint(String),
}

pub trait Embedder {
    fn provider_id(&self) -> &str;

    /// One vector per input text, in input order.
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    Tfidf,
    Minilm,
    Specter2,
    RemoteCustom,
}

impl ProviderKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tfidf" | "tf-idf" => Some(Self::Tfidf),
            "minilm" | "all-minilm-l6-v2" => Some(Self::Minilm),
            "specter2" => Some(Self::Specter2),
            "remote-custom" => Some(Self::RemoteCustom),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tfidf => "tfidf",
            Self::Minilm => "minilm",
            Self::Specter2 => "specter2",
            Self::RemoteCustom => "remote-custom",
        }
    }

    pub fn is_remote(self) -> bool {
        self != Self::Tfidf
    }

    pub fn default_dim(self) -> Option<usize> {
        match self {
            Self::Minilm => Some(384),
            Self::Specter2 => Some(768),
            _ => None,
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderDescriptor {
    pub provider_id: String,
    pub endpoint: Option<String>,
    pub expected_dim: Option<usize>,
}

impl ProviderDescriptor {
    /// Remote endpoints are `<base>/<provider_id>`.
    pub fn for_kind(kind: ProviderKind, embedding_api_url: Option<&str>) -> Self {
        let endpoint = if kind.is_remote() {
            embedding_api_url
                .map(|base| format!("{}/{}", base.trim_end_matches('/'), kind.as_str()))
        } else {
            None
        };
        Self {
            provider_id: kind.as_str().to_string(),
            endpoint,
            expected_dim: kind.default_dim(),
        }
    }

    pub fn kind(&self) -> Option<ProviderKind> {
        ProviderKind::parse(&self.provider_id)
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let remote = self.kind().is_none_or(ProviderKind::is_remote);
        if remote && self.endpoint.is_none() {
            return Err(EmbedError::MissingEndpoint(self.provider_id.clone()));
        }
        Ok(())
    }
}

fn compose_text(title: &str, abstract_text: &str) -> String {
    format!("{}\n{}", title.trim(), abstract_text.trim())
}

/// Text embedded for the target paper: trimmed title, newline, abstract.
pub fn query_text(query: &InputQuery) -> String {
    compose_text(&query.title, &query.abstract_text)
}

/// Same composition rule applied to a candidate paper.
pub fn paper_text(record: &PaperRecord) -> String {
    compose_text(&record.title, &record.abstract_text)
}
