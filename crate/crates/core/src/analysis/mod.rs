//! LLM-driven structured summaries and citation/contribution tagging.

mod repair;
mod summary;
mod tags;

use thiserror::Error;

pub use repair::{repair_json, NoJsonFound};
pub use summary::{parse_summary, summarize, StructuredSummary};
pub use tags::{normalize_label, tag_contribution, tag_intent, CitationIntent, ContributionType};

use crate::llm::LlmError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("summary for {arxiv_id} violates the schema: {message}")]
    SchemaViolation { arxiv_id: String, message: String },
    #[error("paper {0} has no text to summarize")]
    NoContent(String),
    #[error(transparent)]
    Llm(#[from] LlmError),
}
