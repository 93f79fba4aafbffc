//! Automated literature review over arXiv: keyword generation, retrieval,
//! embedding-based relevance filtering with an adaptive IQR threshold,
//! section-aware LLM summarization, tagging, BibTeX and review synthesis.

pub mod analysis;
pub mod arxiv;
pub mod bench;
pub mod cache;
pub mod config;
pub mod embedding;
pub mod keywords;
pub mod llm;
pub mod pipeline;
pub mod prompts;
pub mod query;
pub mod relevance;
pub mod sections;
pub mod synthesis;
pub mod transport;
