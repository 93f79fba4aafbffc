//! Atom feed parsing for arXiv API responses.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::Deserialize;
use thiserror::Error;

use super::record::{split_entry_id, PaperRecord};

#[derive(Debug, Error)]
pub enum FeedError {
    #[error("malformed Atom feed: {0}")]
    FeedMalformed(String),
}

#[derive(Debug, Deserialize)]
struct Feed {
    #[serde(rename = "entry", default)]
    entries: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
struct Entry {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    summary: Option<String>,
    #[serde(rename = "author", default)]
    authors: Vec<Author>,
    #[serde(default)]
    published: Option<String>,
    #[serde(rename = "link", default)]
    links: Vec<Link>,
    #[serde(rename = "primary_category", alias = "arxiv:primary_category", default)]
    primary_category: Option<Category>,
}

#[derive(Debug, Deserialize)]
struct Author {
    #[serde(default)]
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Link {
    #[serde(rename = "@href", default)]
    href: Option<String>,
    #[serde(rename = "@type", default)]
    link_type: Option<String>,
    #[serde(rename = "@title", default)]
    title: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Category {
    #[serde(rename = "@term")]
    term: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedFeed {
    pub records: Vec<PaperRecord>,
    /// Entries dropped because they had no title.
    pub skipped: usize,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses an arXiv Atom response into one record per entry. Entries
/// without a title are skipped and counted.
pub fn parse_atom_feed(xml: &[u8]) -> Result<ParsedFeed, FeedError> {
    let text = std::str::from_utf8(xml).map_err(|e| FeedError::FeedMalformed(e.to_string()))?;
    let feed: Feed =
        quick_xml::de::from_str(text).map_err(|e| FeedError::FeedMalformed(e.to_string()))?;

    let mut parsed = ParsedFeed::default();
    for entry in feed.entries {
        let title = entry.title.as_deref().map(collapse_ws).unwrap_or_default();
        if title.is_empty() {
            parsed.skipped += 1;
            continue;
        }
        let (arxiv_id, version) = split_entry_id(entry.id.as_deref().unwrap_or(""));
        let pdf_url = entry
            .links
            .iter()
            .find(|l| l.link_type.as_deref() == Some("application/pdf"))
            .or_else(|| {
                entry
                    .links
                    .iter()
                    .find(|l| l.title.as_deref() == Some("pdf"))
            })
            .and_then(|l| l.href.clone())
            .unwrap_or_default();
        let published = entry
            .published
            .as_deref()
            .and_then(|p| DateTime::parse_from_rfc3339(p.trim()).ok())
            .map(|p| p.with_timezone(&Utc));
        parsed.records.push(PaperRecord {
            arxiv_id,
            version,
            title,
            abstract_text: entry
                .summary
                .as_deref()
                .map(collapse_ws)
                .unwrap_or_default(),
            authors: entry
                .authors
                .into_iter()
                .filter_map(|a| a.name.map(|n| collapse_ws(&n)))
                .filter(|n| !n.is_empty())
                .collect(),
            published,
            pdf_url,
            source_keywords: BTreeSet::new(),
            primary_category: entry.primary_category.map(|c| c.term),
        });
    }
    if parsed.skipped > 0 {
        tracing::warn!(
            skipped = parsed.skipped,
            "skipped feed entries without a title"
        );
    }
    Ok(parsed)
}
