use std::collections::BTreeSet;
use std::sync::LazyLock;

use chrono::{DateTime, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};

static MODERN_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d{4}\.\d{4,5}$").unwrap());
static LEGACY_ID: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[a-z][a-z\-]*(?:\.[A-Za-z\-]+)?/\d{7}$").unwrap());
static VERSION_SUFFIX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(.*?)v(\d+)$").unwrap());

/// True for modern (`2401.01234`) and legacy (`hep-th/9901001`) identifiers
/// without a version suffix.
pub fn is_valid_arxiv_id(id: &str) -> bool {
    MODERN_ID.is_match(id) || LEGACY_ID.is_match(id)
}

/// Splits an Atom entry identifier such as
/// `http://arxiv.org/abs/2401.01234v3` into `("2401.01234", 3)`.
/// Identifiers without a version suffix are version 1.
pub fn split_entry_id(raw: &str) -> (String, u32) {
    let raw = raw.trim();
    let tail = raw
        .find("/abs/")
        .map(|i| &raw[i + 5..])
        .unwrap_or_else(|| raw.strip_prefix("arXiv:").unwrap_or(raw));
    if let Some(caps) = VERSION_SUFFIX.captures(tail) {
        let base = caps.get(1).unwrap().as_str();
        if let Ok(v) = caps[2].parse::<u32>() {
            if v >= 1 && is_valid_arxiv_id(base) {
                return (base.to_string(), v);
            }
        }
    }
    (tail.to_string(), 1)
}

/// Metadata of one fetched arXiv paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub arxiv_id: String,
    pub version: u32,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub authors: Vec<String>,
    pub published: Option<DateTime<Utc>>,
    pub pdf_url: String,
    pub source_keywords: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_category: Option<String>,
}

impl PaperRecord {
    pub fn has_valid_id(&self) -> bool {
        is_valid_arxiv_id(&self.arxiv_id)
    }

    pub fn year(&self) -> Option<i32> {
        use chrono::Datelike;
        self.published.map(|p| p.year())
    }

    pub fn abs_url(&self) -> String {
        format!("https://arxiv.org/abs/{}", self.arxiv_id)
    }
}
