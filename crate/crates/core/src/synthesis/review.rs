//! Literature-review synthesis with citation validation.

use std::collections::{BTreeSet, HashSet};
use std::sync::LazyLock;

use regex::{Captures, Regex};
use serde::Serialize;
use thiserror::Error;

use super::bibtex::BibEntry;
use crate::analysis::{CitationIntent, ContributionType, StructuredSummary};
use crate::llm::{LlmClient, LlmError, LlmRequest, LlmTask};
use crate::prompts;

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("no analysed papers to review")]
    EmptyCorpus,
    #[error(transparent)]
    Llm(#[from] LlmError),
}

/// Everything the review prompt needs about one retained paper.
#[derive(Debug, Clone)]
pub struct ReviewItem {
    pub bib_key: String,
    pub title: String,
    pub summary: StructuredSummary,
    pub intent: CitationIntent,
    pub contribution: ContributionType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewDocument {
    /// Markdown with `[@key]` citations.
    pub body: String,
    pub cited_keys: BTreeSet<String>,
    pub warnings: Vec<String>,
}

static CITE_GROUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[(\s*@[^\[\]]*)\]").unwrap());
static CITE_KEY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@([A-Za-z0-9_:\-]+)").unwrap());

/// Keys cited as `[@key]` or `[@a; @b]`, in order of first appearance.
pub fn extract_citations(body: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for group in CITE_GROUP.captures_iter(body) {
        for key in CITE_KEY.captures_iter(&group[1]) {
            if seen.insert(key[1].to_string()) {
                out.push(key[1].to_string());
            }
        }
    }
    out
}

/// Removes citations whose key is not in `known`; groups left empty are
/// dropped together with a preceding space.
pub fn strip_unknown_citations(body: &str, known: &HashSet<&str>) -> String {
    let replaced = CITE_GROUP.replace_all(body, |caps: &Captures| {
        let kept: Vec<String> = CITE_KEY
            .captures_iter(&caps[1])
            .filter(|k| known.contains(&k[1]))
            .map(|k| format!("@{}", &k[1]))
            .collect();
        if kept.is_empty() {
            "\u{0}".to_string()
        } else {
            format!("[{}]", kept.join("; "))
        }
    });
    replaced.replace(" \u{0}", "").replace('\u{0}', "")
}

fn paper_block(item: &ReviewItem) -> String {
    format!(
        "### [@{}] {}\nIntent: {}\nContribution: {}\n{}",
        item.bib_key,
        item.title,
        item.intent,
        item.contribution,
        item.summary.to_outline()
    )
}

fn request(model_id: &str, prompt: String) -> LlmRequest {
    LlmRequest {
        task: LlmTask::Synthesize,
        model_id: model_id.to_string(),
        prompt,
        response_format_hint: "markdown".to_string(),
    }
}

/// Asks the LLM for a review of `items`. Citations to keys outside the
/// bibliography trigger one corrective re-prompt; any that remain are
/// stripped and reported in `warnings`.
pub fn synthesize_review(
    topic: &str,
    items: &[ReviewItem],
    bibliography: &[BibEntry],
    llm: &dyn LlmClient,
    model_id: &str,
) -> Result<ReviewDocument, ReviewError> {
    if items.is_empty() {
        return Err(ReviewError::EmptyCorpus);
    }
    let mut ordered: Vec<&ReviewItem> = items.iter().collect();
    ordered.sort_by(|a, b| {
        a.contribution
            .cmp(&b.contribution)
            .then(a.bib_key.cmp(&b.bib_key))
    });
    let papers = ordered
        .iter()
        .map(|i| paper_block(i))
        .collect::<Vec<_>>()
        .join("\n");
    let prompt = prompts::render(
        prompts::SYNTHESIZE,
        &[("topic", topic), ("papers", &papers)],
    );

    let known: HashSet<&str> = bibliography.iter().map(|e| e.key.as_str()).collect();
    let unknown_in = |body: &str| -> Vec<String> {
        extract_citations(body)
            .into_iter()
            .filter(|k| !known.contains(k.as_str()))
            .collect()
    };

    let mut body = llm.complete(&request(model_id, prompt.clone()))?.raw_text;
    let mut warnings = Vec::new();
    let unknown = unknown_in(&body);
    if !unknown.is_empty() {
        tracing::warn!(?unknown, "review cites unknown keys, re-prompting");
        let mut valid: Vec<&str> = known.iter().copied().collect();
        valid.sort_unstable();
        let retry = format!(
            "{prompt}\n\nYour previous draft cited keys that do not exist: {}. Rewrite the review citing only these keys: {}.\n",
            unknown.iter().map(|k| format!("[@{k}]")).collect::<Vec<_>>().join(", "),
            valid.iter().map(|k| format!("[@{k}]")).collect::<Vec<_>>().join(", "),
        );
        body = llm.complete(&request(model_id, retry))?.raw_text;
        let still = unknown_in(&body);
        if !still.is_empty() {
            for k in &still {
                warnings.push(format!("removed citation to unknown key `{k}`"));
            }
            body = strip_unknown_citations(&body, &known);
        }
    }
    let cited_keys = extract_citations(&body).into_iter().collect();
    Ok(ReviewDocument {
        body: body.trim().to_string(),
        cited_keys,
        warnings,
    })
}
