//! Search keyword generation from the target paper's title and abstract.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::llm::{LlmClient, LlmError, LlmRequest, LlmTask};
use crate::prompts;
use crate::query::InputQuery;

#[derive(Debug, Error)]
pub enum KeywordError {
    #[error("LLM returned {got} usable keywords, need at least {min}")]
    InsufficientKeywords { got: usize, min: usize },
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub keywords: Vec<String>,
}

static LIST_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:[-*•+]\s+|\(?\d{1,3}(?:\)|\.\s|\.$)\s*|#+\s+)").unwrap());

const QUOTES: &[char] = &['"', '\'', '`', '“', '”', '‘', '’', '*'];

fn clean_item(item: &str) -> Option<String> {
    let item = item.trim();
    let item = LIST_MARKER.replace(item, "");
    let item = item
        .trim()
        .trim_matches(QUOTES)
        .trim()
        .trim_end_matches(['.', ';'])
        .trim_matches(QUOTES)
        .trim();
    // Preamble lines such as "Here are the keywords:".
    if item.is_empty() || item.ends_with(':') {
        return None;
    }
    Some(item.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Splits an LLM reply into keyword candidates. Handles numbered and
/// bulleted lists as well as comma-separated lines; deduplicates
/// case-insensitively keeping the first spelling.
pub fn parse_keyword_response(raw: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for line in raw.lines() {
        let line = LIST_MARKER.replace(line.trim(), "");
        for piece in line.split(',') {
            if let Some(kw) = clean_item(piece) {
                if seen.insert(kw.to_lowercase()) {
                    out.push(kw);
                }
            }
        }
    }
    out
}

fn request(config: &PipelineConfig, prompt: String) -> LlmRequest {
    LlmRequest {
        task: LlmTask::Keywords,
        model_id: config.llm_model_id.clone(),
        prompt,
        response_format_hint: "numbered-list".to_string(),
    }
}

/// Asks the LLM for keywords, clamping to `keyword_max` and retrying once
/// with an explicit count reminder when fewer than `keyword_min` come back.
pub fn generate_keywords(
    query: &InputQuery,
    llm: &dyn LlmClient,
    config: &PipelineConfig,
) -> Result<KeywordSet, KeywordError> {
    let (min, max) = (
        config.keyword_min.to_string(),
        config.keyword_max.to_string(),
    );
    let prompt = prompts::render(
        prompts::KEYWORDS,
        &[
            ("min", &min),
            ("max", &max),
            ("title", &query.title),
            ("abstract", &query.abstract_text),
        ],
    );
    let mut keywords =
        parse_keyword_response(&llm.complete(&request(config, prompt.clone()))?.raw_text);
    if keywords.len() < config.keyword_min {
        tracing::warn!(got = keywords.len(), "too few keywords, re-prompting once");
        let retry = format!(
            "{prompt}\nYour previous answer contained only {} usable keywords. Return between {min} and {max} keywords.\n",
            keywords.len()
        );
        keywords = parse_keyword_response(&llm.complete(&request(config, retry))?.raw_text);
    }
    if keywords.len() < config.keyword_min {
        return Err(KeywordError::InsufficientKeywords {
            got: keywords.len(),
            min: config.keyword_min,
        });
    }
    keywords.truncate(config.keyword_max);
    Ok(KeywordSet { keywords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::ScriptedLlm;
    use proptest::prelude::*;

    fn query() -> InputQuery {
        InputQuery::new(
            "Semantic Literature Review",
            "We rank arXiv papers by cosine similarity.",
        )
        .unwrap()
    }

    #[test]
    fn comma_separated() {
        assert_eq!(parse_keyword_response("a, b, c"), ["a", "b", "c"]);
    }

    #[test]
    fn case_insensitive_dedup_keeps_first() {
        assert_eq!(
            parse_keyword_response("- Alpha\n- alpha\n- Beta"),
            ["Alpha", "Beta"]
        );
    }

    #[test]
    fn numbering_and_quotes_stripped() {
        assert_eq!(
            parse_keyword_response("1) graph neural networks\n2) \"node embeddings\""),
            ["graph neural networks", "node embeddings"]
        );
    }

    #[test]
    fn preamble_and_markdown_dropped() {
        let raw = "Here are the keywords:\n\n1. **semantic search**\n2. `3D reconstruction`.\n* GPT-2.0 models";
        assert_eq!(
            parse_keyword_response(raw),
            ["semantic search", "3D reconstruction", "GPT-2.0 models"]
        );
    }

    #[test]
    fn seven_listed_keywords_in_order() {
        let llm = ScriptedLlm::new([
            "1. semantic search\n2. embeddings\n3. ranking\n4. arxiv\n5. cosine similarity\n6. retrieval\n7. thresholding",
        ]);
        let set = generate_keywords(&query(), &llm, &PipelineConfig::default()).unwrap();
        assert_eq!(
            set.keywords,
            [
                "semantic search",
                "embeddings",
                "ranking",
                "arxiv",
                "cosine similarity",
                "retrieval",
                "thresholding"
            ]
        );
        let prompt = &llm.requests()[0].prompt;
        assert!(prompt.contains("Semantic Literature Review"));
        assert!(prompt.contains("We rank arXiv papers by cosine similarity."));
    }

    #[test]
    fn twelve_items_clamped_to_ten() {
        let raw: String = (1..=12).map(|i| format!("{i}. kw{i}\n")).collect();
        let llm = ScriptedLlm::new([raw]);
        let set = generate_keywords(&query(), &llm, &PipelineConfig::default()).unwrap();
        assert_eq!(set.keywords.len(), 10);
        assert_eq!(set.keywords[0], "kw1");
        assert_eq!(set.keywords[9], "kw10");
    }

    #[test]
    fn under_delivery_twice_fails() {
        let llm = ScriptedLlm::new(["a, b, c", "a, b, c"]);
        let err = generate_keywords(&query(), &llm, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            KeywordError::InsufficientKeywords { got: 3, min: 5 }
        ));
        let reqs = llm.requests();
        assert_eq!(reqs.len(), 2);
        assert!(reqs[1].prompt.contains("Return between 5 and 10 keywords"));
    }

    #[test]
    fn retry_can_recover() {
        let llm = ScriptedLlm::new(["a, b", "a, b, c, d, e, f"]);
        let set = generate_keywords(&query(), &llm, &PipelineConfig::default()).unwrap();
        assert_eq!(set.keywords.len(), 6);
    }

    #[test]
    fn transport_failure_propagates() {
        let llm = ScriptedLlm::new(Vec::<String>::new());
        assert!(matches!(
            generate_keywords(&query(), &llm, &PipelineConfig::default()),
            Err(KeywordError::Llm(_))
        ));
    }

    proptest! {
        #[test]
        fn parsed_items_are_distinct_and_trimmed(raw in "[ a-zA-Z0-9,.\\-*\"\n]{0,200}") {
            let items = parse_keyword_response(&raw);
            let mut folded = HashSet::new();
            for item in &items {
                prop_assert!(!item.is_empty());
                prop_assert_eq!(item.trim(), item.as_str());
                prop_assert!(folded.insert(item.to_lowercase()));
            }
        }
    }
}
