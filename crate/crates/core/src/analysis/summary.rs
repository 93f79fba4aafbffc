//! Four-category bullet summaries under a top-level `summary` key.

use serde::{Deserialize, Serialize};

use super::repair::repair_json;
use super::AnalysisError;
use crate::arxiv::PaperRecord;
use crate::llm::{LlmClient, LlmRequest, LlmTask};
use crate::prompts;
use crate::sections::SectionedPaper;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredSummary {
    pub problem_statement: Vec<String>,
    pub methodology: Vec<String>,
    pub key_findings: Vec<String>,
    pub conclusion_recommendations: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    summary: StructuredSummary,
}

impl StructuredSummary {
    pub fn categories(&self) -> [(&'static str, &[String]); 4] {
        [
            ("problem_statement", &self.problem_statement),
            ("methodology", &self.methodology),
            ("key_findings", &self.key_findings),
            (
                "conclusion_recommendations",
                &self.conclusion_recommendations,
            ),
        ]
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, bullets) in self.categories() {
            if bullets.is_empty() {
                return Err(format!("`{name}` must contain at least one bullet"));
            }
            if bullets.iter().any(|b| b.trim().is_empty()) {
                return Err(format!("`{name}` contains an empty bullet"));
            }
        }
        Ok(())
    }

    /// JSON document in the wire shape: `{"summary": {...}}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Envelope {
            summary: self.clone(),
        })
        .expect("plain data")
    }

    /// Plain-text rendering used inside downstream prompts.
    pub fn to_outline(&self) -> String {
        let mut out = String::new();
        for (name, bullets) in self.categories() {
            out.push_str(name);
            out.push_str(":\n");
            for b in bullets {
                out.push_str("- ");
                out.push_str(b.trim());
                out.push('\n');
            }
        }
        out
    }
}

/// Strict parse of an LLM reply: fences/prose stripped, exactly the four
/// categories under `summary`, no empty lists or bullets.
pub fn parse_summary(raw: &str) -> Result<StructuredSummary, String> {
    let json = repair_json(raw).map_err(|e| e.to_string())?;
    let envelope: Envelope = serde_json::from_str(json).map_err(|e| e.to_string())?;
    envelope.summary.validate()?;
    Ok(envelope.summary)
}

fn section_block(sections: &SectionedPaper) -> String {
    sections
        .present()
        .map(|(kind, text)| format!("## {}\n{}\n", kind.label(), text.trim()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Summarizes the available sections. One repair re-prompt carrying the
/// validator's message is allowed before giving up with `SchemaViolation`.
pub fn summarize(
    record: &PaperRecord,
    sections: &SectionedPaper,
    llm: &dyn LlmClient,
    model_id: &str,
) -> Result<StructuredSummary, AnalysisError> {
    if sections.is_empty() {
        return Err(AnalysisError::NoContent(record.arxiv_id.clone()));
    }
    let prompt = prompts::render(
        prompts::SUMMARIZE,
        &[
            ("arxiv_id", &record.arxiv_id),
            ("title", &record.title),
            ("sections", &section_block(sections)),
        ],
    );
    let request = |prompt: String| LlmRequest {
        task: LlmTask::Summarize,
        model_id: model_id.to_string(),
        prompt,
        response_format_hint: "json:summary".to_string(),
    };
    let first = llm.complete(&request(prompt.clone()))?;
    let error = match parse_summary(&first.raw_text) {
        Ok(s) => return Ok(s),
        Err(e) => e,
    };
    tracing::warn!(id = %record.arxiv_id, %error, "summary rejected, re-prompting");
    let retry = format!(
        "{prompt}\n\nYour previous response was rejected: {error}\nRespond again with only the JSON object in exactly the structure shown above.\n"
    );
    let second = llm.complete(&request(retry))?;
    parse_summary(&second.raw_text).map_err(|e| AnalysisError::SchemaViolation {
        arxiv_id: record.arxiv_id.clone(),
        message: e,
    })
}
