//! Citation-intent and contribution-type taxonomies.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::summary::StructuredSummary;
use crate::arxiv::PaperRecord;
use crate::llm::{LlmClient, LlmError, LlmRequest, LlmTask};
use crate::prompts;

/// Lowercases, maps `_`/`-` to spaces, strips punctuation at either end
/// and collapses internal whitespace. Idempotent.
pub fn normalize_label(raw: &str) -> String {
    let lowered = raw.to_lowercase().replace(['_', '-'], " ");
    lowered
        .trim_matches(|c: char| !c.is_alphanumeric())
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

macro_rules! taxonomy {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }

            /// Maps free-form LLM output onto the taxonomy; anything
            /// unrecognized becomes `Other`.
            pub fn from_label(raw: &str) -> Self {
                let norm = normalize_label(raw);
                let squashed = norm.replace(' ', "");
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| {
                        let canon = normalize_label(v.label());
                        canon == norm || canon.replace(' ', "") == squashed
                    })
                    .unwrap_or($name::Other)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.label())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                Ok(Self::from_label(&raw))
            }
        }
    };
}

taxonomy!(
    /// Rhetorical role a cited work plays.
    CitationIntent {
        Background => "Background",
        Comparison => "Comparison",
        Extension => "Extension",
        Criticism => "Criticism",
        Application => "Application",
        FutureWork => "Future Work",
        Other => "Other",
    }
);

taxonomy!(
    /// Primary artifact class of a paper.
    ContributionType {
        Dataset => "Dataset",
        Algorithm => "Algorithm",
        Framework => "Framework",
        Review => "Review",
        Benchmark => "Benchmark",
        Survey => "Survey",
        System => "System",
        TheoreticalAnalysis => "Theoretical Analysis",
        Other => "Other",
    }
);

fn tag_prompt(template: &str, summary: &StructuredSummary, record: &PaperRecord) -> String {
    prompts::render(
        template,
        &[
            ("arxiv_id", &record.arxiv_id),
            ("title", &record.title),
            ("abstract", &record.abstract_text),
            ("summary", &summary.to_outline()),
        ],
    )
}

fn ask(
    llm: &dyn LlmClient,
    task: LlmTask,
    model_id: &str,
    prompt: String,
) -> Result<String, LlmError> {
    let resp = llm.complete(&LlmRequest {
        task,
        model_id: model_id.to_string(),
        prompt,
        response_format_hint: "label".to_string(),
    })?;
    // Only the first non-empty line is considered the label.
    Ok(resp
        .raw_text
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .to_string())
}

pub fn tag_intent(
    summary: &StructuredSummary,
    record: &PaperRecord,
    llm: &dyn LlmClient,
    model_id: &str,
) -> Result<CitationIntent, LlmError> {
    let label = ask(
        llm,
        LlmTask::TagIntent,
        model_id,
        tag_prompt(prompts::TAG_INTENT, summary, record),
    )?;
    Ok(CitationIntent::from_label(&label))
}

pub fn tag_contribution(
    summary: &StructuredSummary,
    record: &PaperRecord,
    llm: &dyn LlmClient,
    model_id: &str,
) -> Result<ContributionType, LlmError> {
    let label = ask(
        llm,
        LlmTask::TagContribution,
        model_id,
        tag_prompt(prompts::TAG_CONTRIBUTION, summary, record),
    )?;
    Ok(ContributionType::from_label(&label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::ScriptedLlm;
    use proptest::prelude::*;

    #[test]
    fn taxonomy_sizes() {
        assert_eq!(CitationIntent::ALL.len(), 7);
        assert_eq!(ContributionType::ALL.len(), 9);
    }

    #[test]
    fn intent_labels() {
        assert_eq!(
            CitationIntent::from_label("Background"),
            CitationIntent::Background
        );
        assert_eq!(
            CitationIntent::from_label("FUTURE WORK "),
            CitationIntent::FutureWork
        );
        assert_eq!(
            CitationIntent::from_label("future_work."),
            CitationIntent::FutureWork
        );
        assert_eq!(
            CitationIntent::from_label("\"Comparison\""),
            CitationIntent::Comparison
        );
        assert_eq!(
            CitationIntent::from_label("novel contribution"),
            CitationIntent::Other
        );
        assert_eq!(CitationIntent::from_label(""), CitationIntent::Other);
    }

    #[test]
    fn contribution_labels() {
        assert_eq!(
            ContributionType::from_label("Framework"),
            ContributionType::Framework
        );
        assert_eq!(
            ContributionType::from_label("theoretical analysis"),
            ContributionType::TheoreticalAnalysis
        );
        assert_eq!(
            ContributionType::from_label("TheoreticalAnalysis"),
            ContributionType::TheoreticalAnalysis
        );
        assert_eq!(
            ContributionType::from_label("misc"),
            ContributionType::Other
        );
    }

    #[test]
    fn labels_round_trip_through_serde() {
        for v in ContributionType::ALL {
            let json = serde_json::to_string(v).unwrap();
            assert_eq!(serde_json::from_str::<ContributionType>(&json).unwrap(), *v);
        }
        assert_eq!(
            serde_json::to_string(&CitationIntent::FutureWork).unwrap(),
            "\"Future Work\""
        );
    }

    #[test]
    fn tagging_uses_first_line() {
        let summary = StructuredSummary {
            problem_statement: vec!["p".into()],
            methodology: vec!["m".into()],
            key_findings: vec!["k".into()],
            conclusion_recommendations: vec!["c".into()],
        };
        let record = PaperRecord {
            arxiv_id: "2401.00001".into(),
            version: 1,
            title: "T".into(),
            abstract_text: "A".into(),
            authors: vec![],
            published: None,
            pdf_url: String::new(),
            source_keywords: Default::default(),
            primary_category: None,
        };
        let llm = ScriptedLlm::new(["\n Extension\nbecause it extends", "Benchmark"]);
        assert_eq!(
            tag_intent(&summary, &record, &llm, "m").unwrap(),
            CitationIntent::Extension
        );
        assert_eq!(
            tag_contribution(&summary, &record, &llm, "m").unwrap(),
            ContributionType::Benchmark
        );
        let reqs = llm.requests();
        assert!(reqs[0].prompt.contains("key_findings:\n- k"));
        assert_eq!(reqs[1].task, LlmTask::TagContribution);
    }

    proptest! {
        #[test]
        fn normalization_idempotent(s in "\\PC{0,40}") {
            let once = normalize_label(&s);
            prop_assert_eq!(normalize_label(&once), once);
        }

        #[test]
        fn tagging_is_total(s in "\\PC{0,40}") {
            let _ = CitationIntent::from_label(&s);
            let _ = ContributionType::from_label(&s);
        }
    }
}
