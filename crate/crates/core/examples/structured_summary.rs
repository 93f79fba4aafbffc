//! Schema-checked summaries: a fenced reply is repaired, a reply missing a
//! category triggers one corrective re-prompt, and tags are normalized.
//!
//! cargo run --example structured_summary

use litsift::analysis::{summarize, tag_contribution, tag_intent, AnalysisError};
use litsift::arxiv::PaperRecord;
use litsift::llm::ScriptedLlm;
use litsift::sections::split_sections;

const GOOD: &str = r#"Sure! ```json
{"summary": {"problem_statement": ["Fixed cutoffs misfire."], "methodology": ["Q3 + 0.5 IQR on cosine scores."],
 "key_findings": ["Fewer, more relevant papers."], "conclusion_recommendations": ["Use adaptive thresholds."]}}
```"#;
const MISSING: &str = r#"{"summary": {"problem_statement": ["x"], "methodology": ["y"], "conclusion_recommendations": ["z"]}}"#;

fn main() -> anyhow::Result<()> {
    let record = PaperRecord {
        arxiv_id: "2403.01001".into(),
        version: 1,
        title: "Adaptive Similarity Thresholds".into(),
        abstract_text: "We keep candidates above an adaptive threshold.".into(),
        authors: vec!["Maria Garcia".into()],
        published: None,
        pdf_url: String::new(),
        source_keywords: Default::default(),
        primary_category: None,
    };
    let sections = split_sections("Abstract\nThresholds.\nMethods\nQuartiles.\nResults\nBetter.");

    let llm = ScriptedLlm::new([MISSING, GOOD, "  **Extension**\nbecause...", "algorithm"]);
    let summary = summarize(&record, &sections, &llm, "demo-model")?;
    println!("{}", summary.to_json());
    println!(
        "intent: {}",
        tag_intent(&summary, &record, &llm, "demo-model")?
    );
    println!(
        "contribution: {}",
        tag_contribution(&summary, &record, &llm, "demo-model")?
    );

    let stubborn = ScriptedLlm::new([MISSING, MISSING]);
    match summarize(&record, &sections, &stubborn, "demo-model") {
        Err(e @ AnalysisError::SchemaViolation { .. }) => println!("rejected: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
