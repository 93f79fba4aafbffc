//! Keyword generation with a scripted LLM reply.
//!
//! cargo run --example keywords

use litsift::config::PipelineConfig;
use litsift::keywords::{generate_keywords, parse_keyword_response};
use litsift::llm::ScriptedLlm;
use litsift::query::InputQuery;

fn main() -> anyhow::Result<()> {
    let query = InputQuery::new(
        "Adaptive Relevance Filtering for Automated Literature Reviews",
        "We rank arXiv papers by cosine similarity of sentence embeddings and keep those above an IQR threshold.",
    )?;

    // Replies may be numbered, bulleted or comma-separated.
    let reply = "Here are keywords:\n1. semantic similarity\n2. \"sentence embeddings\"\n- literature review automation\n* arXiv retrieval, interquartile range\n";
    println!("parsed: {:?}", parse_keyword_response(reply));

    let llm = ScriptedLlm::new([reply]);
    let set = generate_keywords(&query, &llm, &PipelineConfig::default())?;
    println!("keyword set: {:?}", set.keywords);
    println!("prompt sent:\n{}", llm.requests()[0].prompt);
    Ok(())
}
