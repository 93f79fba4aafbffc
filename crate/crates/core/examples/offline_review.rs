//! Full pipeline against the bundled fixtures: no network, TF-IDF scoring,
//! rule-based LLM replies.
//!
//! cargo run --example offline_review

use std::path::Path;

use litsift::config::PipelineConfig;
use litsift::pipeline::{run_pipeline, Services};
use litsift::query::InputQuery;

fn main() -> anyhow::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/offline");
    let query = InputQuery::new(
        std::fs::read_to_string(fixtures.join("title.txt"))?.trim(),
        std::fs::read_to_string(fixtures.join("abstract.txt"))?,
    )?;
    let config = PipelineConfig {
        provider_id: "tfidf".into(),
        output_dir: std::env::temp_dir().join("litsift-offline-review"),
        ..PipelineConfig::default()
    };
    let services = Services::offline(&config, &fixtures)?;
    let bundle = run_pipeline(&query, &config, &services)?;

    println!("keywords: {:?}", bundle.keywords.keywords);
    println!(
        "{} candidates, threshold {:.4}, skewness {:+.3}",
        bundle.candidates.len(),
        bundle.stats.threshold,
        bundle.stats.skewness
    );
    for p in &bundle.analysed {
        println!(
            "  {:.4}  [@{}]  {} / {}  {}",
            p.score, p.bib_key, p.intent, p.contribution, p.title
        );
    }
    println!("\n{}\n", bundle.review.body);
    println!("outputs in {}", bundle.output_dir.display());
    Ok(())
}
