//! Retrieval and deduplication from fixture feeds, or from the live arXiv
//! API when run with `live` (requests are spaced 3 s apart).
//!
//! cargo run --example arxiv_fetch
//! cargo run --example arxiv_fetch -- live "semantic similarity"

use std::sync::Arc;
use std::time::Duration;

use litsift::arxiv::{build_query, dedup, fetch_all, ArxivClient, FeedSource, FixtureFeeds};
use litsift::cache::StageCache;
use litsift::transport::UreqTransport;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (source, keywords): (Box<dyn FeedSource>, Vec<String>) =
        if args.first().map(String::as_str) == Some("live") {
            let client = ArxivClient::new(
                Arc::new(UreqTransport::default()),
                Duration::from_secs(3),
                StageCache::new(std::env::temp_dir().join("litsift-example-cache")),
            );
            let keywords = if args.len() > 1 {
                args[1..].to_vec()
            } else {
                vec!["semantic similarity".into()]
            };
            (Box::new(client), keywords)
        } else {
            let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/offline");
            let keywords = [
                "semantic similarity",
                "literature review automation",
                "arxiv retrieval",
            ];
            (
                Box::new(FixtureFeeds::new(dir)),
                keywords.map(String::from).to_vec(),
            )
        };

    for k in &keywords {
        println!("query url: {}", build_query(k, 5));
    }
    let raw = fetch_all(source.as_ref(), &keywords, 5)?;
    let unique = dedup(raw.clone());
    println!("{} fetched, {} after dedup", raw.len(), unique.len());
    for r in &unique {
        println!(
            "{}v{}  {:<60.60}  {:?}",
            r.arxiv_id, r.version, r.title, r.source_keywords
        );
    }
    Ok(())
}
