//! Provider comparison on the fixture corpus. TF-IDF runs locally; the
//! remote providers are scored when `EMBEDDING_API_URL` is set and
//! otherwise reported as failed rows.
//!
//! cargo run --example compare_providers

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use litsift::arxiv::{dedup, fetch_all, FixtureFeeds};
use litsift::bench::{compare_providers, emit_plot_data, write_bench_csv, UnavailableEmbedder};
use litsift::cache::StageCache;
use litsift::config::Endpoints;
use litsift::embedding::{Embedder, ProviderKind};
use litsift::pipeline::build_embedder;
use litsift::query::InputQuery;
use litsift::transport::UreqTransport;

fn main() -> anyhow::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/offline");
    let query = InputQuery::new(
        std::fs::read_to_string(fixtures.join("title.txt"))?.trim(),
        std::fs::read_to_string(fixtures.join("abstract.txt"))?,
    )?;
    let keywords: Vec<String> = std::fs::read_dir(fixtures.join("feeds"))?
        .map(|e| {
            e.unwrap()
                .path()
                .file_stem()
                .unwrap()
                .to_string_lossy()
                .replace('-', " ")
        })
        .collect();
    let corpus = dedup(fetch_all(&FixtureFeeds::new(&fixtures), &keywords, 20)?);

    let env: HashMap<String, String> = std::env::vars().collect();
    let endpoints = Endpoints::from_env(&env);
    let out = std::env::temp_dir().join("litsift-bench");
    let mut embedders: Vec<Box<dyn Embedder>> = Vec::new();
    for kind in [
        ProviderKind::Tfidf,
        ProviderKind::Minilm,
        ProviderKind::Specter2,
    ] {
        match build_embedder(
            kind,
            &endpoints,
            Arc::new(UreqTransport::default()),
            StageCache::new(out.join("cache")),
        ) {
            Ok(e) => embedders.push(e),
            Err(e) => embedders.push(Box::new(UnavailableEmbedder {
                provider_id: kind.as_str().into(),
                reason: e.to_string(),
            })),
        }
    }
    let refs: Vec<&dyn Embedder> = embedders.iter().map(|e| e.as_ref()).collect();
    let report = compare_providers(&query, &corpus, &refs, 0.5)?;
    for row in &report.rows {
        println!("{row:?}");
    }
    write_bench_csv(&report.rows, &out.join("bench.csv"))?;
    for path in emit_plot_data(&report, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
