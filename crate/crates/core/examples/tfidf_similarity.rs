//! TF-IDF vectors and cosine similarity between a query and a few abstracts.
//!
//! cargo run --example tfidf_similarity

use litsift::embedding::{fit_tfidf, tfidf_transform};
use litsift::relevance::cosine;

fn main() -> anyhow::Result<()> {
    let query = "cosine similarity of sentence embeddings for literature retrieval";
    let docs = [
        "sentence embeddings improve literature retrieval",
        "cosine similarity between tf-idf vectors",
        "protein folding with graph networks",
    ];
    let corpus: Vec<&str> = std::iter::once(query).chain(docs).collect();
    let model = fit_tfidf(&corpus)?;
    println!(
        "vocabulary size {}, {} documents",
        model.vocabulary().len(),
        model.n_docs()
    );
    for term in ["similarity", "embeddings", "protein"] {
        println!("idf({term}) = {:.4}", model.idf(term).unwrap_or(f64::NAN));
    }
    let q = tfidf_transform(&model, query);
    for doc in docs {
        let d = tfidf_transform(&model, doc);
        println!("{:.4}  {doc}", cosine(&q, &d)?);
    }
    Ok(())
}
