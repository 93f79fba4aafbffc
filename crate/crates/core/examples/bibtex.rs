//! BibTeX generation with collision suffixes and escaping.
//!
//! cargo run --example bibtex

use chrono::TimeZone;

use litsift::arxiv::PaperRecord;
use litsift::synthesis::{build_bibliography, render_bibliography};

fn record(id: &str, authors: &[&str], year: Option<i32>, title: &str) -> PaperRecord {
    PaperRecord {
        arxiv_id: id.into(),
        version: 1,
        title: title.into(),
        abstract_text: String::new(),
        authors: authors.iter().map(|a| a.to_string()).collect(),
        published: year.map(|y| chrono::Utc.with_ymd_and_hms(y, 1, 1, 0, 0, 0).unwrap()),
        pdf_url: String::new(),
        source_keywords: Default::default(),
        primary_category: Some("cs.IR".into()),
    }
}

fn main() -> anyhow::Result<()> {
    let records = [
        record(
            "2401.01234",
            &["Jane Doe", "John Smith"],
            Some(2024),
            "Deep Widgets for Search",
        ),
        record(
            "2401.05678",
            &["Jane Doe"],
            Some(2024),
            "Deep Widgets, Revisited",
        ),
        record(
            "2402.00001",
            &["Jürgen Müller"],
            Some(2024),
            "Über 100% Recall & More",
        ),
        record("2403.00002", &[], None, "Anonymous Report"),
    ];
    print!("{}", render_bibliography(&build_bibliography(&records))?);
    Ok(())
}
