//! Header-based section splitting of extracted text, and the abstract
//! fallback for PDFs that cannot be read.
//!
//! cargo run --example sectioning

use litsift::arxiv::PaperRecord;
use litsift::sections::{section_paper, split_sections, LopdfExtractor};

fn main() {
    let text = "Deep Widgets\nAbstract\nWe study widgets.\n1 Introduction\nWidgets are everywhere; prior results are mixed.\n2 Approach\nWe stack them.\n3 Experiments\nStacks are taller.\n4 Discussion\nStack more widgets.";
    let paper = split_sections(text);
    for (kind, body) in paper.present() {
        println!("{:<13} {body}", kind.label());
    }
    println!("{}", serde_json::to_string_pretty(&paper).unwrap());

    let pdf = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/offline/pdfs/2402.02002.pdf"
    ))
    .unwrap();
    let record = PaperRecord {
        arxiv_id: "2402.02002".into(),
        version: 1,
        title: "Sentence Embeddings for Scientific Literature Retrieval".into(),
        abstract_text: "Fallback abstract.".into(),
        authors: vec![],
        published: None,
        pdf_url: String::new(),
        source_keywords: Default::default(),
        primary_category: None,
    };
    let (from_pdf, _) = section_paper(&record, Some(&pdf), &LopdfExtractor);
    println!(
        "from PDF: {:?}",
        from_pdf
            .present()
            .map(|(k, _)| k.label())
            .collect::<Vec<_>>()
    );
    let (fallback, note) = section_paper(&record, Some(b"not a pdf"), &LopdfExtractor);
    println!(
        "fallback: {:?} ({})",
        fallback.abstract_text,
        note.unwrap_or_default()
    );
}
