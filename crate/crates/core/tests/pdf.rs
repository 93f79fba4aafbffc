use lopdf::content::{Content, Operation};
use lopdf::{dictionary, Document, Object, Stream};

use litsift::arxiv::PaperRecord;
use litsift::sections::{extract_text, section_paper, LopdfExtractor};

/// One page per entry of `pages`, each line drawn as its own text object.
fn build_pdf(pages: &[&[&str]]) -> Vec<u8> {
    let mut doc = Document::with_version("1.5");
    let pages_id = doc.new_object_id();
    let font_id = doc.add_object(dictionary! {
        "Type" => "Font",
        "Subtype" => "Type1",
        "BaseFont" => "Courier",
    });
    let resources_id = doc.add_object(dictionary! {
        "Font" => dictionary! { "F1" => font_id },
    });
    let mut kids = Vec::new();
    for lines in pages {
        let mut operations = vec![
            Operation::new("BT", vec![]),
            Operation::new("Tf", vec!["F1".into(), 12.into()]),
            Operation::new("TL", vec![14.into()]),
            Operation::new("Td", vec![72.into(), 720.into()]),
        ];
        for line in *lines {
            operations.push(Operation::new("Tj", vec![Object::string_literal(*line)]));
            operations.push(Operation::new("T*", vec![]));
        }
        operations.push(Operation::new("ET", vec![]));
        let content = Content { operations };
        let content_id = doc.add_object(Stream::new(dictionary! {}, content.encode().unwrap()));
        let page_id = doc.add_object(dictionary! {
            "Type" => "Page",
            "Parent" => pages_id,
            "Contents" => content_id,
        });
        kids.push(page_id.into());
    }
    let count = kids.len() as i64;
    doc.objects.insert(
        pages_id,
        Object::Dictionary(dictionary! {
            "Type" => "Pages",
            "Kids" => kids,
            "Count" => count,
            "Resources" => resources_id,
            "MediaBox" => vec![0.into(), 0.into(), 595.into(), 842.into()],
        }),
    );
    let catalog_id = doc.add_object(dictionary! {
        "Type" => "Catalog",
        "Pages" => pages_id,
    });
    doc.trailer.set("Root", catalog_id);
    let mut bytes = Vec::new();
    doc.save_to(&mut bytes).unwrap();
    bytes
}

fn record() -> PaperRecord {
    PaperRecord {
        arxiv_id: "2401.00001".into(),
        version: 1,
        title: "Hello".into(),
        abstract_text: "Fallback abstract.".into(),
        authors: vec![],
        published: None,
        pdf_url: String::new(),
        source_keywords: Default::default(),
        primary_category: None,
    }
}

#[test]
fn extracts_text_from_generated_pdf() {
    let pdf = build_pdf(&[&["Hello Sections"]]);
    let text = extract_text(&pdf).unwrap();
    assert!(text.contains("Hello Sections"), "{text:?}");
}

#[test]
fn sections_span_pages() {
    let pdf = build_pdf(&[
        &[
            "Abstract",
            "We say hello.",
            "1 Introduction",
            "Greetings matter.",
        ],
        &[
            "2 Methods",
            "Wave.",
            "3 Results",
            "People waved back.",
            "4 Conclusion",
            "Say hello.",
        ],
    ]);
    let (paper, note) = section_paper(&record(), Some(&pdf), &LopdfExtractor);
    assert!(note.is_none());
    assert_eq!(paper.abstract_text.as_deref(), Some("We say hello."));
    assert_eq!(paper.introduction.as_deref(), Some("Greetings matter."));
    assert_eq!(paper.methods.as_deref(), Some("Wave."));
    assert_eq!(paper.results.as_deref(), Some("People waved back."));
    assert_eq!(paper.conclusion.as_deref(), Some("Say hello."));
}

#[test]
fn headerless_pdf_falls_back_to_abstract() {
    let pdf = build_pdf(&[&["Just some words."]]);
    let (paper, note) = section_paper(&record(), Some(&pdf), &LopdfExtractor);
    assert_eq!(paper.abstract_text.as_deref(), Some("Fallback abstract."));
    assert!(paper.introduction.is_none());
    assert!(note.unwrap().contains("no section headers"));
}
