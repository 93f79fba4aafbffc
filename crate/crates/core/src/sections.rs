//! PDF text extraction and header-based section splitting.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arxiv::PaperRecord;

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("PDF input is empty")]
    Empty,
    #[error("text extraction failed: {0}")]
    ExtractionFailed(String),
}

/// Swappable PDF-to-text backend.
pub trait TextExtractor {
    fn extract(&self, pdf: &[u8]) -> Result<String, ExtractionError>;
}

/// Backend built on `lopdf`'s content-stream text extraction.
#[derive(Debug, Default, Clone, Copy)]
pub struct LopdfExtractor;

impl TextExtractor for LopdfExtractor {
    fn extract(&self, pdf: &[u8]) -> Result<String, ExtractionError> {
        if pdf.is_empty() {
            return Err(ExtractionError::Empty);
        }
        let doc = lopdf::Document::load_mem(pdf)
            .map_err(|e| ExtractionError::ExtractionFailed(e.to_string()))?;
        if doc.is_encrypted() {
            return Err(ExtractionError::ExtractionFailed(
                "document is encrypted".into(),
            ));
        }
        let pages: Vec<u32> = doc.get_pages().keys().copied().collect();
        if pages.is_empty() {
            return Err(ExtractionError::ExtractionFailed(
                "document has no pages".into(),
            ));
        }
        doc.extract_text(&pages)
            .map_err(|e| ExtractionError::ExtractionFailed(e.to_string()))
    }
}

pub fn extract_text(pdf: &[u8]) -> Result<String, ExtractionError> {
    LopdfExtractor.extract(pdf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    Abstract,
    Introduction,
    Methods,
    Results,
    Conclusion,
}

impl SectionKind {
    pub const ALL: [SectionKind; 5] = [
        SectionKind::Abstract,
        SectionKind::Introduction,
        SectionKind::Methods,
        SectionKind::Results,
        SectionKind::Conclusion,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SectionKind::Abstract => "Abstract",
            SectionKind::Introduction => "Introduction",
            SectionKind::Methods => "Methods",
            SectionKind::Results => "Results",
            SectionKind::Conclusion => "Conclusion",
        }
    }

    fn pattern(self) -> &'static Regex {
        &HEADER_PATTERNS[self as usize]
    }
}

static HEADER_PATTERNS: LazyLock<[Regex; 5]> = LazyLock::new(|| {
    [
        r"(?i)\babstract\b",
        r"(?i)\bintroduction\b",
        r"(?i)\b(methodology|methods|approach)\b",
        r"(?i)\b(results|findings|experiments)\b",
        r"(?i)\b(conclusion|discussion|summary)\b",
    ]
    .map(|p| Regex::new(p).unwrap())
});

/// A located section: `header` is the matched header word, `body` the text
/// after it up to the next section (byte offsets into `full_text`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpan {
    pub kind: SectionKind,
    pub header: Range<usize>,
    pub body: Range<usize>,
}

impl SectionSpan {
    /// Whole span: header start to section end.
    pub fn span(&self) -> Range<usize> {
        self.header.start..self.body.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionedPaper {
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub introduction: Option<String>,
    pub methods: Option<String>,
    pub results: Option<String>,
    pub conclusion: Option<String>,
    #[serde(skip_serializing, default)]
    pub full_text: String,
    #[serde(skip)]
    spans: Vec<SectionSpan>,
}

impl SectionedPaper {
    pub fn get(&self, kind: SectionKind) -> Option<&str> {
        match kind {
            SectionKind::Abstract => self.abstract_text.as_deref(),
            SectionKind::Introduction => self.introduction.as_deref(),
            SectionKind::Methods => self.methods.as_deref(),
            SectionKind::Results => self.results.as_deref(),
            SectionKind::Conclusion => self.conclusion.as_deref(),
        }
    }

    fn slot(&mut self, kind: SectionKind) -> &mut Option<String> {
        match kind {
            SectionKind::Abstract => &mut self.abstract_text,
            SectionKind::Introduction => &mut self.introduction,
            SectionKind::Methods => &mut self.methods,
            SectionKind::Results => &mut self.results,
            SectionKind::Conclusion => &mut self.conclusion,
        }
    }

    /// Located sections in offset order.
    pub fn spans(&self) -> &[SectionSpan] {
        &self.spans
    }

    pub fn present(&self) -> impl Iterator<Item = (SectionKind, &str)> {
        SectionKind::ALL
            .into_iter()
            .filter_map(|k| self.get(k).map(|t| (k, t)))
    }

    pub fn is_empty(&self) -> bool {
        self.present().next().is_none()
    }

    /// Fallback when no PDF text is available.
    pub fn abstract_only(record: &PaperRecord) -> Self {
        let text = record.abstract_text.trim().to_string();
        let len = text.len();
        Self {
            abstract_text: (!text.is_empty()).then(|| text.clone()),
            introduction: None,
            methods: None,
            results: None,
            conclusion: None,
            spans: if len > 0 {
                vec![SectionSpan {
                    kind: SectionKind::Abstract,
                    header: 0..0,
                    body: 0..len,
                }]
            } else {
                vec![]
            },
            full_text: text,
        }
    }
}

static HEADER_NUMBERING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:^|\n)[ \t]*(?:\d+(?:\.\d+)*\.?|[IVX]+\.)[ \t]*$").unwrap());

/// Start of a header including a leading "2", "3.1." or "IV." numbering on
/// the same line.
fn header_line_start(text: &str, header_start: usize) -> usize {
    let window = header_start.saturating_sub(16);
    let window = (window..=header_start)
        .find(|&i| text.is_char_boundary(i))
        .unwrap_or(header_start);
    match HEADER_NUMBERING.find(&text[window..header_start]) {
        Some(m) => {
            let prefix = &text[window + m.start()..header_start];
            window + m.start() + (prefix.len() - prefix.trim_start_matches('\n').len())
        }
        None => header_start,
    }
}

fn trimmed(text: &str, range: Range<usize>) -> Range<usize> {
    let slice = &text[range.clone()];
    let start = range.start + (slice.len() - slice.trim_start().len());
    let end = range.end - (slice.len() - slice.trim_end().len());
    start..end.max(start)
}

/// Splits text into the five canonical sections. Each header pattern is
/// searched (first match, case-insensitive, whole word) starting at the
/// previous found section's start; a section runs until the next found
/// section or end of text. Text before the first header is ignored.
pub fn split_sections(text: &str) -> SectionedPaper {
    let mut found: Vec<(SectionKind, Range<usize>)> = Vec::new();
    let mut from = 0;
    for kind in SectionKind::ALL {
        if let Some(m) = kind.pattern().find_at(text, from) {
            from = m.start();
            found.push((kind, m.range()));
        }
    }

    let mut paper = SectionedPaper {
        abstract_text: None,
        introduction: None,
        methods: None,
        results: None,
        conclusion: None,
        full_text: text.to_string(),
        spans: Vec::with_capacity(found.len()),
    };
    for (i, (kind, header)) in found.iter().enumerate() {
        let end = found.get(i + 1).map_or(text.len(), |(_, next)| {
            header_line_start(text, next.start).max(header.end)
        });
        let body = trimmed(text, header.end.min(end)..end);
        *paper.slot(*kind) = Some(text[body.clone()].to_string());
        paper.spans.push(SectionSpan {
            kind: *kind,
            header: header.clone(),
            body,
        });
    }
    paper
}

/// Extracts and splits a PDF, falling back to the record's abstract when
/// extraction fails or no section header is found.
pub fn section_paper(
    record: &PaperRecord,
    pdf: Option<&[u8]>,
    extractor: &dyn TextExtractor,
) -> (SectionedPaper, Option<String>) {
    let Some(bytes) = pdf else {
        return (SectionedPaper::abstract_only(record), None);
    };
    match extractor.extract(bytes) {
        Ok(text) => {
            let paper = split_sections(&text);
            if paper.is_empty() {
                let note = format!(
                    "{}: no section headers found, using abstract",
                    record.arxiv_id
                );
                (SectionedPaper::abstract_only(record), Some(note))
            } else {
                (paper, None)
            }
        }
        Err(e) => (
            SectionedPaper::abstract_only(record),
            Some(format!("{}: {e}, using abstract", record.arxiv_id)),
        ),
    }
}
