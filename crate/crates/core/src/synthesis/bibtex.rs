//! BibTeX entries from arXiv metadata.

use std::collections::HashSet;

use thiserror::Error;

use crate::arxiv::PaperRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BibError {
    #[error("duplicate citation key `{0}`")]
    DuplicateKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibEntry {
    pub key: String,
    pub entry_type: String,
    /// Field name/value pairs in output order. Values are already escaped.
    pub fields: Vec<(String, String)>,
}

impl BibEntry {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

/// Escapes characters with special meaning in BibTeX/LaTeX.
pub fn escape_bibtex(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            c if c.is_whitespace() => {
                if !out.ends_with(' ') {
                    out.push(' ');
                }
            }
            c => out.push(c),
        }
    }
    out.trim().to_string()
}

fn key_part(s: &str) -> String {
    deunicode::deunicode(s)
        .to_lowercase()
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .collect()
}

/// Base citation key before collision suffixes: surname of the first
/// author, four-digit year, first title word. Papers without a usable
/// author use `arxiv` followed by the identifier's alphanumerics.
pub fn base_key(record: &PaperRecord) -> String {
    let surname = record
        .authors
        .first()
        .and_then(|a| a.split_whitespace().last())
        .map(key_part)
        .filter(|s| !s.is_empty());
    let Some(surname) = surname else {
        return format!("arxiv{}", key_part(&record.arxiv_id));
    };
    let year = record
        .year()
        .map(|y| format!("{y:04}"))
        .unwrap_or_else(|| "0000".to_string());
    let word = record
        .title
        .split_whitespace()
        .map(key_part)
        .find(|w| !w.is_empty())
        .unwrap_or_default();
    format!("{surname}{year}{word}")
}

/// Builds a `@misc` entry for one record using [`base_key`].
pub fn make_bibtex(record: &PaperRecord) -> BibEntry {
    let year = match record.year() {
        Some(y) => format!("{y:04}"),
        None => {
            tracing::warn!(id = %record.arxiv_id, "no publication date, year set to 0000");
            "0000".to_string()
        }
    };
    let mut fields = vec![
        ("title".to_string(), escape_bibtex(&record.title)),
        (
            "author".to_string(),
            record
                .authors
                .iter()
                .map(|a| escape_bibtex(a))
                .collect::<Vec<_>>()
                .join(" and "),
        ),
        ("year".to_string(), year),
        ("eprint".to_string(), escape_bibtex(&record.arxiv_id)),
        ("archivePrefix".to_string(), "arXiv".to_string()),
    ];
    if let Some(cat) = &record.primary_category {
        fields.push(("primaryClass".to_string(), escape_bibtex(cat)));
    }
    fields.push(("url".to_string(), record.abs_url()));
    BibEntry {
        key: base_key(record),
        entry_type: "misc".to_string(),
        fields,
    }
}

/// Bijective base-26 suffix: 0 -> "a", 25 -> "z", 26 -> "aa".
fn suffix(mut n: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (n % 26) as u8);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

/// Entries for all records, in input order, with colliding keys
/// disambiguated by `a`, `b`, ... suffixes on the second and later
/// occurrences.
pub fn build_bibliography(records: &[PaperRecord]) -> Vec<BibEntry> {
    let mut used = HashSet::new();
    records
        .iter()
        .map(|r| {
            let mut entry = make_bibtex(r);
            if !used.insert(entry.key.clone()) {
                let base = entry.key.clone();
                let mut i = 0;
                loop {
                    let candidate = format!("{base}{}", suffix(i));
                    if used.insert(candidate.clone()) {
                        entry.key = candidate;
                        break;
                    }
                    i += 1;
                }
            }
            entry
        })
        .collect()
}

/// Renders entries sorted by key, one `@type{key, ...}` block each.
pub fn render_bibliography(entries: &[BibEntry]) -> Result<String, BibError> {
    let mut seen = HashSet::new();
    for e in entries {
        if !seen.insert(e.key.as_str()) {
            return Err(BibError::DuplicateKey(e.key.clone()));
        }
    }
    let mut sorted: Vec<&BibEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    let blocks: Vec<String> = sorted
        .into_iter()
        .map(|e| {
            let body = e
                .fields
                .iter()
                .map(|(k, v)| format!("  {k} = {{{v}}}"))
                .collect::<Vec<_>>()
                .join(",\n");
            format!("@{}{{{},\n{}\n}}\n", e.entry_type, e.key, body)
        })
        .collect();
    Ok(blocks.join("\n"))
}
