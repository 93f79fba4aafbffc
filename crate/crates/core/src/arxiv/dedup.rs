use std::collections::HashMap;

use super::record::PaperRecord;

fn title_key(title: &str) -> String {
    title
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Merges duplicate records. Records with a valid arXiv id are keyed by it
/// and the highest version's metadata wins; records without one fall back
/// to a case-folded, whitespace-normalized title. Source keywords of merged
/// records are unioned and first-occurrence order is preserved.
pub fn dedup(records: Vec<PaperRecord>) -> Vec<PaperRecord> {
    let mut out: Vec<PaperRecord> = Vec::with_capacity(records.len());
    let mut index: HashMap<(bool, String), usize> = HashMap::new();
    for record in records {
        let key = if record.has_valid_id() {
            (true, record.arxiv_id.clone())
        } else {
            (false, title_key(&record.title))
        };
        match index.get(&key) {
            None => {
                index.insert(key, out.len());
                out.push(record);
            }
            Some(&i) => {
                let kept = &mut out[i];
                let mut keywords = std::mem::take(&mut kept.source_keywords);
                keywords.extend(record.source_keywords.iter().cloned());
                if record.version > kept.version {
                    *kept = record;
                }
                kept.source_keywords = keywords;
            }
        }
    }
    out
}
