pub const ARXIV_API_URL: &str = "https://export.arxiv.org/api/query";

/// Builds an arXiv API search URL for `keyword` as a quoted all-fields
/// phrase, first page only.
pub fn build_query(keyword: &str, max_results: usize) -> String {
    build_query_at(ARXIV_API_URL, keyword, max_results)
}

pub fn build_query_at(base: &str, keyword: &str, max_results: usize) -> String {
    debug_assert!(!keyword.trim().is_empty());
    debug_assert!(max_results >= 1);
    let phrase = format!("\"{}\"", keyword.trim());
    let encoded: String = url::form_urlencoded::byte_serialize(phrase.as_bytes()).collect();
    format!("{base}?search_query=all:{encoded}&start=0&max_results={max_results}")
}
