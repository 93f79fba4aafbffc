//! arXiv retrieval: query construction, Atom parsing and deduplication.

mod client;
mod dedup;
mod feed;
mod query;
mod record;

pub use client::{
    fetch_all, keyword_slug, ArxivClient, FeedSource, FetchError, FixtureFeeds, PdfSource,
};
pub use dedup::dedup;
pub use feed::{parse_atom_feed, FeedError, ParsedFeed};
pub use query::{build_query, build_query_at, ARXIV_API_URL};
pub use record::{is_valid_arxiv_id, split_entry_id, PaperRecord};
