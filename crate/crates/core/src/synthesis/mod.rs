//! Bibliography generation and literature-review synthesis.

mod bibtex;
mod review;

pub use bibtex::{
    base_key, build_bibliography, escape_bibtex, make_bibtex, render_bibliography, BibEntry,
    BibError,
};
pub use review::{
    extract_citations, strip_unknown_citations, synthesize_review, ReviewDocument, ReviewError,
    ReviewItem,
};
