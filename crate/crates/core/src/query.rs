use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("query title is empty")]
    EmptyTitle,
    #[error("query abstract is empty")]
    EmptyAbstract,
}

/// The target paper a review is built around.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputQuery {
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

impl InputQuery {
    pub fn new(
        title: impl Into<String>,
        abstract_text: impl Into<String>,
    ) -> Result<Self, QueryError> {
        let q = Self {
            title: title.into(),
            abstract_text: abstract_text.into(),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        if self.title.trim().is_empty() {
            return Err(QueryError::EmptyTitle);
        }
        if self.abstract_text.trim().is_empty() {
            return Err(QueryError::EmptyAbstract);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_fields_rejected() {
        assert_eq!(
            InputQuery::new("  ", "a").unwrap_err(),
            QueryError::EmptyTitle
        );
        assert_eq!(
            InputQuery::new("t", "\n\t").unwrap_err(),
            QueryError::EmptyAbstract
        );
        assert!(InputQuery::new("t", "a").is_ok());
    }
}
