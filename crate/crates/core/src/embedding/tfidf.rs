//! Native TF-IDF vectorizer: raw-count term frequency, smoothed inverse
//! document frequency `ln((1 + N) / (1 + df)) + 1`, L2 normalization.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{EmbedError, Embedder, EmbeddingVector};

/// Lowercased runs of Unicode letters/digits, at least two characters long.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    vocabulary: BTreeMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(corpus: &[S]) -> Result<Self, EmbedError> {
        if corpus.is_empty() {
            return Err(EmbedError::EmptyCorpus);
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in corpus {
            let terms: BTreeSet<String> = tokenize(doc.as_ref()).into_iter().collect();
            for term in terms {
                *df.entry(term).or_default() += 1;
            }
        }
        let mut vocabulary = BTreeMap::new();
        let mut doc_freq = Vec::with_capacity(df.len());
        for (i, (term, count)) in df.into_iter().enumerate() {
            vocabulary.insert(term, i);
            doc_freq.push(count);
        }
        Ok(Self {
            vocabulary,
            doc_freq,
            n_docs: corpus.len(),
        })
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn doc_freq(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).map(|&i| self.doc_freq[i])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.doc_freq(term)
            .map(|df| ((1 + self.n_docs) as f64 / (1 + df) as f64).ln() + 1.0)
    }

    /// Unknown terms are ignored; a document with no known terms maps to the
    /// zero vector of dimension `|vocabulary|`.
    pub fn transform(&self, doc: &str) -> EmbeddingVector {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for term in tokenize(doc) {
            if let Some(&col) = self.vocabulary.get(&term) {
                *counts.entry(col).or_default() += 1;
            }
        }
        let mut values = vec![0.0; self.vocabulary.len()];
        let n = (1 + self.n_docs) as f64;
        for (col, tf) in counts {
            let idf = (n / (1 + self.doc_freq[col]) as f64).ln() + 1.0;
            values[col] = tf as f64 * idf;
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        EmbeddingVector::from_raw(values)
    }
}

pub fn fit_tfidf<S: AsRef<str>>(corpus: &[S]) -> Result<TfidfModel, EmbedError> {
    TfidfModel::fit(corpus)
}

pub fn tfidf_transform(model: &TfidfModel, doc: &str) -> EmbeddingVector {
    model.transform(doc)
}

/// Embedder that fits a fresh model on exactly the texts it is asked to
/// embed (query plus candidates) and transforms each of them.
#[derive(Debug, Default, Clone, Copy)]
pub struct TfidfEmbedder;

impl Embedder for TfidfEmbedder {
    fn provider_id(&self) -> &str {
        "tfidf"
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::EmptyInput);
        }
        let model = TfidfModel::fit(texts)?;
        Ok(texts.iter().map(|t| model.transform(t)).collect())
    }
}
