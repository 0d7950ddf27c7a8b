//! Retrieval extraction: an inverted index over every article, queried with
//! the top vocabulary terms and cut at a fraction of the best score.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ArticleId, CorpusStore};
use crate::text::{preprocess, PreprocessConfig};
use crate::vocabulary::Vocabulary;
use crate::wt::write_article_ids;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    /// Postings sorted by article id.
    pub postings: HashMap<String, Vec<(ArticleId, u32)>>,
    pub doc_lengths: BTreeMap<ArticleId, u32>,
    pub doc_count: usize,
}

impl InvertedIndex {
    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn doc_freqs(&self) -> HashMap<&str, usize> {
        self.postings
            .iter()
            .map(|(t, p)| (t.as_str(), p.len()))
            .collect()
    }

    /// Index over already preprocessed documents, which must be supplied in
    /// ascending id order.
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = (ArticleId, &'a [String])>,
    {
        let mut index = InvertedIndex::default();
        for (id, tokens) in docs {
            index.add(id, term_counts(tokens));
        }
        index
    }

    fn add(&mut self, id: ArticleId, counts: Vec<(String, u32)>) {
        let len: u32 = counts.iter().map(|(_, c)| c).sum();
        for (term, c) in counts {
            self.postings.entry(term).or_default().push((id, c));
        }
        self.doc_lengths.insert(id, len);
        self.doc_count += 1;
    }
}

fn term_counts(tokens: &[String]) -> Vec<(String, u32)> {
    let mut counts: HashMap<&str, u32> = HashMap::new();
    for t in tokens {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut v: Vec<(String, u32)> = counts.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
    v.sort_unstable();
    v
}

/// Preprocesses every article in parallel and merges in id order.
pub fn build_index(store: &CorpusStore, cfg: &PreprocessConfig) -> InvertedIndex {
    let articles: Vec<_> = store.articles().collect();
    let counted: Vec<(ArticleId, Vec<(String, u32)>)> = articles
        .par_iter()
        .map(|a| (a.article_id, term_counts(&preprocess(&a.body, cfg))))
        .collect();
    let mut index = InvertedIndex::default();
    for (id, counts) in counted {
        index.add(id, counts);
    }
    index
}

/// Scores of all documents matching at least one of the first `query_size`
/// vocabulary terms, best first (ties by ascending id).
///
/// `score(d) = sum_t tf(t,d)/|d| * ln(1 + N/df(t))`.
pub fn query(index: &InvertedIndex, vocab: &Vocabulary, query_size: usize) -> Result<Vec<(ArticleId, f64)>> {
    if query_size == 0 {
        return Err(Error::Config("query size must be at least 1".into()));
    }
    let n = index.doc_count as f64;
    let mut scores: BTreeMap<ArticleId, f64> = BTreeMap::new();
    for term in vocab.top(query_size) {
        let Some(postings) = index.postings.get(term) else {
            continue;
        };
        let idf = (1.0 + n / postings.len() as f64).ln();
        for (id, tf) in postings {
            let len = index.doc_lengths[id];
            if len == 0 {
                continue;
            }
            *scores.entry(*id).or_insert(0.0) += *tf as f64 / len as f64 * idf;
        }
    }
    let mut scored: Vec<(ArticleId, f64)> = scores.into_iter().filter(|(_, s)| *s > 0.0).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    All,
    /// Keep scores strictly above a hundredth of the maximum.
    MaxOver100,
    /// Keep scores strictly above a tenth of the maximum.
    MaxOver10,
}

impl ThresholdMode {
    fn divisor(self) -> Option<f64> {
        match self {
            ThresholdMode::All => None,
            ThresholdMode::MaxOver100 => Some(100.0),
            ThresholdMode::MaxOver10 => Some(10.0),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::All => "all",
            ThresholdMode::MaxOver100 => "100",
            ThresholdMode::MaxOver10 => "10",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(ThresholdMode::All),
            "100" | "max/100" => Ok(ThresholdMode::MaxOver100),
            "10" | "max/10" => Ok(ThresholdMode::MaxOver10),
            _ => Err(Error::Config(format!(
                "threshold must be one of all, 100, 10; got {s:?}"
            ))),
        }
    }
}

/// Entries of a best-first list that survive `mode`.
pub fn threshold_select(scored: &[(ArticleId, f64)], mode: ThresholdMode) -> Vec<(ArticleId, f64)> {
    let Some(divisor) = mode.divisor() else {
        return scored.to_vec();
    };
    let max = scored.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
    let cut = max / divisor;
    scored.iter().filter(|(_, s)| *s > cut).copied().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrExtraction {
    pub domain: String,
    pub lang: String,
    pub query_size: usize,
    pub threshold_mode: ThresholdMode,
    pub scored: Vec<(ArticleId, f64)>,
    pub article_ids: BTreeSet<ArticleId>,
}

pub fn extract(
    index: &InvertedIndex,
    vocab: &Vocabulary,
    query_size: usize,
    mode: ThresholdMode,
) -> Result<IrExtraction> {
    let scored = query(index, vocab, query_size)?;
    let article_ids = threshold_select(&scored, mode)
        .into_iter()
        .map(|(id, _)| id)
        .collect();
    Ok(IrExtraction {
        domain: vocab.domain.clone(),
        lang: vocab.lang.clone(),
        query_size,
        threshold_mode: mode,
        scored,
        article_ids,
    })
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    model: &'static str,
    domain: &'a str,
    lang: &'a str,
    query_size: usize,
    query_terms: usize,
    threshold: String,
    max_score: Option<f64>,
    scored: usize,
    articles: usize,
}

/// Writes `articles.txt`, `scores.tsv` and `extraction.json` into `dir`.
pub fn write_outputs(extraction: &IrExtraction, vocab: &Vocabulary, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_article_ids(&extraction.article_ids, &dir.join("articles.txt"))?;
    let mut scores = String::new();
    for (id, s) in &extraction.scored {
        scores.push_str(&format!("{id}\t{s}\n"));
    }
    let path = dir.join("scores.tsv");
    fs::write(&path, scores).map_err(|e| Error::io(&path, e))?;
    let summary = Summary {
        model: "IR",
        domain: &extraction.domain,
        lang: &extraction.lang,
        query_size: extraction.query_size,
        query_terms: vocab.len().min(extraction.query_size),
        threshold: extraction.threshold_mode.to_string(),
        max_score: extraction.scored.first().map(|(_, s)| *s),
        scored: extraction.scored.len(),
        articles: extraction.article_ids.len(),
    };
    let path = dir.join("extraction.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
