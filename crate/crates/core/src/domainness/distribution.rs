use std::collections::HashMap;

use log::debug;

use crate::error::{Error, Result};

/// Per-article counts of vocabulary terms, plus each article's token count
/// and its most frequent term's count.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDistribution {
    pub vocab: Vec<String>,
    /// `counts[a][i]`: occurrences of `vocab[i]` in article `a`.
    pub counts: Vec<Vec<u64>>,
    pub totals: Vec<u64>,
    pub c_max: Vec<u64>,
}

impl TermDistribution {
    pub fn from_tokens<S: AsRef<str>>(docs: &[Vec<String>], vocab: &[S]) -> Self {
        let vocab: Vec<String> = vocab.iter().map(|s| s.as_ref().to_string()).collect();
        let position: HashMap<&str, usize> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let mut counts = Vec::with_capacity(docs.len());
        let mut totals = Vec::with_capacity(docs.len());
        let mut c_max = Vec::with_capacity(docs.len());
        for doc in docs {
            let mut all: HashMap<&str, u64> = HashMap::new();
            let mut row = vec![0u64; vocab.len()];
            for t in doc {
                *all.entry(t.as_str()).or_insert(0) += 1;
                if let Some(&i) = position.get(t.as_str()) {
                    row[i] += 1;
                }
            }
            counts.push(row);
            totals.push(doc.len() as u64);
            c_max.push(all.values().copied().max().unwrap_or(0));
        }
        Self {
            vocab,
            counts,
            totals,
            c_max,
        }
    }

    /// Number of articles, N.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// In-domain term occurrences of article `a`.
    pub fn c_terms(&self, a: usize) -> u64 {
        self.counts[a].iter().sum()
    }
}

/// Mean number of vocabulary-term occurrences per article.
pub fn density(dist: &TermDistribution) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::UndefinedMetric("density of an empty collection".into()));
    }
    let total: u64 = (0..dist.len()).map(|a| dist.c_terms(a)).sum();
    Ok(total as f64 / dist.len() as f64)
}

/// Mean augmented frequency `K + (1-K) c_terms/c_max`; articles without
/// tokens are skipped. Returns the value and the number skipped.
pub fn augmented_density(dist: &TermDistribution, k: f64) -> Result<(f64, usize)> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Config(format!("K must be in [0, 1), got {k}")));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut excluded = 0usize;
    for a in 0..dist.len() {
        if dist.c_max[a] == 0 {
            excluded += 1;
            continue;
        }
        // Vocabulary terms are distinct, so their summed count can exceed
        // c_max; the ratio is capped at 1 per article.
        let ratio = (dist.c_terms(a) as f64 / dist.c_max[a] as f64).min(1.0);
        sum += k + (1.0 - k) * ratio;
        n += 1;
    }
    if excluded > 0 {
        debug!("augmented density: {excluded} empty articles excluded");
    }
    if n == 0 {
        return Err(Error::UndefinedMetric("no article has any token".into()));
    }
    Ok((sum / n as f64, excluded))
}
