use std::collections::HashMap;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::ingest::ArticleId;

/// Default minimum reference size; smaller spaces are built with a warning.
pub const DEFAULT_REFERENCE_FLOOR: usize = 10_000;

/// Term-document tf-idf matrix over a reference collection.
///
/// Weights are raw term frequency times `ln(N/df)`, so a term present in
/// every reference document carries no weight.
#[derive(Debug, Clone)]
pub struct EsaSpace {
    pub lang: String,
    pub doc_ids: Vec<ArticleId>,
    /// term -> (document index, weight), weight > 0, ascending index.
    pub postings: HashMap<String, Vec<(usize, f64)>>,
    pub idf: HashMap<String, f64>,
    pub doc_norms: Vec<f64>,
}

fn counts(tokens: &[String]) -> Vec<(&str, u64)> {
    let mut m: HashMap<&str, u64> = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut v: Vec<(&str, u64)> = m.into_iter().collect();
    v.sort_unstable();
    v
}

impl EsaSpace {
    /// Builds the space from preprocessed reference documents.
    pub fn build(lang: &str, docs: &[(ArticleId, Vec<String>)], floor: usize) -> Self {
        if docs.len() < floor {
            warn!(
                "ESA reference of {} documents is below the floor of {floor}",
                docs.len()
            );
        }
        let n = docs.len() as f64;
        let per_doc: Vec<Vec<(&str, u64)>> = docs.iter().map(|(_, t)| counts(t)).collect();
        let mut df: HashMap<&str, usize> = HashMap::new();
        for doc in &per_doc {
            for (t, _) in doc {
                *df.entry(*t).or_insert(0) += 1;
            }
        }
        let idf: HashMap<String, f64> = df
            .iter()
            .map(|(t, d)| (t.to_string(), (n / *d as f64).ln()))
            .collect();
        let mut postings: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
        let mut doc_norms = vec![0.0; docs.len()];
        for (d, doc) in per_doc.iter().enumerate() {
            let mut sq = 0.0;
            for (t, tf) in doc {
                let w = *tf as f64 * idf[*t];
                if w > 0.0 {
                    postings.entry(t.to_string()).or_default().push((d, w));
                    sq += w * w;
                }
            }
            doc_norms[d] = sq.sqrt();
        }
        Self {
            lang: lang.to_string(),
            doc_ids: docs.iter().map(|(id, _)| *id).collect(),
            postings,
            idf,
            doc_norms,
        }
    }

    pub fn dimension(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn weight(&self, term: &str, doc: usize) -> f64 {
        self.postings
            .get(term)
            .and_then(|p| p.binary_search_by_key(&doc, |(d, _)| *d).ok().map(|i| p[i].1))
            .unwrap_or(0.0)
    }

    /// ESA vector of a text: entry `d` is the cosine between the text's
    /// tf-idf vector and reference document `d`. Terms unknown to the space
    /// are ignored.
    pub fn vector(&self, tokens: &[String]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        let mut sq = 0.0;
        for (t, tf) in counts(tokens) {
            let Some(idf) = self.idf.get(t) else {
                continue;
            };
            let w = tf as f64 * idf;
            if w == 0.0 {
                continue;
            }
            sq += w * w;
            if let Some(postings) = self.postings.get(t) {
                for (d, dw) in postings {
                    out[*d] += w * dw;
                }
            }
        }
        let norm = sq.sqrt();
        if norm == 0.0 {
            return out;
        }
        for (x, dn) in out.iter_mut().zip(&self.doc_norms) {
            *x = if *dn > 0.0 { *x / (norm * dn) } else { 0.0 };
        }
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Angle between two nonzero vectors, computed as `2 atan2(|u-w|, |u+w|)`
/// on the unit vectors, which stays accurate near 0 and pi.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (u, w) = (x / na, y / nb);
        diff += (u - w) * (u - w);
        sum += (u + w) * (u + w);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Mean angular distance of the nonzero vectors to their centroid. Returns
/// the distance and the number of zero vectors excluded.
pub fn mean_angle_to_centroid(vectors: &[Vec<f64>]) -> Result<(f64, usize)> {
    let included: Vec<&Vec<f64>> = vectors.iter().filter(|v| norm(v) > 0.0).collect();
    let excluded = vectors.len() - included.len();
    if excluded > 0 {
        debug!("ESA: {excluded} zero vectors excluded");
    }
    if included.is_empty() {
        return Err(Error::UndefinedMetric("every ESA vector is zero".into()));
    }
    let dim = included[0].len();
    let mut centroid = vec![0.0; dim];
    for v in &included {
        for (c, x) in centroid.iter_mut().zip(v.iter()) {
            *c += x;
        }
    }
    let n = included.len() as f64;
    centroid.iter_mut().for_each(|c| *c /= n);
    let total: f64 = included.iter().map(|v| angle(v, &centroid)).sum();
    Ok((total / n, excluded))
}

/// d_ESA of a collection given its preprocessed articles.
pub fn d_esa(docs: &[Vec<String>], space: &EsaSpace) -> Result<(f64, usize)> {
    let vectors: Vec<Vec<f64>> = docs.iter().map(|d| space.vector(d)).collect();
    mean_angle_to_centroid(&vectors)
}
