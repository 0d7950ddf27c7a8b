//! Characteristic domain vocabulary built from the seed articles of a root
//! category.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ArticleId, CategoryNode, CorpusStore};
use crate::text::{preprocess, PreprocessConfig};

/// Seed sets smaller than this are widened with the root's direct children.
pub const MIN_SEED_ARTICLES: usize = 10;

const SUGGESTIONS: usize = 5;

/// How many ranked terms a vocabulary keeps.
///
/// Every mode first keeps the top 10% of unique terms (rounded up); the
/// capped modes then truncate that list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapMode {
    Top10Pct,
    Top100Of10Pct,
    Top500Of10Pct,
    TopK(usize),
}

impl CapMode {
    pub fn cap(self) -> Option<usize> {
        match self {
            CapMode::Top10Pct => None,
            CapMode::Top100Of10Pct => Some(100),
            CapMode::Top500Of10Pct => Some(500),
            CapMode::TopK(k) => Some(k),
        }
    }

    /// Mode for a system-name size suffix (`all`, `100`, `500`, or any other
    /// positive count).
    pub fn from_size(size: Option<usize>) -> Self {
        match size {
            None => CapMode::Top10Pct,
            Some(100) => CapMode::Top100Of10Pct,
            Some(500) => CapMode::Top500Of10Pct,
            Some(k) => CapMode::TopK(k),
        }
    }
}

impl fmt::Display for CapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cap() {
            None => f.write_str("all"),
            Some(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for CapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(CapMode::Top10Pct);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(CapMode::from_size(Some(k))),
            _ => Err(Error::Config(format!(
                "vocabulary cap must be `all` or a positive count, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub domain: String,
    pub lang: String,
    /// Ranked by descending count, ties by term.
    pub terms: Vec<(String, u64)>,
    pub cap_mode: CapMode,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The first `n` ranked terms (fewer if the vocabulary is shorter).
    pub fn top(&self, n: usize) -> Vec<&str> {
        self.terms.iter().take(n).map(|(t, _)| t.as_str()).collect()
    }

    pub fn term_set(&self) -> HashSet<&str> {
        self.terms.iter().map(|(t, _)| t.as_str()).collect()
    }

    /// A copy truncated to `cap_mode`; the 10% cut is already applied.
    pub fn capped(&self, cap_mode: CapMode) -> Vocabulary {
        let n = cap_mode.cap().unwrap_or(usize::MAX);
        Vocabulary {
            domain: self.domain.clone(),
            lang: self.lang.clone(),
            terms: self.terms.iter().take(n).cloned().collect(),
            cap_mode,
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.terms {
            out.push_str(t);
            out.push('\t');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_tsv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path, domain: &str, lang: &str, cap_mode: CapMode) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let corrupt = |message: String| Error::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (t, c) = line
                .split_once('\t')
                .ok_or_else(|| corrupt("expected term<TAB>count".into()))?;
            let c: u64 = c
                .trim()
                .parse()
                .map_err(|_| corrupt(format!("bad count {c:?}")))?;
            terms.push((t.to_string(), c));
        }
        Ok(Vocabulary {
            domain: domain.to_string(),
            lang: lang.to_string(),
            terms,
            cap_mode,
        })
    }
}

/// Case-insensitive exact title lookup. On failure the error carries the
/// closest titles by edit distance.
pub fn find_root_category<'s>(store: &'s CorpusStore, name: &str) -> Result<&'s CategoryNode> {
    let wanted = name.trim().to_lowercase();
    if let Some(c) = store
        .categories()
        .find(|c| c.title.to_lowercase() == wanted)
    {
        return Ok(c);
    }
    let mut scored: Vec<(usize, &str)> = store
        .categories()
        .map(|c| (strsim::levenshtein(&c.title.to_lowercase(), &wanted), c.title.as_str()))
        .collect();
    scored.sort();
    Err(Error::CategoryNotFound {
        name: name.to_string(),
        suggestions: scored
            .into_iter()
            .take(SUGGESTIONS)
            .map(|(_, t)| t.to_string())
            .collect(),
    })
}

/// Root articles, widened with the direct children's articles when fewer
/// than [`MIN_SEED_ARTICLES`].
pub fn select_seed_articles(store: &CorpusStore, root: &CategoryNode) -> Result<BTreeSet<ArticleId>> {
    let node = store
        .category(root.category_id)
        .ok_or(Error::UnknownCategory(root.category_id))?;
    let mut seeds: BTreeSet<ArticleId> = node.article_ids.iter().copied().collect();
    if seeds.len() < MIN_SEED_ARTICLES {
        for child in &node.children {
            if let Some(c) = store.category(*child) {
                seeds.extend(c.article_ids.iter().copied());
            }
        }
    }
    if seeds.is_empty() {
        return Err(Error::EmptySeed(root.title.clone()));
    }
    Ok(seeds)
}

/// Term frequencies of a token stream.
pub fn count_terms<'a, I>(tokens: I) -> HashMap<String, u64>
where
    I: IntoIterator<Item = &'a String>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    counts
}

/// Terms by descending count, ties broken by term.
pub fn rank_terms(counts: &HashMap<String, u64>) -> Vec<(String, u64)> {
    let mut ranked: Vec<(String, u64)> = counts
        .iter()
        .filter(|(_, c)| **c > 0)
        .map(|(t, c)| (t.clone(), *c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Number of terms kept by the 10% cut: `ceil(unique / 10)`.
pub fn ten_percent(unique: usize) -> usize {
    unique.div_ceil(10)
}

/// Vocabulary from an already preprocessed seed token stream.
pub fn vocabulary_from_tokens<'a, I>(domain: &str, lang: &str, tokens: I, cap_mode: CapMode) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a String>,
{
    let counts = count_terms(tokens);
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary(domain.to_string()));
    }
    let mut terms = rank_terms(&counts);
    let mut keep = ten_percent(terms.len());
    if let Some(cap) = cap_mode.cap() {
        keep = keep.min(cap);
    }
    terms.truncate(keep);
    Ok(Vocabulary {
        domain: domain.to_string(),
        lang: lang.to_string(),
        terms,
        cap_mode,
    })
}

/// Preprocessed bodies of `ids`, in id order.
pub fn preprocess_articles(
    store: &CorpusStore,
    ids: &BTreeSet<ArticleId>,
    cfg: &PreprocessConfig,
) -> Vec<Vec<String>> {
    let ids: Vec<ArticleId> = ids.iter().copied().collect();
    ids.par_iter()
        .map(|id| {
            store
                .article(*id)
                .map(|a| preprocess(&a.body, cfg))
                .unwrap_or_default()
        })
        .collect()
}

pub fn build_vocabulary(
    store: &CorpusStore,
    domain: &str,
    seeds: &BTreeSet<ArticleId>,
    cfg: &PreprocessConfig,
    cap_mode: CapMode,
) -> Result<Vocabulary> {
    if seeds.is_empty() {
        return Err(Error::EmptySeed(domain.to_string()));
    }
    let docs = preprocess_articles(store, seeds, cfg);
    vocabulary_from_tokens(domain, store.edition(), docs.iter().flatten(), cap_mode)
}
