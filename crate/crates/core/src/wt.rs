//! Category-graph extraction: breadth-first exploration from the root
//! category, accepting whole levels while enough of their titles share a
//! term with the domain vocabulary.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ArticleId, CategoryId, CategoryNode, CorpusStore};
use crate::text::{preprocess, PreprocessConfig};
use crate::vocabulary::Vocabulary;

pub const DEFAULT_PROBE_DEPTH: usize = 20;

pub const CURVE_HEADER: &str = "depth,total,positive,fraction";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub depth: usize,
    pub categories_total: usize,
    pub categories_positive: usize,
    pub positive_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtExtraction {
    pub domain: String,
    pub lang: String,
    pub threshold_k: f64,
    pub stop_depth: usize,
    /// Every explored level, including the probe beyond `stop_depth`.
    pub levels: Vec<LevelStats>,
    pub article_ids: BTreeSet<ArticleId>,
}

/// Whether a preprocessed title shares at least one term with `vocab`.
pub fn title_matches(title: &str, vocab: &HashSet<&str>, cfg: &PreprocessConfig) -> bool {
    !vocab.is_empty()
        && preprocess(title, cfg)
            .iter()
            .any(|t| vocab.contains(t.as_str()))
}

pub fn score_level(categories: &[&CategoryNode], vocab: &Vocabulary, cfg: &PreprocessConfig) -> LevelStats {
    let terms = vocab.term_set();
    score_titles(0, categories.iter().map(|c| c.title.as_str()), &terms, cfg)
}

fn score_titles<'a>(
    depth: usize,
    titles: impl Iterator<Item = &'a str>,
    vocab: &HashSet<&str>,
    cfg: &PreprocessConfig,
) -> LevelStats {
    let mut total = 0;
    let mut positive = 0;
    for t in titles {
        total += 1;
        if title_matches(t, vocab, cfg) {
            positive += 1;
        }
    }
    LevelStats {
        depth,
        categories_total: total,
        categories_positive: positive,
        positive_fraction: if total == 0 {
            0.0
        } else {
            positive as f64 / total as f64
        },
    }
}

/// Breadth-first levels from `root`; each category appears once, at the depth
/// it is first reached. Within a level categories are ordered by id.
pub struct Levels<'s> {
    store: &'s CorpusStore,
    visited: HashSet<CategoryId>,
    current: Vec<CategoryId>,
}

impl<'s> Levels<'s> {
    pub fn new(store: &'s CorpusStore, root: CategoryId) -> Self {
        Self {
            store,
            visited: HashSet::from([root]),
            current: vec![root],
        }
    }
}

impl Iterator for Levels<'_> {
    type Item = Vec<CategoryId>;

    fn next(&mut self) -> Option<Vec<CategoryId>> {
        if self.current.is_empty() {
            return None;
        }
        let mut next = BTreeSet::new();
        for id in &self.current {
            if let Some(node) = self.store.category(*id) {
                for child in &node.children {
                    if self.visited.insert(*child) {
                        next.insert(*child);
                    }
                }
            }
        }
        Some(std::mem::replace(&mut self.current, next.into_iter().collect()))
    }
}

pub fn traverse_and_extract(
    store: &CorpusStore,
    root: &CategoryNode,
    vocab: &Vocabulary,
    k: f64,
    cfg: &PreprocessConfig,
) -> Result<WtExtraction> {
    traverse_with_probe(store, root, vocab, k, cfg, DEFAULT_PROBE_DEPTH)
}

/// Like [`traverse_and_extract`], exploring up to `probe_depth` for the
/// curve. The probe never changes the extracted articles.
pub fn traverse_with_probe(
    store: &CorpusStore,
    root: &CategoryNode,
    vocab: &Vocabulary,
    k: f64,
    cfg: &PreprocessConfig,
    probe_depth: usize,
) -> Result<WtExtraction> {
    if !(k > 0.0 && k <= 100.0) {
        return Err(Error::Config(format!("threshold k must be in (0, 100], got {k}")));
    }
    if store.category(root.category_id).is_none() {
        return Err(Error::UnknownCategory(root.category_id));
    }
    let terms = vocab.term_set();
    let cutoff = k / 100.0;
    let mut levels = Vec::new();
    let mut article_ids = BTreeSet::new();
    let mut stop_depth = 0;
    let mut accepting = true;

    for (depth, ids) in Levels::new(store, root.category_id).enumerate() {
        if !accepting && depth > probe_depth {
            break;
        }
        let nodes: Vec<&CategoryNode> = ids.iter().filter_map(|id| store.category(*id)).collect();
        let stats = score_titles(depth, nodes.iter().map(|c| c.title.as_str()), &terms, cfg);
        if accepting && (depth == 0 || stats.positive_fraction >= cutoff) {
            stop_depth = depth;
            for node in &nodes {
                article_ids.extend(node.article_ids.iter().copied());
            }
        } else {
            accepting = false;
        }
        levels.push(stats);
    }

    Ok(WtExtraction {
        domain: vocab.domain.clone(),
        lang: store.edition().to_string(),
        threshold_k: k,
        stop_depth,
        levels,
        article_ids,
    })
}

pub fn curve_csv(extraction: &WtExtraction) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for l in &extraction.levels {
        out.push_str(&format!(
            "{},{},{},{}\n",
            l.depth, l.categories_total, l.categories_positive, l.positive_fraction
        ));
    }
    out
}

pub fn emit_curve(extraction: &WtExtraction, path: &Path) -> Result<()> {
    fs::write(path, curve_csv(extraction)).map_err(|e| Error::io(path, e))
}

/// One id per line, ascending.
pub fn write_article_ids<'a>(ids: impl IntoIterator<Item = &'a ArticleId>, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    for id in ids {
        text.push_str(&id.to_string());
        text.push('\n');
    }
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads a list written by [`write_article_ids`]. Blank lines are skipped.
pub fn read_article_ids(path: &Path) -> Result<BTreeSet<ArticleId>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let id = line.parse().map_err(|_| Error::Corrupt {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("not an article id: {line:?}"),
        })?;
        ids.insert(id);
    }
    Ok(ids)
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    model: &'static str,
    domain: &'a str,
    lang: &'a str,
    threshold_k: f64,
    vocabulary_cap: String,
    vocabulary_size: usize,
    stop_depth: usize,
    levels_explored: usize,
    articles: usize,
}

/// Writes `articles.txt`, `levels.csv` and `extraction.json` into `dir`.
pub fn write_outputs(extraction: &WtExtraction, vocab: &Vocabulary, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_article_ids(&extraction.article_ids, &dir.join("articles.txt"))?;
    emit_curve(extraction, &dir.join("levels.csv"))?;
    let summary = Summary {
        model: "WT",
        domain: &extraction.domain,
        lang: &extraction.lang,
        threshold_k: extraction.threshold_k,
        vocabulary_cap: vocab.cap_mode.to_string(),
        vocabulary_size: vocab.len(),
        stop_depth: extraction.stop_depth,
        levels_explored: extraction.levels.len(),
        articles: extraction.article_ids.len(),
    };
    let path = dir.join("extraction.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
