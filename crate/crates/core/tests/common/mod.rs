#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use wikitailor::ingest::{ArticleId, ArticleRecord, CategoryId, CategoryNode, CorpusStore, LangLinkTable};
use wikitailor::vocabulary::{CapMode, Vocabulary};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/minidump")
}

/// Builds small stores by title. Categories get ids from 1 in insertion
/// order, articles from 10_001.
#[derive(Default)]
pub struct StoreBuilder {
    categories: Vec<(String, Vec<String>)>,
    articles: Vec<(String, String, Vec<String>)>,
    langlinks: Vec<(String, String, String)>,
}

impl StoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn category(&mut self, title: &str, children: &[&str]) -> &mut Self {
        self.categories
            .push((title.to_string(), children.iter().map(|c| c.to_string()).collect()));
        self
    }

    pub fn add_child(&mut self, parent: &str, child: &str) -> &mut Self {
        let entry = self
            .categories
            .iter_mut()
            .find(|(t, _)| t == parent)
            .expect("parent declared");
        entry.1.push(child.to_string());
        self
    }

    pub fn article(&mut self, title: &str, body: &str, categories: &[&str]) -> &mut Self {
        self.articles.push((
            title.to_string(),
            body.to_string(),
            categories.iter().map(|c| c.to_string()).collect(),
        ));
        self
    }

    /// Inter-language link from the article or category titled `source`.
    pub fn langlink(&mut self, source: &str, lang: &str, target: &str) -> &mut Self {
        self.langlinks
            .push((source.to_string(), lang.to_string(), target.to_string()));
        self
    }

    pub fn category_id(&self, title: &str) -> CategoryId {
        self.categories
            .iter()
            .position(|(t, _)| t == title)
            .map(|i| i as CategoryId + 1)
            .unwrap_or_else(|| panic!("unknown category {title}"))
    }

    pub fn article_id(&self, title: &str) -> ArticleId {
        self.articles
            .iter()
            .position(|(t, _, _)| t == title)
            .map(|i| i as ArticleId + 10_001)
            .unwrap_or_else(|| panic!("unknown article {title}"))
    }

    pub fn build(&self, edition: &str) -> CorpusStore {
        let mut members: BTreeMap<CategoryId, BTreeSet<ArticleId>> = BTreeMap::new();
        let articles: Vec<ArticleRecord> = self
            .articles
            .iter()
            .enumerate()
            .map(|(i, (title, body, cats))| {
                let id = i as ArticleId + 10_001;
                let categories: BTreeSet<CategoryId> = cats.iter().map(|c| self.category_id(c)).collect();
                for c in &categories {
                    members.entry(*c).or_default().insert(id);
                }
                ArticleRecord {
                    article_id: id,
                    title: title.clone(),
                    lang: edition.to_string(),
                    categories: categories.into_iter().collect(),
                    body: body.clone(),
                }
            })
            .collect();
        let categories = self
            .categories
            .iter()
            .enumerate()
            .map(|(i, (title, children))| {
                let id = i as CategoryId + 1;
                let children: BTreeSet<CategoryId> = children.iter().map(|c| self.category_id(c)).collect();
                CategoryNode {
                    category_id: id,
                    title: title.clone(),
                    children: children.into_iter().collect(),
                    article_ids: members.get(&id).map(|m| m.iter().copied().collect()).unwrap_or_default(),
                }
            })
            .collect();
        let mut links = LangLinkTable::new();
        for (source, lang, target) in &self.langlinks {
            let id = if self.articles.iter().any(|(t, _, _)| t == source) {
                self.article_id(source)
            } else {
                self.category_id(source)
            };
            links.insert(id, lang, target);
        }
        CorpusStore::new(edition, articles, categories, links).expect("consistent fixture")
    }
}

pub fn vocabulary(terms: &[&str]) -> Vocabulary {
    Vocabulary {
        domain: "test".into(),
        lang: "en".into(),
        terms: terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), (terms.len() - i) as u64))
            .collect(),
        cap_mode: CapMode::Top10Pct,
    }
}

pub fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

/// `lang -> article id -> topic` from the fixture's `truth.tsv`.
pub fn read_truth() -> BTreeMap<String, BTreeMap<ArticleId, String>> {
    let text = fs::read_to_string(fixture_dir().join("truth.tsv")).expect("truth.tsv");
    let mut out: BTreeMap<String, BTreeMap<ArticleId, String>> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let mut cols = line.split('\t');
        let (lang, id, topic) = (cols.next().unwrap(), cols.next().unwrap(), cols.next().unwrap());
        out.entry(lang.to_string())
            .or_default()
            .insert(id.parse().unwrap(), topic.to_string());
    }
    out
}

/// Relative path -> bytes for every file under `dir`.
pub fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).expect("readable dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&path).expect("readable file"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

pub fn copy_tree(from: &Path, to: &Path) {
    if to.exists() {
        fs::remove_dir_all(to).expect("clear golden dir");
    }
    for (rel, bytes) in read_tree(from) {
        let dest = to.join(&rel);
        fs::create_dir_all(dest.parent().unwrap()).unwrap();
        fs::write(dest, bytes).unwrap();
    }
}
