//! On-disk store layout: `articles.jsonl`, `categories.jsonl`,
//! `langlinks.tsv` and `meta.json`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ArticleRecord, CategoryNode, CorpusStore, LangLinkTable};
use crate::error::{Error, Result};

const ARTICLES: &str = "articles.jsonl";
const CATEGORIES: &str = "categories.jsonl";
const LANGLINKS: &str = "langlinks.tsv";
const META: &str = "meta.json";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    edition: String,
    fingerprint: String,
    articles: usize,
    categories: usize,
    langlinks: usize,
}

fn article_line(a: &ArticleRecord) -> String {
    serde_json::to_string(a).expect("article serializes")
}

fn category_line(c: &CategoryNode) -> String {
    serde_json::to_string(c).expect("category serializes")
}

fn langlink_line(source: u64, lang: &str, title: &str) -> String {
    format!("{source}\t{lang}\t{title}")
}

/// SHA-256 over the canonical serialization of the three data files.
pub(super) fn fingerprint(store: &CorpusStore) -> String {
    let mut h = Sha256::new();
    h.update(store.edition.as_bytes());
    h.update([0u8]);
    for a in store.articles.values() {
        h.update(article_line(a).as_bytes());
        h.update(b"\n");
    }
    h.update([0u8]);
    for c in store.categories.values() {
        h.update(category_line(c).as_bytes());
        h.update(b"\n");
    }
    h.update([0u8]);
    for (s, l, t) in store.langlinks.iter() {
        h.update(langlink_line(s, l, t).as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn write_lines<I: IntoIterator<Item = String>>(path: &Path, lines: I) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn persist_store(store: &CorpusStore, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_lines(&dir.join(ARTICLES), store.articles.values().map(article_line))?;
    write_lines(&dir.join(CATEGORIES), store.categories.values().map(category_line))?;
    write_lines(
        &dir.join(LANGLINKS),
        store.langlinks.iter().map(|(s, l, t)| langlink_line(s, l, t)),
    )?;
    let meta = Meta {
        edition: store.edition.clone(),
        fingerprint: store.fingerprint.clone(),
        articles: store.article_count(),
        categories: store.category_count(),
        langlinks: store.langlinks.len(),
    };
    let path = dir.join(META);
    let mut text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read_lines<T, F>(path: &Path, mut parse: F) -> Result<Vec<T>>
where
    F: FnMut(&str) -> std::result::Result<T, String>,
{
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::Corrupt {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        out.push(parse(&line).map_err(|message| Error::Corrupt {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        })?);
    }
    Ok(out)
}

pub fn load_store(dir: &Path) -> Result<CorpusStore> {
    let meta_path = dir.join(META);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: Meta = serde_json::from_str(&meta_text).map_err(|e| Error::Corrupt {
        path: meta_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;

    let articles: Vec<ArticleRecord> = read_lines(&dir.join(ARTICLES), |l| {
        serde_json::from_str(l).map_err(|e| e.to_string())
    })?;
    let categories: Vec<CategoryNode> = read_lines(&dir.join(CATEGORIES), |l| {
        serde_json::from_str(l).map_err(|e| e.to_string())
    })?;
    let rows = read_lines(&dir.join(LANGLINKS), |l| {
        let mut parts = l.splitn(3, '\t');
        let (Some(s), Some(lang), Some(title)) = (parts.next(), parts.next(), parts.next()) else {
            return Err("expected source_id<TAB>lang<TAB>title".to_string());
        };
        let s: u64 = s.parse().map_err(|_| format!("bad source id {s:?}"))?;
        Ok((s, lang.to_string(), title.to_string()))
    })?;
    let mut langlinks = LangLinkTable::new();
    for (s, lang, title) in rows {
        langlinks.insert(s, &lang, &title);
    }

    let store = CorpusStore::new(&meta.edition, articles, categories, langlinks)?;
    if store.fingerprint != meta.fingerprint {
        return Err(Error::Integrity {
            expected: meta.fingerprint,
            found: store.fingerprint,
        });
    }
    Ok(store)
}
