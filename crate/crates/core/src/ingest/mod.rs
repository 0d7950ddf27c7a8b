//! Dump ingestion: pages-articles XML (optionally bz2/gz compressed) into a
//! [`CorpusStore`] holding content articles, the category graph and the
//! inter-language links of one edition.

pub mod sql;
mod store;
pub mod wikitext;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use quick_xml::events::Event;
use quick_xml::Reader;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use store::{load_store, persist_store};
pub use wikitext::normalize_title;

use crate::error::{Error, Result};
use wikitext::{LinkContext, PageLinks};

pub type ArticleId = u64;
pub type CategoryId = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub article_id: ArticleId,
    pub title: String,
    pub lang: String,
    /// Sorted, deduplicated.
    pub categories: Vec<CategoryId>,
    /// Plain text, markup removed.
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryNode {
    pub category_id: CategoryId,
    /// Title without the namespace prefix.
    pub title: String,
    /// Sorted, deduplicated subcategory ids. The graph may contain cycles.
    pub children: Vec<CategoryId>,
    /// Sorted ids of member articles.
    pub article_ids: Vec<ArticleId>,
}

/// `(source page id, target language) -> target title`.
///
/// At most one target per key, and each `(language, title)` target is
/// claimed by at most one source. Later conflicting entries are dropped.
#[derive(Debug, Clone, Default)]
pub struct LangLinkTable {
    entries: BTreeMap<(u64, String), String>,
    claimed: HashMap<(String, String), u64>,
}

impl PartialEq for LangLinkTable {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for LangLinkTable {}

impl LangLinkTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a link, returning `false` (and logging) when it conflicts with an
    /// earlier one.
    pub fn insert(&mut self, source: u64, lang: &str, title: &str) -> bool {
        let key = (source, lang.to_string());
        if let Some(existing) = self.entries.get(&key) {
            if *existing != title {
                warn!("langlink conflict: {source} -> {lang}:{title:?} dropped, keeping {existing:?}");
            }
            return false;
        }
        let target = (lang.to_string(), normalize_title(title));
        if let Some(first) = self.claimed.get(&target) {
            warn!(
                "langlink conflict: {lang}:{title:?} already linked from {first}, dropping link from {source}"
            );
            return false;
        }
        self.claimed.insert(target, source);
        self.entries.insert(key, title.to_string());
        true
    }

    pub fn get(&self, source: u64, lang: &str) -> Option<&str> {
        self.entries
            .get(&(source, lang.to_string()))
            .map(String::as_str)
    }

    /// All links of `source`, ordered by language.
    pub fn links_of(&self, source: u64) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .range((source, String::new())..)
            .take_while(move |((s, _), _)| *s == source)
            .map(|((_, l), t)| (l.as_str(), t.as_str()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &str, &str)> {
        self.entries
            .iter()
            .map(|((s, l), t)| (*s, l.as_str(), t.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Immutable snapshot of one edition.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    edition: String,
    articles: BTreeMap<ArticleId, ArticleRecord>,
    categories: BTreeMap<CategoryId, CategoryNode>,
    langlinks: LangLinkTable,
    fingerprint: String,
    article_titles: HashMap<String, ArticleId>,
    category_titles: HashMap<String, CategoryId>,
}

impl PartialEq for CorpusStore {
    fn eq(&self, other: &Self) -> bool {
        self.edition == other.edition
            && self.fingerprint == other.fingerprint
            && self.articles == other.articles
            && self.categories == other.categories
            && self.langlinks == other.langlinks
    }
}

impl CorpusStore {
    /// Assembles a store and checks its referential invariants.
    pub fn new(
        edition: &str,
        articles: Vec<ArticleRecord>,
        categories: Vec<CategoryNode>,
        langlinks: LangLinkTable,
    ) -> Result<Self> {
        let mut article_map = BTreeMap::new();
        for a in articles {
            if article_map.insert(a.article_id, a).is_some() {
                return Err(Error::Invalid("duplicate article id".into()));
            }
        }
        let mut category_map = BTreeMap::new();
        for c in categories {
            let id = c.category_id;
            if category_map.insert(id, c).is_some() {
                return Err(Error::Invalid(format!("duplicate category id {id}")));
            }
        }
        let mut members: BTreeMap<CategoryId, Vec<ArticleId>> = BTreeMap::new();
        for a in article_map.values() {
            for c in &a.categories {
                if !category_map.contains_key(c) {
                    return Err(Error::Invalid(format!(
                        "article {} references missing category {c}",
                        a.article_id
                    )));
                }
                members.entry(*c).or_default().push(a.article_id);
            }
        }
        for c in category_map.values() {
            if let Some(missing) = c.children.iter().find(|ch| !category_map.contains_key(ch)) {
                return Err(Error::Invalid(format!(
                    "category {} has missing child {missing}",
                    c.category_id
                )));
            }
            let expected = members.get(&c.category_id).map(Vec::as_slice).unwrap_or(&[]);
            if c.article_ids != expected {
                return Err(Error::Invalid(format!(
                    "category {} member list disagrees with article records",
                    c.category_id
                )));
            }
        }
        let article_titles = article_map
            .values()
            .map(|a| (normalize_title(&a.title), a.article_id))
            .collect();
        let mut category_titles = HashMap::new();
        for c in category_map.values() {
            if category_titles
                .insert(normalize_title(&c.title), c.category_id)
                .is_some()
            {
                return Err(Error::Invalid(format!("duplicate category title {:?}", c.title)));
            }
        }
        let mut store = Self {
            edition: edition.to_string(),
            articles: article_map,
            categories: category_map,
            langlinks,
            fingerprint: String::new(),
            article_titles,
            category_titles,
        };
        store.fingerprint = store::fingerprint(&store);
        Ok(store)
    }

    pub fn edition(&self) -> &str {
        &self.edition
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn article(&self, id: ArticleId) -> Option<&ArticleRecord> {
        self.articles.get(&id)
    }

    pub fn category(&self, id: CategoryId) -> Option<&CategoryNode> {
        self.categories.get(&id)
    }

    /// Articles in ascending id order.
    pub fn articles(&self) -> impl Iterator<Item = &ArticleRecord> {
        self.articles.values()
    }

    /// Categories in ascending id order.
    pub fn categories(&self) -> impl Iterator<Item = &CategoryNode> {
        self.categories.values()
    }

    pub fn article_count(&self) -> usize {
        self.articles.len()
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    pub fn edge_count(&self) -> usize {
        self.categories.values().map(|c| c.children.len()).sum()
    }

    pub fn langlinks(&self) -> &LangLinkTable {
        &self.langlinks
    }

    pub fn article_by_title(&self, title: &str) -> Option<&ArticleRecord> {
        self.article_titles
            .get(&normalize_title(title))
            .and_then(|id| self.articles.get(id))
    }

    pub fn category_by_title(&self, title: &str) -> Option<&CategoryNode> {
        self.category_titles
            .get(&normalize_title(title))
            .and_then(|id| self.categories.get(id))
    }
}

/// Per-edition markers used to drop redirects and disambiguation pages that
/// lack an explicit flag. All patterns are lowercase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EditionProfile {
    pub lang: String,
    pub redirect_markers: Vec<String>,
    pub disambiguation_templates: Vec<String>,
    pub disambiguation_title_patterns: Vec<String>,
}

const REDIRECT_MARKERS: &[&str] = &[
    "#redirect",
    "#redirection",
    "#redirección",
    "#redirecció",
    "#weiterleitung",
    "#birzuzendu",
    "#redirecteaza",
    "#redirecționare",
    "#ανακατευθυνση",
    "#ανακατεύθυνση",
    "#تحويل",
    "#redireccion",
];

const DISAMBIGUATION_TEMPLATES: &[&str] = &[
    "disambig",
    "disambiguation",
    "dab",
    "numberdis",
    "homonymie",
    "bandeau homonymie",
    "desambiguación",
    "desambiguacion",
    "begriffsklärung",
    "desambiguació",
    "argipen",
    "dezambiguizare",
    "αποσαφήνιση",
    "توضيح",
    "omonimia",
    "homonimia",
];

const DISAMBIGUATION_TITLE_PATTERNS: &[&str] = &[
    "{{numberdis}}",
    "(disambiguation)",
    "(homonymie)",
    "(desambiguación)",
    "(begriffsklärung)",
    "(desambiguació)",
    "(argipena)",
    "(dezambiguizare)",
    "(αποσαφήνιση)",
    "(توضيح)",
    "(omonimia)",
];

impl EditionProfile {
    pub fn for_lang(lang: &str) -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            lang: lang.to_string(),
            redirect_markers: own(REDIRECT_MARKERS),
            disambiguation_templates: own(DISAMBIGUATION_TEMPLATES),
            disambiguation_title_patterns: own(DISAMBIGUATION_TITLE_PATTERNS),
        }
    }

    pub fn is_redirect(&self, body: &str) -> bool {
        wikitext::has_redirect_marker(body, &self.redirect_markers)
    }

    pub fn is_disambiguation(&self, title: &str, body: &str) -> bool {
        let t = title.to_lowercase();
        self.disambiguation_title_patterns
            .iter()
            .any(|p| t.contains(p.as_str()))
            || wikitext::has_template(body, &self.disambiguation_templates)
    }
}

/// Wikipedia edition codes recognized as inline inter-language prefixes.
const LANGUAGE_CODES: &[&str] = &[
    "af", "an", "ar", "ast", "az", "be", "bg", "bn", "br", "bs", "ca", "cs", "cy", "da", "de",
    "el", "en", "eo", "es", "et", "eu", "fa", "fi", "fr", "fy", "ga", "gl", "he", "hi", "hr",
    "hu", "hy", "id", "io", "is", "it", "ja", "ka", "kk", "ko", "la", "lb", "lt", "lv", "mk",
    "ml", "ms", "nl", "nn", "no", "oc", "pl", "pt", "ro", "ru", "sh", "simple", "sk", "sl", "sq",
    "sr", "sv", "sw", "ta", "te", "th", "tl", "tr", "uk", "ur", "uz", "vi", "zh",
];

#[derive(Debug, Clone)]
pub struct DumpOptions {
    pub profile: EditionProfile,
    /// `categorylinks` SQL dump; replaces category tags parsed from wikitext.
    pub category_links_sql: Option<PathBuf>,
    /// `langlinks` SQL dump; replaces inline inter-language links.
    pub langlinks_sql: Option<PathBuf>,
    /// Pages handed to one parallel processing round.
    pub batch_size: usize,
}

impl DumpOptions {
    pub fn for_lang(lang: &str) -> Self {
        Self {
            profile: EditionProfile::for_lang(lang),
            category_links_sql: None,
            langlinks_sql: None,
            batch_size: 4096,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub pages: usize,
    pub articles: usize,
    pub categories: usize,
    pub redirects: usize,
    pub disambiguations: usize,
    pub other_namespaces: usize,
    pub dangling_category_refs: usize,
}

/// Parses a dump with the default profile of `lang`.
pub fn parse_dump(path: &Path, lang: &str) -> Result<CorpusStore> {
    parse_dump_with(path, &DumpOptions::for_lang(lang)).map(|(s, _)| s)
}

/// Opens a possibly compressed file, detecting bz2/gzip by magic bytes.
pub fn open_maybe_compressed(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 3];
    let n = read_prefix(&mut file, &mut magic).map_err(|e| Error::io(path, e))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn BufRead> = if n >= 3 && &magic == b"BZh" {
        Box::new(BufReader::with_capacity(
            1 << 20,
            bzip2::read::MultiBzDecoder::new(file),
        ))
    } else if n >= 2 && magic[..2] == [0x1f, 0x8b] {
        Box::new(BufReader::with_capacity(
            1 << 20,
            flate2::read::MultiGzDecoder::new(file),
        ))
    } else {
        Box::new(BufReader::with_capacity(1 << 20, file))
    };
    Ok(reader)
}

fn read_prefix(file: &mut File, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        let r = file.read(&mut buf[n..])?;
        if r == 0 {
            break;
        }
        n += r;
    }
    Ok(n)
}

#[derive(Debug, Default)]
struct RawPage {
    id: u64,
    ns: i64,
    title: String,
    redirect: bool,
    text: String,
}

enum Processed {
    Article {
        id: u64,
        title: String,
        body: String,
        links: PageLinks,
    },
    Category {
        id: u64,
        title: String,
        links: PageLinks,
    },
    Redirect,
    Disambiguation,
    Skipped,
}

struct Namespaces {
    category_name: String,
    ctx: LinkContext,
}

fn process_page(page: RawPage, ns: &Namespaces, profile: &EditionProfile) -> Processed {
    match page.ns {
        0 => {
            if page.redirect || profile.is_redirect(&page.text) {
                return Processed::Redirect;
            }
            if profile.is_disambiguation(&page.title, &page.text) {
                return Processed::Disambiguation;
            }
            let links = wikitext::extract_links(&page.text, &ns.ctx);
            let body = wikitext::strip_markup(&page.text, &ns.ctx);
            Processed::Article {
                id: page.id,
                title: page.title,
                body,
                links,
            }
        }
        14 => {
            if page.redirect || profile.is_redirect(&page.text) {
                return Processed::Redirect;
            }
            let title = strip_namespace(&page.title, &ns.category_name);
            let links = wikitext::extract_links(&page.text, &ns.ctx);
            Processed::Category {
                id: page.id,
                title: normalize_title(title),
                links,
            }
        }
        _ => Processed::Skipped,
    }
}

fn strip_namespace<'a>(title: &'a str, ns_name: &str) -> &'a str {
    match title.split_once(':') {
        Some((prefix, rest))
            if prefix.eq_ignore_ascii_case(ns_name)
                || prefix.to_lowercase() == ns_name.to_lowercase()
                || prefix.eq_ignore_ascii_case("category") =>
        {
            rest
        }
        _ => title,
    }
}

fn xml_err(reader_pos: u64, e: impl std::fmt::Display) -> Error {
    Error::Xml {
        offset: reader_pos,
        message: e.to_string(),
    }
}

/// Streaming page reader over a MediaWiki export document.
struct PageReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    namespaces: BTreeMap<i64, String>,
    saw_siteinfo: bool,
}

impl<R: BufRead> PageReader<R> {
    fn new(inner: R) -> Self {
        let mut reader = Reader::from_reader(inner);
        reader.config_mut().check_end_names = true;
        Self {
            reader,
            buf: Vec::with_capacity(1 << 16),
            namespaces: BTreeMap::new(),
            saw_siteinfo: false,
        }
    }

    /// Next `<page>`, or `None` at end of document.
    fn next_page(&mut self) -> Result<Option<RawPage>> {
        let mut stack: Vec<String> = Vec::new();
        let mut page: Option<RawPage> = None;
        let mut text = String::new();
        let mut ns_key: Option<i64> = None;
        let mut saw_page_id = false;
        loop {
            self.buf.clear();
            let event = self
                .reader
                .read_event_into(&mut self.buf)
                .map_err(|e| xml_err(self.reader.error_position(), e))?;
            match event {
                Event::Start(e) => {
                    let name = e.name().as_ref().to_string();
                    match name.as_str() {
                        "page" => {
                            page = Some(RawPage::default());
                            saw_page_id = false;
                        }
                        "siteinfo" => self.saw_siteinfo = true,
                        "namespace" => {
                            ns_key = e
                                .try_get_attribute("key")
                                .ok()
                                .flatten()
                                .and_then(|a| a.value.parse().ok());
                        }
                        _ => {}
                    }
                    text.clear();
                    stack.push(name);
                }
                Event::Empty(e) => {
                    let name = e.name();
                    if name.as_ref() == "redirect" {
                        if let Some(p) = page.as_mut() {
                            p.redirect = true;
                        }
                    } else if name.as_ref() == "namespace" {
                        if let Some(key) = e
                            .try_get_attribute("key")
                            .ok()
                            .flatten()
                            .and_then(|a| a.value.parse().ok())
                        {
                            self.namespaces.insert(key, String::new());
                        }
                    }
                }
                Event::Text(t) => text.push_str(&t.xml10_content()),
                Event::CData(t) => text.push_str(&t),
                Event::GeneralRef(r) => {
                    let resolved = match r.resolve_char_ref() {
                        Ok(Some(c)) => Some(c),
                        Ok(None) => match &*r {
                            "lt" => Some('<'),
                            "gt" => Some('>'),
                            "amp" => Some('&'),
                            "quot" => Some('"'),
                            "apos" => Some('\''),
                            _ => None,
                        },
                        Err(e) => return Err(xml_err(self.reader.buffer_position(), e)),
                    };
                    match resolved {
                        Some(c) => text.push(c),
                        None => {
                            return Err(xml_err(self.reader.buffer_position(), format!("unknown entity &{};", &*r)))
                        }
                    }
                }
                Event::End(e) => {
                    let name = e.name().as_ref().to_string();
                    stack.pop();
                    let parent = stack.last().map(String::as_str);
                    match (name.as_str(), parent) {
                        ("namespace", _) => {
                            if let Some(key) = ns_key.take() {
                                self.namespaces.insert(key, text.trim().to_string());
                            }
                        }
                        ("title", Some("page")) => {
                            if let Some(p) = page.as_mut() {
                                p.title = text.trim().to_string();
                            }
                        }
                        ("ns", Some("page")) => {
                            if let Some(p) = page.as_mut() {
                                p.ns = text.trim().parse().map_err(|_| {
                                    xml_err(self.reader.buffer_position(), format!("bad <ns> value {text:?}"))
                                })?;
                            }
                        }
                        ("id", Some("page")) if !saw_page_id => {
                            if let Some(p) = page.as_mut() {
                                p.id = text.trim().parse().map_err(|_| {
                                    xml_err(self.reader.buffer_position(), format!("bad <id> value {text:?}"))
                                })?;
                                saw_page_id = true;
                            }
                        }
                        ("text", Some("revision")) => {
                            if let Some(p) = page.as_mut() {
                                // Last revision wins in multi-revision exports.
                                p.text = std::mem::take(&mut text);
                            }
                        }
                        ("page", _) => {
                            if !saw_page_id {
                                return Err(xml_err(self.reader.buffer_position(), "page without <id>"));
                            }
                            return Ok(page.take());
                        }
                        _ => {}
                    }
                    text.clear();
                }
                Event::Eof => {
                    if page.is_some() || !stack.is_empty() {
                        return Err(xml_err(self.reader.buffer_position(), "unexpected end of document"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn namespaces(&self) -> Result<Namespaces> {
        if !self.saw_siteinfo {
            return Err(Error::Config(
                "dump has no <siteinfo> namespace table".into(),
            ));
        }
        if !self.namespaces.contains_key(&0) {
            return Err(Error::Config("namespace table lacks the main namespace (0)".into()));
        }
        let category_name = self
            .namespaces
            .get(&14)
            .cloned()
            .ok_or_else(|| Error::Config("namespace table lacks Category (14)".into()))?;
        let mut prefixes = vec!["category".to_string()];
        let localized = category_name.to_lowercase();
        if !prefixes.contains(&localized) {
            prefixes.push(localized);
        }
        Ok(Namespaces {
            category_name,
            ctx: LinkContext {
                category_prefixes: prefixes,
                language_codes: LANGUAGE_CODES.iter().map(|s| s.to_string()).collect(),
                own_lang: String::new(),
            },
        })
    }
}

/// Parses a dump and reports page-level statistics alongside the store.
pub fn parse_dump_with(path: &Path, opts: &DumpOptions) -> Result<(CorpusStore, IngestStats)> {
    let lang = opts.profile.lang.clone();
    let mut pages = PageReader::new(open_maybe_compressed(path)?);
    let mut stats = IngestStats::default();
    let mut processed: Vec<Processed> = Vec::new();
    let mut ns: Option<Namespaces> = None;
    let mut batch: Vec<RawPage> = Vec::with_capacity(opts.batch_size);

    loop {
        let next = pages.next_page()?;
        let done = next.is_none();
        if let Some(p) = next {
            if ns.is_none() {
                let mut n = pages.namespaces()?;
                n.ctx.own_lang = lang.clone();
                ns = Some(n);
            }
            stats.pages += 1;
            batch.push(p);
        }
        if (done || batch.len() >= opts.batch_size) && !batch.is_empty() {
            let n = ns.as_ref().expect("set with first page");
            let chunk: Vec<Processed> = std::mem::take(&mut batch)
                .into_par_iter()
                .map(|p| process_page(p, n, &opts.profile))
                .collect();
            processed.extend(chunk);
        }
        if done {
            break;
        }
    }
    if ns.is_none() && stats.pages == 0 {
        // A document without pages still has to declare its namespaces.
        pages.namespaces()?;
    }

    assemble(&lang, processed, opts, &mut stats).map(|s| (s, stats))
}

fn assemble(
    lang: &str,
    processed: Vec<Processed>,
    opts: &DumpOptions,
    stats: &mut IngestStats,
) -> Result<CorpusStore> {
    struct PendingArticle {
        id: u64,
        title: String,
        body: String,
        categories: Vec<String>,
    }
    let mut articles: Vec<PendingArticle> = Vec::new();
    let mut cat_pages: Vec<(u64, String, Vec<String>)> = Vec::new();
    let mut inline_links: Vec<(u64, String, String)> = Vec::new();

    for p in processed {
        match p {
            Processed::Article {
                id,
                title,
                body,
                links,
            } => {
                inline_links.extend(links.langlinks.into_iter().map(|(l, t)| (id, l, t)));
                articles.push(PendingArticle {
                    id,
                    title,
                    body,
                    categories: links.categories,
                });
            }
            Processed::Category { id, title, links } => {
                inline_links.extend(links.langlinks.into_iter().map(|(l, t)| (id, l, t)));
                cat_pages.push((id, title, links.categories));
            }
            Processed::Redirect => stats.redirects += 1,
            Processed::Disambiguation => stats.disambiguations += 1,
            Processed::Skipped => stats.other_namespaces += 1,
        }
    }

    let mut title_to_cat: HashMap<String, u64> = HashMap::new();
    let mut cat_titles: BTreeMap<u64, String> = BTreeMap::new();
    for (id, title, _) in &cat_pages {
        if let Some(prev) = title_to_cat.get(title) {
            warn!("duplicate category title {title:?}: keeping page {prev}, dropping {id}");
            continue;
        }
        title_to_cat.insert(title.clone(), *id);
        cat_titles.insert(*id, title.clone());
    }

    // (member page id, category title) pairs, from SQL when supplied.
    let mut memberships: Vec<(u64, String)> = Vec::new();
    match &opts.category_links_sql {
        Some(sql_path) => {
            let reader = open_maybe_compressed(sql_path)?;
            sql::for_each_row(reader, "categorylinks", |row| {
                if let (Some(from), Some(to)) = (
                    row.first().and_then(sql::SqlValue::as_u64),
                    row.get(1).and_then(sql::SqlValue::as_text),
                ) {
                    memberships.push((from, normalize_title(to)));
                }
                Ok(())
            })?;
        }
        None => {
            for a in &articles {
                memberships.extend(a.categories.iter().map(|c| (a.id, c.clone())));
            }
            for (id, _, parents) in &cat_pages {
                if cat_titles.contains_key(id) {
                    memberships.extend(parents.iter().map(|c| (*id, c.clone())));
                }
            }
        }
    }

    let article_ids: BTreeSet<u64> = articles.iter().map(|a| a.id).collect();
    let mut article_cats: HashMap<u64, BTreeSet<u64>> = HashMap::new();
    let mut children: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for (member, cat_title) in memberships {
        let Some(&cat) = title_to_cat.get(&cat_title) else {
            stats.dangling_category_refs += 1;
            debug!("reference to category {cat_title:?} without a page");
            continue;
        };
        if article_ids.contains(&member) {
            article_cats.entry(member).or_default().insert(cat);
        } else if cat_titles.contains_key(&member) {
            children.entry(cat).or_default().insert(member);
        }
    }

    let mut members: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut records = Vec::with_capacity(articles.len());
    let mut seen = BTreeSet::new();
    for a in articles {
        if !seen.insert(a.id) {
            warn!("duplicate article id {} dropped", a.id);
            continue;
        }
        let cats: Vec<u64> = article_cats
            .remove(&a.id)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        for c in &cats {
            members.entry(*c).or_default().push(a.id);
        }
        records.push(ArticleRecord {
            article_id: a.id,
            title: a.title,
            lang: lang.to_string(),
            categories: cats,
            body: a.body,
        });
    }
    let nodes: Vec<CategoryNode> = cat_titles
        .into_iter()
        .map(|(id, title)| {
            let mut article_ids = members.remove(&id).unwrap_or_default();
            article_ids.sort_unstable();
            CategoryNode {
                category_id: id,
                title,
                children: children
                    .remove(&id)
                    .map(|s| s.into_iter().collect())
                    .unwrap_or_default(),
                article_ids,
            }
        })
        .collect();

    let retained: BTreeSet<u64> = records
        .iter()
        .map(|a| a.article_id)
        .chain(nodes.iter().map(|c| c.category_id))
        .collect();
    let mut langlinks = LangLinkTable::new();
    match &opts.langlinks_sql {
        Some(sql_path) => {
            let reader = open_maybe_compressed(sql_path)?;
            sql::for_each_row(reader, "langlinks", |row| {
                if let (Some(from), Some(l), Some(t)) = (
                    row.first().and_then(sql::SqlValue::as_u64),
                    row.get(1).and_then(sql::SqlValue::as_text),
                    row.get(2).and_then(sql::SqlValue::as_text),
                ) {
                    if retained.contains(&from) && !t.is_empty() && l != lang {
                        langlinks.insert(from, l, t);
                    }
                }
                Ok(())
            })?;
        }
        None => {
            for (from, l, t) in inline_links {
                if retained.contains(&from) {
                    langlinks.insert(from, &l, &t);
                }
            }
        }
    }

    stats.articles = records.len();
    stats.categories = nodes.len();
    info!(
        "{lang}: {} pages, {} articles, {} categories, {} redirects, {} disambiguations dropped",
        stats.pages, stats.articles, stats.categories, stats.redirects, stats.disambiguations
    );
    CorpusStore::new(lang, records, nodes, langlinks)
}
