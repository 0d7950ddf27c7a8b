//! Cross-language alignment of per-language selections through
//! inter-language links.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fs;
use std::path::Path;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ArticleId, CorpusStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMode {
    Intersection,
    Union,
}

impl AlignMode {
    pub fn name(self) -> &'static str {
        match self {
            AlignMode::Intersection => "intersection",
            AlignMode::Union => "union",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedSet {
    pub languages: Vec<String>,
    /// One slot per language, in `languages` order.
    pub tuples: Vec<Vec<Option<ArticleId>>>,
    pub mode: AlignMode,
}

type Node = (usize, ArticleId);

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so components are labelled deterministically.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

struct Linker<'a> {
    languages: Vec<String>,
    stores: Vec<&'a CorpusStore>,
}

impl<'a> Linker<'a> {
    fn new(extractions: &[(String, BTreeSet<ArticleId>)], stores: &[&'a CorpusStore]) -> Result<Self> {
        if extractions.len() < 2 {
            return Err(Error::Invalid("alignment needs at least two languages".into()));
        }
        let mut languages = Vec::new();
        let mut ordered = Vec::new();
        for (lang, _) in extractions {
            if languages.contains(lang) {
                return Err(Error::Invalid(format!("language {lang} given twice")));
            }
            let store = stores
                .iter()
                .find(|s| s.edition() == lang)
                .ok_or_else(|| Error::Invalid(format!("no store for language {lang}")))?;
            languages.push(lang.clone());
            ordered.push(*store);
        }
        Ok(Self {
            languages,
            stores: ordered,
        })
    }

    /// Resolved inter-language neighbours of a node.
    fn neighbours(&self, (li, id): Node) -> Vec<Node> {
        let store = self.stores[li];
        let mut out = Vec::new();
        for (lj, lang) in self.languages.iter().enumerate() {
            if lj == li {
                continue;
            }
            if let Some(title) = store.langlinks().get(id, lang) {
                match self.stores[lj].article_by_title(title) {
                    Some(a) => out.push((lj, a.article_id)),
                    None => debug!("{}:{id} links to missing {lang}:{title:?}", self.languages[li]),
                }
            }
        }
        out
    }
}

fn align(
    extractions: &[(String, BTreeSet<ArticleId>)],
    stores: &[&CorpusStore],
    mode: AlignMode,
) -> Result<AlignedSet> {
    let linker = Linker::new(extractions, stores)?;
    let nl = linker.languages.len();

    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut selected: Vec<bool> = Vec::new();
    for (li, (_, ids)) in extractions.iter().enumerate() {
        for id in ids {
            if linker.stores[li].article(*id).is_none() {
                warn!("selected {}:{id} is not in the store", linker.languages[li]);
                continue;
            }
            index.insert((li, *id), nodes.len());
            nodes.push((li, *id));
            selected.push(true);
        }
    }

    // Edges are symmetrized: a link in either direction connects two nodes.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut queue: VecDeque<usize> = (0..nodes.len()).collect();
    while let Some(i) = queue.pop_front() {
        for nb in linker.neighbours(nodes[i]) {
            let j = match index.get(&nb) {
                Some(&j) => j,
                None if mode == AlignMode::Union => {
                    let j = nodes.len();
                    index.insert(nb, j);
                    nodes.push(nb);
                    selected.push(false);
                    queue.push_back(j);
                    j
                }
                None => continue,
            };
            edges.push((i, j));
        }
    }

    let mut uf = UnionFind::new(nodes.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        components.entry(uf.find(i)).or_default().push(i);
    }

    let mut tuples = Vec::new();
    for members in components.values() {
        let mut slots: Vec<Option<ArticleId>> = vec![None; nl];
        let mut dropped: Vec<usize> = Vec::new();
        let mut by_lang: Vec<Vec<usize>> = vec![Vec::new(); nl];
        for &m in members {
            by_lang[nodes[m].0].push(m);
        }
        for (li, group) in by_lang.iter_mut().enumerate() {
            group.sort_by_key(|&m| nodes[m].1);
            if let Some((&keep, rest)) = group.split_first() {
                slots[li] = Some(nodes[keep].1);
                if !rest.is_empty() {
                    warn!(
                        "conflicting {} articles {:?} in one alignment group; keeping {}",
                        linker.languages[li],
                        rest.iter().map(|&m| nodes[m].1).collect::<Vec<_>>(),
                        nodes[keep].1
                    );
                    dropped.extend_from_slice(rest);
                }
            }
        }
        let has_selected = members
            .iter()
            .any(|&m| selected[m] && !dropped.contains(&m));
        match mode {
            AlignMode::Intersection => {
                if slots.iter().all(Option::is_some) {
                    tuples.push(slots);
                }
            }
            AlignMode::Union => {
                if has_selected {
                    tuples.push(slots);
                }
                for m in dropped.into_iter().filter(|&m| selected[m]) {
                    let mut own = vec![None; nl];
                    own[nodes[m].0] = Some(nodes[m].1);
                    tuples.push(own);
                }
            }
        }
    }
    tuples.sort_by_key(|t| {
        t.iter()
            .map(|s| s.unwrap_or(u64::MAX))
            .collect::<Vec<_>>()
    });
    Ok(AlignedSet {
        languages: linker.languages,
        tuples,
        mode,
    })
}

/// Tuples whose members were all selected in their own language and are
/// connected through inter-language links.
pub fn intersect_languages(
    extractions: &[(String, BTreeSet<ArticleId>)],
    stores: &[&CorpusStore],
) -> Result<AlignedSet> {
    align(extractions, stores, AlignMode::Intersection)
}

/// Tuples seeded by any language's selection, completed with linked
/// articles whether or not they were selected.
pub fn union_languages(
    extractions: &[(String, BTreeSet<ArticleId>)],
    stores: &[&CorpusStore],
) -> Result<AlignedSet> {
    align(extractions, stores, AlignMode::Union)
}

pub fn align_languages(
    extractions: &[(String, BTreeSet<ArticleId>)],
    stores: &[&CorpusStore],
    mode: AlignMode,
) -> Result<AlignedSet> {
    align(extractions, stores, mode)
}

/// Title table: a header of language codes followed by one row per tuple.
/// Absent slots are empty strings.
pub fn extract_parallel_titles(aligned: &AlignedSet, stores: &[&CorpusStore]) -> Result<Vec<Vec<String>>> {
    let mut ordered = Vec::new();
    for lang in &aligned.languages {
        ordered.push(
            stores
                .iter()
                .find(|s| s.edition() == lang)
                .ok_or_else(|| Error::Invalid(format!("no store for language {lang}")))?,
        );
    }
    let mut rows = vec![aligned.languages.clone()];
    for t in &aligned.tuples {
        rows.push(
            t.iter()
                .zip(&ordered)
                .map(|(slot, store)| {
                    slot.and_then(|id| store.article(id))
                        .map(|a| a.title.clone())
                        .unwrap_or_default()
                })
                .collect(),
        );
    }
    Ok(rows)
}

pub fn aligned_tsv(aligned: &AlignedSet) -> String {
    let mut out = String::new();
    for t in &aligned.tuples {
        let cells: Vec<String> = t
            .iter()
            .zip(&aligned.languages)
            .map(|(slot, lang)| slot.map(|id| format!("{lang}:{id}")).unwrap_or_default())
            .collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

pub fn titles_tsv(rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

/// Writes `aligned.tsv` and `titles.tsv` into `dir`.
pub fn write_outputs(aligned: &AlignedSet, stores: &[&CorpusStore], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("aligned.tsv");
    fs::write(&path, aligned_tsv(aligned)).map_err(|e| Error::io(&path, e))?;
    let rows = extract_parallel_titles(aligned, stores)?;
    let path = dir.join("titles.tsv");
    fs::write(&path, titles_tsv(&rows)).map_err(|e| Error::io(&path, e))
}
