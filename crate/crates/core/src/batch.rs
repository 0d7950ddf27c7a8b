//! Reproducible batch runs over several languages, domains and systems,
//! ending in a `manifest.json` that hashes every artifact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{error, info};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::align::{align_languages, write_outputs as write_aligned, AlignMode};
use crate::domainness::{self, esa::DEFAULT_REFERENCE_FLOOR, DomainnessReport, EsaSpace, MetricsConfig};
use crate::error::{Error, Result};
use crate::ingest::{load_store, ArticleId, CategoryNode, CorpusStore};
use crate::ir::{self, InvertedIndex};
use crate::system::SystemSpec;
use crate::text::{load_stopwords, PreprocessConfig};
use crate::vocabulary::{
    build_vocabulary, find_root_category, preprocess_articles, select_seed_articles, CapMode,
};
use crate::wt;

/// A domain and, optionally, its root category title per language.
///
/// Written `Name` or `Name=en:Root,fr:Racine`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub roots: BTreeMap<String, String>,
}

impl DomainSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            roots: BTreeMap::new(),
        }
    }

    /// Directory-safe form of the name.
    pub fn slug(&self) -> String {
        slug(&self.name)
    }
}

pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, roots) = match s.split_once('=') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        if name.is_empty() {
            return Err(Error::Config(format!("empty domain name in {s:?}")));
        }
        let mut spec = DomainSpec::new(name);
        for part in roots.into_iter().flat_map(|r| r.split(',')) {
            let (lang, title) = part
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("expected lang:Title, got {part:?}")))?;
            spec.roots.insert(lang.trim().to_string(), title.trim().to_string());
        }
        Ok(spec)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.roots.is_empty() {
            let roots: Vec<String> = self.roots.iter().map(|(l, t)| format!("{l}:{t}")).collect();
            write!(f, "={}", roots.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Holds one persisted store per language, in `<store_root>/<lang>`.
    pub store_root: PathBuf,
    pub languages: Vec<String>,
    pub domains: Vec<DomainSpec>,
    pub systems: Vec<SystemSpec>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads across (language, domain) units; 0 picks a default.
    pub jobs: usize,
    pub probe_depth: usize,
    pub metrics: MetricsConfig,
    /// Largest ESA reference set; bigger stores are sampled with `seed`.
    pub esa_reference_size: usize,
    pub esa_floor: usize,
    pub align: bool,
    pub stopwords: BTreeMap<String, PathBuf>,
}

impl RunConfig {
    pub fn new(store_root: &Path, out_dir: &Path) -> Self {
        Self {
            store_root: store_root.to_path_buf(),
            languages: Vec::new(),
            domains: Vec::new(),
            systems: Vec::new(),
            out_dir: out_dir.to_path_buf(),
            seed: 0,
            jobs: 0,
            probe_depth: wt::DEFAULT_PROBE_DEPTH,
            metrics: MetricsConfig::default(),
            esa_reference_size: DEFAULT_REFERENCE_FLOOR,
            esa_floor: DEFAULT_REFERENCE_FLOOR,
            align: true,
            stopwords: BTreeMap::new(),
        }
    }

    pub fn preprocess_config(&self, lang: &str) -> Result<PreprocessConfig> {
        let cfg = PreprocessConfig::for_lang(lang);
        Ok(match self.stopwords.get(lang) {
            Some(path) => cfg.with_stopwords(load_stopwords(path)?),
            None => cfg,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub lang: String,
    pub domain: String,
    pub system: Option<String>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitEntry {
    pub lang: String,
    pub domain: String,
    pub system: String,
    pub dir: String,
    pub articles: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub languages: Vec<String>,
    pub domains: Vec<String>,
    pub systems: Vec<String>,
    pub seed: u64,
    /// Fingerprint of each input store.
    pub stores: BTreeMap<String, String>,
    pub extractions: Vec<UnitEntry>,
    pub failures: Vec<Failure>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

impl BatchOutcome {
    pub fn succeeded(&self) -> bool {
        self.manifest.failures.is_empty()
    }
}

/// Everything shared by the units of one language.
struct LangContext {
    store: CorpusStore,
    cfg: PreprocessConfig,
    index: Option<InvertedIndex>,
    esa: EsaSpace,
}

struct SystemResult {
    system: SystemSpec,
    article_ids: BTreeSet<ArticleId>,
    report: DomainnessReport,
    dir: PathBuf,
}

struct UnitResult {
    lang: String,
    domain: String,
    systems: Vec<SystemResult>,
    failures: Vec<Failure>,
}

fn esa_reference(store: &CorpusStore, max: usize, seed: u64) -> BTreeSet<ArticleId> {
    let ids: Vec<ArticleId> = store.articles().map(|a| a.article_id).collect();
    if ids.len() <= max {
        return ids.into_iter().collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, ids.len(), max)
        .into_iter()
        .map(|i| ids[i])
        .collect()
}

/// ESA space over at most `max` articles of `store`, sampled with a seed
/// derived from `seed` and the edition.
pub fn reference_space(store: &CorpusStore, cfg: &PreprocessConfig, max: usize, floor: usize, seed: u64) -> EsaSpace {
    let lang = store.edition();
    let reference = esa_reference(store, max, lang_seed(seed, lang));
    let ref_docs = preprocess_articles(store, &reference, cfg);
    let docs: Vec<(ArticleId, Vec<String>)> = reference.into_iter().zip(ref_docs).collect();
    EsaSpace::build(lang, &docs, floor)
}

fn lang_seed(seed: u64, lang: &str) -> u64 {
    let digest = Sha256::digest(format!("{seed}:{lang}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn load_context(cfg: &RunConfig, lang: &str) -> Result<LangContext> {
    let store = load_store(&cfg.store_root.join(lang))?;
    if store.edition() != lang {
        return Err(Error::Config(format!(
            "store under {lang}/ holds edition {}",
            store.edition()
        )));
    }
    let pcfg = cfg.preprocess_config(lang)?;
    let needs_index = cfg
        .systems
        .iter()
        .any(|s| matches!(s, SystemSpec::Ir { .. }));
    let index = needs_index.then(|| ir::build_index(&store, &pcfg));
    let esa = reference_space(&store, &pcfg, cfg.esa_reference_size, cfg.esa_floor, cfg.seed);
    Ok(LangContext {
        store,
        cfg: pcfg,
        index,
        esa,
    })
}

/// Strips a namespace prefix such as `Catégorie:` from a linked title.
fn strip_prefix(title: &str) -> &str {
    title.split_once(':').map_or(title, |(_, rest)| rest)
}

/// Root category of `domain` in `lang`: an explicit per-language title, the
/// domain name itself, or the target of an inter-language link from the
/// domain's root in another language.
pub fn resolve_root<'s>(
    domain: &DomainSpec,
    lang: &str,
    store: &'s CorpusStore,
    others: &[&CorpusStore],
) -> Result<&'s CategoryNode> {
    if let Some(title) = domain.roots.get(lang) {
        return find_root_category(store, title);
    }
    let direct = find_root_category(store, &domain.name);
    if direct.is_ok() {
        return direct;
    }
    for other in others {
        let name = domain
            .roots
            .get(other.edition())
            .map(String::as_str)
            .unwrap_or(&domain.name);
        if let Ok(root) = find_root_category(other, name) {
            if let Some(title) = other.langlinks().get(root.category_id, lang) {
                if let Ok(found) = find_root_category(store, strip_prefix(title)) {
                    return Ok(found);
                }
            }
        }
    }
    direct
}

fn run_unit(
    cfg: &RunConfig,
    lang: &str,
    domain: &DomainSpec,
    ctx: &LangContext,
    others: &[&CorpusStore],
) -> UnitResult {
    let mut result = UnitResult {
        lang: lang.to_string(),
        domain: domain.name.clone(),
        systems: Vec::new(),
        failures: Vec::new(),
    };
    let fail = |system: Option<&SystemSpec>, e: Error| {
        error!("{lang}/{}: {e}", domain.name);
        Failure {
            lang: lang.to_string(),
            domain: domain.name.clone(),
            system: system.map(ToString::to_string),
            error: e.to_string(),
        }
    };
    let unit_dir = cfg.out_dir.join(lang).join(domain.slug());

    let prepared = (|| -> Result<_> {
        let root = resolve_root(domain, lang, &ctx.store, others)?;
        let seeds = select_seed_articles(&ctx.store, root)?;
        let vocab = build_vocabulary(&ctx.store, &domain.name, &seeds, &ctx.cfg, CapMode::Top10Pct)?;
        fs::create_dir_all(&unit_dir).map_err(|e| Error::io(&unit_dir, e))?;
        vocab.write_tsv(&unit_dir.join("vocabulary.tsv"))?;
        let root_docs = preprocess_articles(&ctx.store, &seeds, &ctx.cfg);
        info!(
            "{lang}/{}: root {:?}, {} seeds, {} vocabulary terms",
            domain.name,
            root.title,
            seeds.len(),
            vocab.len()
        );
        Ok((root, vocab, root_docs))
    })();
    let (root, vocab, root_docs) = match prepared {
        Ok(p) => p,
        Err(e) => {
            result.failures.push(fail(None, e));
            return result;
        }
    };

    for system in &cfg.systems {
        let dir = unit_dir.join(system.to_string());
        let outcome = (|| -> Result<SystemResult> {
            let article_ids = match *system {
                SystemSpec::Wt { k, cap } => {
                    let v = vocab.capped(cap);
                    let ex = wt::traverse_with_probe(&ctx.store, root, &v, k as f64, &ctx.cfg, cfg.probe_depth)?;
                    wt::write_outputs(&ex, &v, &dir)?;
                    ex.article_ids
                }
                SystemSpec::Ir {
                    query_size,
                    threshold,
                } => {
                    let index = ctx.index.as_ref().expect("index built for IR systems");
                    let ex = ir::extract(index, &vocab, query_size, threshold)?;
                    ir::write_outputs(&ex, &vocab, &dir)?;
                    ex.article_ids
                }
            };
            let docs = preprocess_articles(&ctx.store, &article_ids, &ctx.cfg);
            let collection = format!("{lang}/{}/{system}", domain.slug());
            let report = domainness::compute_report(
                &collection,
                &docs,
                &vocab.top(cfg.metrics.vocab_size),
                &root_docs,
                Some(&ctx.esa),
                &cfg.metrics,
            )?;
            Ok(SystemResult {
                system: *system,
                article_ids,
                report,
                dir: dir.clone(),
            })
        })();
        match outcome {
            Ok(r) => result.systems.push(r),
            Err(e) => result.failures.push(fail(Some(system), e)),
        }
    }
    result
}

fn relative(path: &Path, base: &Path) -> String {
    path.strip_prefix(base)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

/// SHA-256 of every file under `dir` except `manifest.json`, ordered by
/// relative path.
pub fn hash_artifacts(dir: &Path) -> Result<Vec<Artifact>> {
    let mut files = Vec::new();
    collect_files(dir, &mut files)?;
    let mut artifacts = Vec::new();
    for f in files {
        let rel = relative(&f, dir);
        if rel == "manifest.json" {
            continue;
        }
        let bytes = fs::read(&f).map_err(|e| Error::io(&f, e))?;
        artifacts.push(Artifact {
            path: rel,
            sha256: hex::encode(Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
    }
    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(artifacts)
}

/// Runs every (language, domain) unit. Sub-step failures are recorded and
/// the batch continues; only an unusable configuration or output directory
/// is an error.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchOutcome> {
    if cfg.languages.is_empty() || cfg.domains.is_empty() || cfg.systems.is_empty() {
        return Err(Error::Config("a run needs languages, domains and systems".into()));
    }
    cfg.metrics.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    pool.install(|| {
        let mut failures = Vec::new();
        let loaded: Vec<(String, Result<LangContext>)> = cfg
            .languages
            .par_iter()
            .map(|lang| (lang.clone(), load_context(cfg, lang)))
            .collect();
        let mut contexts: BTreeMap<String, LangContext> = BTreeMap::new();
        for (lang, ctx) in loaded {
            match ctx {
                Ok(c) => {
                    contexts.insert(lang, c);
                }
                Err(e) => {
                    error!("{lang}: {e}");
                    for d in &cfg.domains {
                        failures.push(Failure {
                            lang: lang.clone(),
                            domain: d.name.clone(),
                            system: None,
                            error: e.to_string(),
                        });
                    }
                }
            }
        }

        let units: Vec<(&String, &DomainSpec)> = cfg
            .languages
            .iter()
            .filter(|l| contexts.contains_key(*l))
            .flat_map(|l| cfg.domains.iter().map(move |d| (l, d)))
            .collect();
        let results: Vec<UnitResult> = units
            .par_iter()
            .map(|(lang, domain)| {
                let others: Vec<&CorpusStore> = contexts
                    .iter()
                    .filter(|(l, _)| l != lang)
                    .map(|(_, c)| &c.store)
                    .collect();
                run_unit(cfg, lang, domain, &contexts[*lang], &others)
            })
            .collect();

        let mut reports: Vec<DomainnessReport> = Vec::new();
        let mut extractions = Vec::new();
        for r in &results {
            failures.extend(r.failures.iter().cloned());
            for s in &r.systems {
                reports.push(s.report.clone());
                extractions.push(UnitEntry {
                    lang: r.lang.clone(),
                    domain: r.domain.clone(),
                    system: s.system.to_string(),
                    dir: relative(&s.dir, &cfg.out_dir),
                    articles: s.article_ids.len(),
                });
            }
        }
        domainness::assign_dom(&mut reports);
        let dirs = results.iter().flat_map(|r| r.systems.iter().map(|s| &s.dir));
        for (report, dir) in reports.iter().zip(dirs) {
            domainness::write_report_json(report, &dir.join("report.json"))?;
        }
        domainness::write_reports_csv(&reports, &cfg.out_dir.join("report.csv"))?;

        if cfg.align {
            failures.extend(align_all(cfg, &contexts, &results)?);
        }

        let manifest = Manifest {
            languages: cfg.languages.clone(),
            domains: cfg.domains.iter().map(ToString::to_string).collect(),
            systems: cfg.systems.iter().map(ToString::to_string).collect(),
            seed: cfg.seed,
            stores: contexts
                .iter()
                .map(|(l, c)| (l.clone(), c.store.fingerprint().to_string()))
                .collect(),
            extractions,
            failures,
            artifacts: hash_artifacts(&cfg.out_dir)?,
        };
        let manifest_path = cfg.out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
        Ok(BatchOutcome {
            manifest,
            manifest_path,
        })
    })
}

fn align_all(
    cfg: &RunConfig,
    contexts: &BTreeMap<String, LangContext>,
    results: &[UnitResult],
) -> Result<Vec<Failure>> {
    let mut failures = Vec::new();
    let stores: Vec<&CorpusStore> = contexts.values().map(|c| &c.store).collect();
    for domain in &cfg.domains {
        for system in &cfg.systems {
            let selections: Vec<(String, BTreeSet<ArticleId>)> = cfg
                .languages
                .iter()
                .filter_map(|lang| {
                    results
                        .iter()
                        .find(|r| &r.lang == lang && r.domain == domain.name)
                        .and_then(|r| r.systems.iter().find(|s| s.system == *system))
                        .map(|s| (lang.clone(), s.article_ids.clone()))
                })
                .collect();
            if selections.len() < 2 {
                continue;
            }
            for mode in [AlignMode::Intersection, AlignMode::Union] {
                let dir = cfg
                    .out_dir
                    .join("aligned")
                    .join(domain.slug())
                    .join(system.to_string())
                    .join(mode.name());
                match align_languages(&selections, &stores, mode) {
                    Ok(set) => write_aligned(&set, &stores, &dir)?,
                    Err(e) => failures.push(Failure {
                        lang: selections
                            .iter()
                            .map(|(l, _)| l.as_str())
                            .collect::<Vec<_>>()
                            .join("+"),
                        domain: domain.name.clone(),
                        system: Some(system.to_string()),
                        error: e.to_string(),
                    }),
                }
            }
        }
    }
    Ok(failures)
}
