use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info, warn};
use serde::{Deserialize, Serialize};

use wikitailor::align::{align_languages, write_outputs as write_aligned, AlignMode};
use wikitailor::batch::{self, reference_space, DomainSpec, RunConfig};
use wikitailor::domainness::esa::DEFAULT_REFERENCE_FLOOR;
use wikitailor::domainness::pmi::Aggregation;
use wikitailor::domainness::{self, MetricsConfig};
use wikitailor::eval::{self, PrecisionMode};
use wikitailor::ingest::{self, load_store, persist_store, CorpusStore, DumpOptions};
use wikitailor::ir::{self, ThresholdMode};
use wikitailor::system::SystemSpec;
use wikitailor::text::{load_stopwords, PreprocessConfig};
use wikitailor::vocabulary::{
    build_vocabulary, find_root_category, preprocess_articles, select_seed_articles, CapMode, Vocabulary,
};
use wikitailor::wt;

#[derive(Parser, Debug)]
#[command(name = "tailor", version, about = "Domain-specific corpora from Wikipedia dumps")]
struct Cli {
    /// Persisted store, or the directory holding one store per language.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an XML dump into a persisted store.
    Ingest(IngestArgs),
    /// Print store counts.
    Stats,
    /// Build the characteristic vocabulary of a domain.
    Vocab(VocabArgs),
    /// Graph-based extraction from the root category.
    ExtractWt(WtArgs),
    /// Retrieval-based extraction with the domain vocabulary as query.
    ExtractIr(IrArgs),
    /// Align per-language extractions through inter-language links.
    Align(AlignArgs),
    /// Domainness metrics for one or more article collections.
    Domainness(DomainnessArgs),
    /// Stratified evaluation sample of two selections.
    Evalset(EvalsetArgs),
    /// Precision and agreement from annotator judgments.
    Evaluate(EvaluateArgs),
    /// Batch run over languages, domains and systems.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Dump file; bzip2 and gzip are detected.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    lang: Option<String>,
    /// `categorylinks` SQL dump.
    #[arg(long)]
    categorylinks: Option<PathBuf>,
    /// `langlinks` SQL dump.
    #[arg(long)]
    langlinks: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct DomainArgs {
    #[arg(long)]
    domain: Option<String>,
    /// Root category title when it differs from the domain name.
    #[arg(long)]
    root: Option<String>,
    /// Stop-word file replacing the bundled list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VocabArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// `all`, `100`, `500` or any positive size.
    #[arg(long)]
    cap: Option<String>,
}

#[derive(Args, Debug)]
struct WtArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Level threshold in percent.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    vocab_cap: Option<String>,
    #[arg(long)]
    probe_depth: Option<usize>,
    /// Existing vocabulary TSV instead of building one.
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IrArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    query_size: Option<usize>,
    /// `all`, `100` (max/100) or `10` (max/10).
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlignChoice {
    Intersection,
    Union,
    Both,
}

#[derive(Args, Debug)]
struct AlignArgs {
    /// `LANG=FILE` with one article id per line; repeat per language.
    #[arg(long = "set", value_name = "LANG=FILE")]
    sets: Vec<String>,
    #[arg(long, value_enum)]
    mode: Option<AlignChoice>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AggregationChoice {
    Median,
    Mean,
}

#[derive(Args, Debug, Clone, Default)]
struct MetricArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    /// Augmented-frequency constant K.
    #[arg(long)]
    density_k: Option<f64>,
    #[arg(long, value_enum)]
    aggregation: Option<AggregationChoice>,
    /// Vocabulary terms used by the metrics.
    #[arg(long)]
    vocab_size: Option<usize>,
    /// Largest ESA reference sample.
    #[arg(long)]
    esa_reference_size: Option<usize>,
    /// Reference size below which a warning is logged.
    #[arg(long)]
    esa_floor: Option<usize>,
}

#[derive(Args, Debug)]
struct DomainnessArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// `NAME=FILE` with one article id per line; repeat per collection.
    #[arg(long = "collection", value_name = "NAME=FILE")]
    collections: Vec<String>,
    #[command(flatten)]
    metrics: MetricArgs,
}

#[derive(Args, Debug)]
struct EvalsetArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Articles drawn from each stratum.
    #[arg(long)]
    per_stratum: Option<usize>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// `NAME=FILE` judgment CSV; repeat per system.
    #[arg(long = "judgments", value_name = "NAME=FILE")]
    judgments: Vec<String>,
    /// `report.csv` to correlate precision with.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Comma-separated language codes.
    #[arg(long, value_delimiter = ',')]
    langs: Vec<String>,
    /// `Name` or `Name=en:Root,fr:Racine`; repeatable.
    #[arg(long = "domain")]
    domains: Vec<String>,
    /// System name such as `50-WT100` or `100-IR10`; repeatable.
    #[arg(long = "system")]
    systems: Vec<String>,
    #[arg(long)]
    probe_depth: Option<usize>,
    #[arg(long)]
    no_align: bool,
    #[command(flatten)]
    metrics: MetricArgs,
}

/// Defaults read from `--config`; every key mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    store: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
    dump: Option<PathBuf>,
    lang: Option<String>,
    categorylinks: Option<PathBuf>,
    langlinks: Option<PathBuf>,
    domain: Option<String>,
    root: Option<String>,
    stopwords: Option<PathBuf>,
    cap: Option<String>,
    k: Option<f64>,
    vocab_cap: Option<String>,
    probe_depth: Option<usize>,
    vocab: Option<PathBuf>,
    query_size: Option<usize>,
    threshold: Option<String>,
    mode: Option<AlignChoice>,
    epsilon: Option<f64>,
    density_k: Option<f64>,
    aggregation: Option<AggregationChoice>,
    vocab_size: Option<usize>,
    esa_reference_size: Option<usize>,
    esa_floor: Option<usize>,
    per_stratum: Option<usize>,
    langs: Option<Vec<String>>,
    domains: Option<Vec<String>>,
    systems: Option<Vec<String>>,
    align: Option<bool>,
    /// Stop-word files per language for batch runs.
    stopword_files: Option<BTreeMap<String, PathBuf>>,
}

/// Bad invocation; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> anyhow::Result<T> {
    flag.or(file)
        .ok_or_else(|| usage(format!("missing --{name} (flag or config key `{}`)", name.replace('-', "_"))))
}

fn exit_status(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<wikitailor::Error>() {
        Some(wikitailor::Error::Config(_) | wikitailor::Error::SystemName { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            error!("{}", describe(&e));
            ExitCode::from(exit_status(&e))
        }
    }
}

/// The error chain joined by ": ", skipping causes already spelled out by
/// an outer message.
fn describe(e: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in e.chain() {
        let part = cause.to_string();
        if text.contains(&part) {
            continue;
        }
        if !text.is_empty() {
            text.push_str(": ");
        }
        text.push_str(&part);
    }
    text
}

struct Ctx {
    store: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: u64,
    jobs: usize,
    file: FileConfig,
}

impl Ctx {
    fn store(&self) -> anyhow::Result<&Path> {
        self.store.as_deref().ok_or_else(|| usage("missing --store"))
    }

    fn out(&self) -> anyhow::Result<&Path> {
        let out = self.out.as_deref().ok_or_else(|| usage("missing --out"))?;
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(out)
    }

    fn preprocess(&self, lang: &str, stopwords: Option<&PathBuf>) -> anyhow::Result<PreprocessConfig> {
        let cfg = PreprocessConfig::for_lang(lang);
        Ok(match stopwords.or(self.file.stopwords.as_ref()) {
            Some(path) => cfg.with_stopwords(load_stopwords(path)?),
            None => cfg,
        })
    }

    fn metrics(&self, m: &MetricArgs) -> anyhow::Result<MetricsConfig> {
        let mut cfg = MetricsConfig::default();
        if let Some(e) = m.epsilon.or(self.file.epsilon) {
            cfg.epsilon = e;
        }
        if let Some(k) = m.density_k.or(self.file.density_k) {
            cfg.k = k;
        }
        if let Some(a) = m.aggregation.or(self.file.aggregation) {
            cfg.aggregation = match a {
                AggregationChoice::Median => Aggregation::Median,
                AggregationChoice::Mean => Aggregation::Mean,
            };
        }
        if let Some(n) = m.vocab_size.or(self.file.vocab_size) {
            cfg.vocab_size = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        store: cli.store.or_else(|| file.store.clone()),
        out: cli.out.or_else(|| file.out.clone()),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        jobs: cli.jobs.or(file.jobs).unwrap_or(0),
        file,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build_global()
        .map_err(|e| anyhow!("thread pool: {e}"))?;

    match cli.command {
        Command::Ingest(a) => cmd_ingest(&ctx, a),
        Command::Stats => cmd_stats(&ctx),
        Command::Vocab(a) => cmd_vocab(&ctx, a),
        Command::ExtractWt(a) => cmd_extract_wt(&ctx, a),
        Command::ExtractIr(a) => cmd_extract_ir(&ctx, a),
        Command::Align(a) => cmd_align(&ctx, a),
        Command::Domainness(a) => cmd_domainness(&ctx, a),
        Command::Evalset(a) => cmd_evalset(&ctx, a),
        Command::Evaluate(a) => cmd_evaluate(&ctx, a),
        Command::Run(a) => cmd_run(&ctx, a),
    }
}

fn cmd_ingest(ctx: &Ctx, a: IngestArgs) -> anyhow::Result<ExitCode> {
    let dump = required(a.dump, ctx.file.dump.clone(), "dump")?;
    let lang = required(a.lang, ctx.file.lang.clone(), "lang")?;
    let store_dir = ctx.store()?;
    let mut opts = DumpOptions::for_lang(&lang);
    opts.category_links_sql = a.categorylinks.or_else(|| ctx.file.categorylinks.clone());
    opts.langlinks_sql = a.langlinks.or_else(|| ctx.file.langlinks.clone());
    let (store, stats) = ingest::parse_dump_with(&dump, &opts)?;
    persist_store(&store, store_dir)?;
    info!(
        "{lang}: {} pages, {} articles, {} categories, {} redirects, {} disambiguation pages",
        stats.pages, stats.articles, stats.categories, stats.redirects, stats.disambiguations
    );
    info!("store written to {} (fingerprint {})", store_dir.display(), store.fingerprint());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StoreStats<'a> {
    edition: &'a str,
    fingerprint: &'a str,
    articles: usize,
    categories: usize,
    edges: usize,
    langlinks: usize,
}

fn cmd_stats(ctx: &Ctx) -> anyhow::Result<ExitCode> {
    let store = load_store(ctx.store()?)?;
    let stats = StoreStats {
        edition: store.edition(),
        fingerprint: store.fingerprint(),
        articles: store.article_count(),
        categories: store.category_count(),
        edges: store.edge_count(),
        langlinks: store.langlinks().len(),
    };
    let json = serde_json::to_string_pretty(&stats)?;
    if ctx.out.is_some() {
        let path = ctx.out()?.join("stats.json");
        fs::write(&path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

/// Store, preprocessing settings, root and seed-based vocabulary of one domain.
struct Prepared {
    store: CorpusStore,
    cfg: PreprocessConfig,
    root_id: u64,
    vocab: Vocabulary,
}

fn prepare(ctx: &Ctx, d: &DomainArgs, vocab_file: Option<&Path>) -> anyhow::Result<Prepared> {
    let domain = required(d.domain.clone(), ctx.file.domain.clone(), "domain")?;
    let store = load_store(ctx.store()?)?;
    let cfg = ctx.preprocess(store.edition(), d.stopwords.as_ref())?;
    let root_title = d.root.clone().or_else(|| ctx.file.root.clone()).unwrap_or_else(|| domain.clone());
    let root = find_root_category(&store, &root_title)?;
    let root_id = root.category_id;
    let vocab = match vocab_file {
        Some(path) => Vocabulary::read_tsv(path, &domain, store.edition(), CapMode::Top10Pct)?,
        None => {
            let seeds = select_seed_articles(&store, root)?;
            build_vocabulary(&store, &domain, &seeds, &cfg, CapMode::Top10Pct)?
        }
    };
    info!("{}: root {:?}, {} vocabulary terms", store.edition(), root.title, vocab.len());
    Ok(Prepared {
        store,
        cfg,
        root_id,
        vocab,
    })
}

fn cmd_vocab(ctx: &Ctx, a: VocabArgs) -> anyhow::Result<ExitCode> {
    let p = prepare(ctx, &a.domain, None)?;
    let cap: CapMode = a.cap.or_else(|| ctx.file.cap.clone()).as_deref().unwrap_or("all").parse()?;
    p.vocab.capped(cap).write_tsv(&ctx.out()?.join("vocabulary.tsv"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_extract_wt(ctx: &Ctx, a: WtArgs) -> anyhow::Result<ExitCode> {
    let k = required(a.k, ctx.file.k, "k")?;
    let cap: CapMode = required(a.vocab_cap, ctx.file.vocab_cap.clone(), "vocab-cap")?.parse()?;
    let probe = a.probe_depth.or(ctx.file.probe_depth).unwrap_or(wt::DEFAULT_PROBE_DEPTH);
    let vocab_file = a.vocab.or_else(|| ctx.file.vocab.clone());
    let out = ctx.out()?.to_path_buf();
    let p = prepare(ctx, &a.domain, vocab_file.as_deref())?;
    let vocab = p.vocab.capped(cap);
    let root = p.store.category(p.root_id).expect("root resolved from this store");
    let ex = wt::traverse_with_probe(&p.store, root, &vocab, k, &p.cfg, probe)?;
    wt::write_outputs(&ex, &vocab, &out)?;
    info!("stop depth {}, {} articles", ex.stop_depth, ex.article_ids.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_extract_ir(ctx: &Ctx, a: IrArgs) -> anyhow::Result<ExitCode> {
    let q = required(a.query_size, ctx.file.query_size, "query-size")?;
    let threshold: ThresholdMode = required(a.threshold, ctx.file.threshold.clone(), "threshold")?.parse()?;
    let vocab_file = a.vocab.or_else(|| ctx.file.vocab.clone());
    let out = ctx.out()?.to_path_buf();
    let p = prepare(ctx, &a.domain, vocab_file.as_deref())?;
    let index = ir::build_index(&p.store, &p.cfg);
    let ex = ir::extract(&index, &p.vocab, q, threshold)?;
    ir::write_outputs(&ex, &p.vocab, &out)?;
    info!("{} scored, {} selected", ex.scored.len(), ex.article_ids.len());
    Ok(ExitCode::SUCCESS)
}

fn split_pair(s: &str, what: &str) -> anyhow::Result<(String, PathBuf)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| usage(format!("expected {what}=FILE, got {s:?}")))?;
    Ok((k.trim().to_string(), PathBuf::from(v.trim())))
}

fn cmd_align(ctx: &Ctx, a: AlignArgs) -> anyhow::Result<ExitCode> {
    if a.sets.len() < 2 {
        return Err(usage("align needs --set LANG=FILE for at least two languages"));
    }
    let root = ctx.store()?;
    let mut extractions = Vec::new();
    let mut stores = Vec::new();
    for s in &a.sets {
        let (lang, path) = split_pair(s, "LANG")?;
        extractions.push((lang.clone(), wt::read_article_ids(&path)?));
        stores.push(load_store(&root.join(&lang))?);
    }
    let store_refs: Vec<&CorpusStore> = stores.iter().collect();
    let out = ctx.out()?;
    let modes = match a.mode.or(ctx.file.mode).unwrap_or(AlignChoice::Both) {
        AlignChoice::Intersection => vec![AlignMode::Intersection],
        AlignChoice::Union => vec![AlignMode::Union],
        AlignChoice::Both => vec![AlignMode::Intersection, AlignMode::Union],
    };
    for mode in modes {
        let aligned = align_languages(&extractions, &store_refs, mode)?;
        write_aligned(&aligned, &store_refs, &out.join(mode.name()))?;
        info!("{}: {} tuples", mode.name(), aligned.tuples.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_domainness(ctx: &Ctx, a: DomainnessArgs) -> anyhow::Result<ExitCode> {
    if a.collections.is_empty() {
        return Err(usage("domainness needs at least one --collection NAME=FILE"));
    }
    let metrics = ctx.metrics(&a.metrics)?;
    let out = ctx.out()?.to_path_buf();
    let p = prepare(ctx, &a.domain, None)?;
    let root = p.store.category(p.root_id).expect("root resolved from this store");
    let seeds = select_seed_articles(&p.store, root)?;
    let root_docs = preprocess_articles(&p.store, &seeds, &p.cfg);
    let esa = reference_space(
        &p.store,
        &p.cfg,
        a.metrics.esa_reference_size.or(ctx.file.esa_reference_size).unwrap_or(DEFAULT_REFERENCE_FLOOR),
        a.metrics.esa_floor.or(ctx.file.esa_floor).unwrap_or(DEFAULT_REFERENCE_FLOOR),
        ctx.seed,
    );
    let mut reports = Vec::new();
    for c in &a.collections {
        let (name, path) = split_pair(c, "NAME")?;
        let ids = wt::read_article_ids(&path)?;
        let docs = preprocess_articles(&p.store, &ids, &p.cfg);
        reports.push(domainness::compute_report(
            &name,
            &docs,
            &p.vocab.top(metrics.vocab_size),
            &root_docs,
            Some(&esa),
            &metrics,
        )?);
    }
    domainness::assign_dom(&mut reports);
    for r in &reports {
        domainness::write_report_json(r, &out.join(format!("{}.json", batch::slug(&r.collection))))?;
    }
    domainness::write_reports_csv(&reports, &out.join("report.csv"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_evalset(ctx: &Ctx, a: EvalsetArgs) -> anyhow::Result<ExitCode> {
    let n = required(a.per_stratum, ctx.file.per_stratum, "per-stratum")?;
    let sel_a = wt::read_article_ids(&a.a)?;
    let sel_b = wt::read_article_ids(&a.b)?;
    let set = eval::build_eval_set(&sel_a, &sel_b, n, ctx.seed)?;
    eval::write_eval_set(&set, &ctx.out()?.join("evalset.csv"))?;
    let (c, oa, ob) = set.sizes();
    info!("sampled {c} common, {oa} only in a, {ob} only in b");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SystemEvaluation {
    articles: usize,
    hard_precision: f64,
    soft_precision: f64,
    fleiss_kappa: Option<f64>,
}

#[derive(Serialize)]
struct Evaluation {
    systems: BTreeMap<String, SystemEvaluation>,
    /// Correlation of hard precision with each report column.
    hard_correlations: BTreeMap<String, Option<f64>>,
    soft_correlations: BTreeMap<String, Option<f64>>,
}

fn cmd_evaluate(ctx: &Ctx, a: EvaluateArgs) -> anyhow::Result<ExitCode> {
    if a.judgments.is_empty() {
        return Err(usage("evaluate needs at least one --judgments NAME=FILE"));
    }
    let mut systems = BTreeMap::new();
    for j in &a.judgments {
        let (name, path) = split_pair(j, "NAME")?;
        let judgments = eval::read_judgments(&path)?;
        let matrix = eval::rating_matrix(&judgments)?;
        let kappa = match eval::fleiss_kappa(&matrix) {
            Ok(k) => Some(k),
            Err(e) => {
                warn!("{name}: {e}");
                None
            }
        };
        systems.insert(
            name,
            SystemEvaluation {
                articles: matrix.len(),
                hard_precision: eval::precision(&judgments, PrecisionMode::Hard)?,
                soft_precision: eval::precision(&judgments, PrecisionMode::Soft)?,
                fleiss_kappa: kappa,
            },
        );
    }
    let (mut hard_correlations, mut soft_correlations) = (BTreeMap::new(), BTreeMap::new());
    if let Some(report) = &a.report {
        let table = eval::read_metric_table(report)?;
        let hard = systems.iter().map(|(n, s)| (n.clone(), s.hard_precision)).collect();
        let soft = systems.iter().map(|(n, s)| (n.clone(), s.soft_precision)).collect();
        hard_correlations = eval::metric_correlations(&hard, &table);
        soft_correlations = eval::metric_correlations(&soft, &table);
    }
    let evaluation = Evaluation {
        systems,
        hard_correlations,
        soft_correlations,
    };
    let path = ctx.out()?.join("evaluation.json");
    fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&evaluation)?))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(ctx: &Ctx, a: RunArgs) -> anyhow::Result<ExitCode> {
    let or_file = |flag: Vec<String>, file: &Option<Vec<String>>| {
        if flag.is_empty() {
            file.clone().unwrap_or_default()
        } else {
            flag
        }
    };
    let mut cfg = RunConfig::new(ctx.store()?, ctx.out()?);
    cfg.languages = or_file(a.langs, &ctx.file.langs);
    cfg.domains = or_file(a.domains, &ctx.file.domains)
        .iter()
        .map(|d| d.parse::<DomainSpec>())
        .collect::<Result<_, _>>()?;
    cfg.systems = or_file(a.systems, &ctx.file.systems)
        .iter()
        .map(|s| s.parse::<SystemSpec>())
        .collect::<Result<_, _>>()?;
    if cfg.languages.is_empty() || cfg.domains.is_empty() || cfg.systems.is_empty() {
        return Err(usage("run needs --langs, at least one --domain and at least one --system"));
    }
    cfg.seed = ctx.seed;
    cfg.jobs = ctx.jobs;
    cfg.metrics = ctx.metrics(&a.metrics)?;
    if let Some(d) = a.probe_depth.or(ctx.file.probe_depth) {
        cfg.probe_depth = d;
    }
    if let Some(n) = a.metrics.esa_reference_size.or(ctx.file.esa_reference_size) {
        cfg.esa_reference_size = n;
    }
    if let Some(n) = a.metrics.esa_floor.or(ctx.file.esa_floor) {
        cfg.esa_floor = n;
    }
    cfg.align = !a.no_align && ctx.file.align.unwrap_or(true);
    if let Some(files) = &ctx.file.stopword_files {
        cfg.stopwords = files.clone();
    }
    let outcome = batch::run_batch(&cfg)?;
    info!(
        "{} extractions, {} failures; manifest at {}",
        outcome.manifest.extractions.len(),
        outcome.manifest.failures.len(),
        outcome.manifest_path.display()
    );
    Ok(if outcome.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
