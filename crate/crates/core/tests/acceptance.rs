//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary always reaches stdout:
//! `cargo test -p wikitailor --test acceptance`. Set `UPDATE_GOLDEN=1` to
//! rewrite the end-to-end golden outputs.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::FRAC_PI_4;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{copy_tree, fixture_dir, read_tree, read_truth, tokens, vocabulary, StoreBuilder};
use wikitailor::batch::{resolve_root, run_batch, DomainSpec, RunConfig};
use wikitailor::domainness::esa::{angle, mean_angle_to_centroid};
use wikitailor::domainness::pmi::{pair_values, Probabilities};
use wikitailor::domainness::rank::{head_terms, kendall_counts, mid_ranks};
use wikitailor::domainness::{
    assign_dom, augmented_density, compute_report, correlation_vectors, d_esa, dom_score, kendall_tau,
    pmi_family, spearman, Aggregation, EsaSpace, Estimator, Measure, MetricsConfig, TermDistribution,
};
use wikitailor::eval::{fleiss_kappa, pearson, precision, rating_matrix, Judgment, Label, PrecisionMode};
use wikitailor::ingest::{parse_dump, persist_store, ArticleId, CorpusStore};
use wikitailor::ir::{self, query, threshold_select, InvertedIndex, ThresholdMode};
use wikitailor::system::parse_system_name;
use wikitailor::text::{preprocess, PreprocessConfig};
use wikitailor::vocabulary::{build_vocabulary, preprocess_articles, select_seed_articles, CapMode};
use wikitailor::wt::{traverse_and_extract, Levels};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, title: "cycle safety and level semantics", budget: secs(1), run: c1_cycle_and_levels },
        Criterion { id: 2, title: "WT monotonicity in k", budget: secs(10), run: c2_wt_monotonicity },
        Criterion { id: 3, title: "IR threshold nesting", budget: secs(10), run: c3_ir_nesting },
        Criterion { id: 4, title: "Kendall/Spearman oracle equivalence", budget: secs(30), run: c4_rank_oracles },
        Criterion { id: 5, title: "PMI oracle equivalence, NPMI bounds", budget: secs(30), run: c5_pmi_oracle },
        Criterion { id: 6, title: "augmented density bounds", budget: None, run: c6_density_bounds },
        Criterion { id: 7, title: "ESA correctness", budget: secs(5), run: c7_esa },
        Criterion { id: 8, title: "Dom behavior", budget: None, run: c8_dom },
        Criterion { id: 9, title: "evaluation statistics", budget: None, run: c9_eval_stats },
        Criterion { id: 10, title: "end-to-end golden run", budget: secs(60), run: c10_golden_run },
        Criterion { id: 11, title: "WT over IR on the planted domain", budget: None, run: c11_directional },
    ];

    println!("acceptance: {} criteria", criteria.len());
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        let (mut ok, mut detail) = match result {
            Ok(Ok(d)) => (true, d),
            Ok(Err(e)) => (false, e),
            Err(panic) => (
                false,
                panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()),
            ),
        };
        let budget = match c.budget {
            Some(b) => {
                if elapsed > b {
                    ok = false;
                    detail = format!("over time budget; {detail}");
                }
                format!(" (limit {}s)", b.as_secs())
            }
            None => String::new(),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {:<38} {:>7.3}s{budget}  {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn en() -> PreprocessConfig {
    PreprocessConfig::for_lang("en")
}

fn stem(word: &str) -> String {
    preprocess(word, &en()).pop().expect("content word")
}

// 1 ------------------------------------------------------------------------

fn c1_cycle_and_levels() -> Outcome {
    let mut b = StoreBuilder::new();
    b.category("Space", &["Geometry"])
        .category("Geometry", &["Geometric measurement"])
        .category("Geometric measurement", &["Dimension"])
        .category("Dimension", &["Space"])
        .category("Language", &["Philosophy of language"])
        .category("Philosophy of language", &["Theories of language"])
        .category("Theories of language", &["Structuralism"])
        .category("Structuralism", &["Difference"])
        .category("Difference", &["Quantity"])
        .category("Quantity", &["Physical quantities"])
        .category("Physical quantities", &["Geometric measurement"]);
    let store = b.build("en");
    let names = |levels: Vec<Vec<u64>>| -> Vec<Vec<String>> {
        levels
            .into_iter()
            .map(|l| l.into_iter().map(|id| store.category(id).unwrap().title.clone()).collect())
            .collect()
    };
    let from_space = names(Levels::new(&store, b.category_id("Space")).collect());
    let expected: Vec<Vec<String>> = [["Space"], ["Geometry"], ["Geometric measurement"], ["Dimension"]]
        .iter()
        .map(|l| l.iter().map(|s| s.to_string()).collect())
        .collect();
    ensure!(from_space == expected, "levels from Space: {from_space:?}");
    let gm_visits = from_space.iter().flatten().filter(|t| *t == "Geometric measurement").count();
    ensure!(gm_visits == 1, "Geometric measurement visited {gm_visits} times");
    let from_language = names(Levels::new(&store, b.category_id("Language")).collect());
    let gm_depth = from_language
        .iter()
        .position(|l| l.iter().any(|t| t == "Geometric measurement"));
    ensure!(gm_depth == Some(7), "Geometric measurement from Language at {gm_depth:?}");

    // Planted schematic: level sizes 1, 2, 3, 5, 9, 4 with 1, 2, 2, 3, 4, 4
    // positive titles.
    const FILLER: &[&str] = &[
        "harbor", "violin", "orchard", "lantern", "pottery", "meadow", "saddle", "quarry", "tapestry",
        "glacier", "bakery", "anchor", "falcon", "marble", "ribbon", "canyon", "thimble", "walnut",
        "ferry", "beacon", "carpet", "dolphin", "emerald", "fountain", "granite",
    ];
    let shape: [(usize, usize); 6] = [(1, 1), (2, 2), (3, 2), (5, 3), (9, 4), (4, 4)];
    let mut b = StoreBuilder::new();
    let mut levels: Vec<Vec<String>> = Vec::new();
    let mut word = FILLER.iter();
    for (size, positive) in shape {
        let level: Vec<String> = (0..size)
            .map(|i| {
                let w = word.next().expect("enough filler");
                if i < positive {
                    format!("Geometry {w}")
                } else {
                    let mut c = w.chars();
                    c.next().unwrap().to_uppercase().chain(c).collect()
                }
            })
            .collect();
        levels.push(level);
    }
    for level in &levels {
        for t in level {
            b.category(t, &[]);
        }
    }
    for d in 1..levels.len() {
        for (i, child) in levels[d].iter().enumerate() {
            let parent = &levels[d - 1][i % levels[d - 1].len()];
            b.add_child(parent, child);
        }
    }
    // Back edges to the root and to a visited level must not be re-entered.
    b.add_child(&levels[4][0], &levels[0][0]);
    b.add_child(&levels[3][1], &levels[2][0]);
    let mut expected_articles = Vec::new();
    for (d, level) in levels.iter().enumerate() {
        for t in level {
            let title = format!("Article of {t}");
            b.article(&title, "", &[t.as_str()]);
            if d <= 3 {
                expected_articles.push(title);
            }
        }
    }
    let store = b.build("en");
    let expected_ids: BTreeSet<ArticleId> = expected_articles.iter().map(|t| b.article_id(t)).collect();
    let vocab = vocabulary(&[&stem("geometry")]);
    let root = store.category(b.category_id(&levels[0][0])).unwrap();
    let ex = traverse_and_extract(&store, root, &vocab, 50.0, &en()).map_err(|e| e.to_string())?;
    let seen: Vec<(usize, usize)> = ex
        .levels
        .iter()
        .map(|l| (l.categories_positive, l.categories_total))
        .collect();
    let want = [(1, 1), (2, 2), (2, 3), (3, 5), (4, 9)];
    ensure!(seen.len() >= 5 && seen[..5] == want, "level fractions {seen:?}");
    ensure!(ex.stop_depth == 3, "stop_depth {}", ex.stop_depth);
    ensure!(ex.article_ids == expected_ids, "articles {:?} != {:?}", ex.article_ids, expected_ids);
    Ok(format!(
        "Space levels {:?}; fractions 2/2 2/3 3/5 accepted, 4/9 rejected, stop_depth {}",
        from_space.iter().map(|l| l.join("|")).collect::<Vec<_>>(),
        ex.stop_depth
    ))
}

// 2 ------------------------------------------------------------------------

const TITLE_WORDS: &[&str] = &[
    "river", "music", "planet", "energy", "history", "garden", "machine", "language", "ocean", "forest",
    "medicine", "theatre", "railway", "mountain", "painting", "chemistry", "football", "island",
    "poetry", "weather", "bridge", "castle", "desert", "engine", "festival", "glacier", "harbor",
    "insect", "jungle", "kingdom", "library", "market", "novel", "opera", "palace", "quartz",
    "religion", "satellite", "temple", "valley",
];

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> (CorpusStore, u64) {
    let titles: Vec<String> = (0..n)
        .map(|i| {
            let a = TITLE_WORDS.choose(rng).unwrap();
            let b = TITLE_WORDS.choose(rng).unwrap();
            format!("{a} {b} n{i}")
        })
        .collect();
    let mut b = StoreBuilder::new();
    for t in &titles {
        b.category(t, &[]);
    }
    for i in 1..n {
        let parent = rng.random_range(0..i);
        b.add_child(&titles[parent], &titles[i]);
        if rng.random_bool(0.3) {
            b.add_child(&titles[rng.random_range(0..i)], &titles[i]);
        }
        if rng.random_bool(0.1) {
            b.add_child(&titles[i], &titles[rng.random_range(0..i)]);
        }
    }
    for (i, t) in titles.iter().enumerate() {
        for j in 0..rng.random_range(0..3) {
            b.article(&format!("page {i} {j}"), "", &[t.as_str()]);
        }
    }
    let root = b.category_id(&titles[0]);
    (b.build("en"), root)
}

fn c2_wt_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = en();
    let mut violations = Vec::new();
    let mut differing = 0;
    for g in 0..100 {
        let n = rng.random_range(20..=500);
        let (store, root_id) = random_graph(&mut rng, n);
        let amount = rng.random_range(4..16);
        let picked: Vec<String> = TITLE_WORDS
            .choose_multiple(&mut rng, amount)
            .map(|w| stem(w))
            .collect();
        let refs: Vec<&str> = picked.iter().map(String::as_str).collect();
        let vocab = vocabulary(&refs);
        let root = store.category(root_id).unwrap();
        let at50 = traverse_and_extract(&store, root, &vocab, 50.0, &cfg).map_err(|e| e.to_string())?;
        let at60 = traverse_and_extract(&store, root, &vocab, 60.0, &cfg).map_err(|e| e.to_string())?;
        if !at60.article_ids.is_subset(&at50.article_ids) || at60.stop_depth > at50.stop_depth {
            violations.push(g);
        }
        if at60.article_ids != at50.article_ids {
            differing += 1;
        }
    }
    ensure!(violations.is_empty(), "violations in graphs {violations:?}");
    Ok(format!("100 graphs, 0 violations ({differing} with a strictly smaller k=60 set)"))
}

// 3 ------------------------------------------------------------------------

fn c3_ir_nesting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pool: Vec<String> = (0..60).map(|i| format!("t{i}")).collect();
    let mut violations = Vec::new();
    let mut sizes = (0, 0, 0);
    for c in 0..100 {
        let n_docs = rng.random_range(10..300);
        let docs: Vec<(ArticleId, Vec<String>)> = (0..n_docs)
            .map(|i| {
                let len = rng.random_range(0..80);
                let toks = (0..len)
                    .map(|_| {
                        let u: f64 = rng.random();
                        pool[(u * u * pool.len() as f64) as usize].clone()
                    })
                    .collect();
                (i as ArticleId + 1, toks)
            })
            .collect();
        let index = InvertedIndex::from_documents(docs.iter().map(|(id, t)| (*id, t.as_slice())));
        let mut terms: Vec<&str> = pool.iter().map(String::as_str).collect();
        terms.shuffle(&mut rng);
        let vocab = vocabulary(&terms[..30]);
        let q = rng.random_range(1..=30);
        let scored = query(&index, &vocab, q).map_err(|e| e.to_string())?;
        let select = |mode| -> BTreeSet<ArticleId> {
            threshold_select(&scored, mode).into_iter().map(|(id, _)| id).collect()
        };
        let (all, s100, s10) = (
            select(ThresholdMode::All),
            select(ThresholdMode::MaxOver100),
            select(ThresholdMode::MaxOver10),
        );
        if !s10.is_subset(&s100) || !s100.is_subset(&all) {
            violations.push(c);
        }
        sizes.0 += all.len();
        sizes.1 += s100.len();
        sizes.2 += s10.len();
    }
    ensure!(violations.is_empty(), "violations in corpora {violations:?}");
    Ok(format!(
        "100 corpora, 0 violations (selected all/max100/max10: {}/{}/{})",
        sizes.0, sizes.1, sizes.2
    ))
}

// 4 ------------------------------------------------------------------------

/// (concordant, discordant, tied in x, tied in y) by enumerating all pairs.
fn brute_pairs(x: &[f64], y: &[f64]) -> (u64, u64, u64, u64) {
    let (mut c, mut d, mut tx, mut ty) = (0, 0, 0, 0);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tx += 1;
            }
            if dy == 0.0 {
                ty += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    c += 1;
                } else {
                    d += 1;
                }
            }
        }
    }
    (c, d, tx, ty)
}

fn brute_tau(x: &[f64], y: &[f64]) -> Option<f64> {
    let (c, d, tx, ty) = brute_pairs(x, y);
    let n0 = (x.len() * (x.len() - 1) / 2) as u64;
    if n0 == tx || n0 == ty {
        return None;
    }
    Some((c as f64 - d as f64) / (((n0 - tx) as f64) * ((n0 - ty) as f64)).sqrt())
}

fn brute_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let below = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn two_pass_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

fn c4_rank_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut with_ties = 0;
    for p in 0..200 {
        let n = if p < 20 { rng.random_range(5..20) } else { rng.random_range(5..=2000) };
        let levels = [2, 5, n / 3 + 1, n * 10];
        let (lx, ly) = (*levels.choose(&mut rng).unwrap(), *levels.choose(&mut rng).unwrap());
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..lx) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..ly) as f64).collect();
        let counts = kendall_counts(&x, &y);
        let (c, d, tx, ty) = brute_pairs(&x, &y);
        ensure!(
            (counts.concordant, counts.discordant, counts.ties_x, counts.ties_y) == (c, d, tx, ty),
            "pair {p}: counts {counts:?} vs brute ({c}, {d}, {tx}, {ty})"
        );
        if tx > 0 || ty > 0 {
            with_ties += 1;
        }
        let cmp = |a: Option<f64>, b: Option<f64>, what: &str| -> Result<f64, String> {
            match (a, b) {
                (Some(a), Some(b)) => Ok((a - b).abs()),
                (None, None) => Ok(0.0),
                _ => Err(format!("pair {p}: {what} {a:?} vs oracle {b:?}")),
            }
        };
        worst = worst.max(cmp(kendall_tau(&x, &y), brute_tau(&x, &y), "tau")?);
        worst = worst.max(cmp(
            spearman(&x, &y),
            two_pass_pearson(&brute_ranks(&x), &brute_ranks(&y)),
            "rho",
        )?);
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");

    // Frequency-1 terms are dropped from a corpus's head.
    let mut counts: HashMap<String, u64> = (0..19).map(|i| (format!("b{i:02}"), 1)).collect();
    counts.insert("a".into(), 3);
    ensure!(head_terms(&counts) == ["a"], "head with singletons: {:?}", head_terms(&counts));

    // Fewer than five points leave both coefficients undefined.
    let small: HashMap<String, u64> = [("a", 5), ("b", 4)].iter().map(|(t, c)| (t.to_string(), *c)).collect();
    ensure!(correlation_vectors(&small, &small).is_none(), "two-term corpora gave vectors");
    let report = compute_report(
        "small",
        &[tokens("a a a a a b b b b")],
        &["a", "b"],
        &[tokens("a a a a a b b b b")],
        None,
        &MetricsConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(report.spearman.is_none() && report.kendall.is_none(), "small report {report:?}");

    // A head term absent from the other corpus takes the bottom rank there.
    let reference: HashMap<String, u64> = (0..50).map(|i| (format!("r{i:02}"), 100 - i)).collect();
    let mut collection: HashMap<String, u64> = HashMap::new();
    for i in 0..5 {
        collection.insert(format!("c{i}"), 90 - i);
    }
    for i in 0..4 {
        collection.insert(format!("r{i:02}"), 50 - 10 * i);
    }
    for i in 0..41 {
        collection.insert(format!("f{i:02}"), 2);
    }
    let (x, y) = correlation_vectors(&collection, &reference).ok_or("vectors undefined")?;
    ensure!(x.len() == 10, "expected 10 points, got {}", x.len());
    let (rx, ry) = (mid_ranks(&x), mid_ranks(&y));
    // Points: c0..c4, r00..r04 in term order.
    ensure!(x[9] == 0.0 && rx[9] == 1.0, "r04 in collection: {} rank {}", x[9], rx[9]);
    ensure!(y[..5].iter().all(|v| *v == 0.0), "c* in reference: {:?}", &y[..5]);
    ensure!(ry[..5].iter().all(|r| *r == 3.0), "c* reference ranks {:?}", &ry[..5]);
    Ok(format!(
        "200 pairs ({with_ties} with ties), max |dev| {worst:.1e}; singleton exclusion, <5 points, bottom rank verified"
    ))
}

// 5 ------------------------------------------------------------------------

/// Probabilities straight from token lists: joint occurrence in an article
/// is the smaller of the two counts.
fn oracle_pmi(docs: &[Vec<String>], vocab: &[String], est: Estimator, measure: Measure, eps: f64) -> f64 {
    let count = |d: &Vec<String>, t: &str| d.iter().filter(|x| *x == t).count() as f64;
    let n = vocab.len();
    let mut p = vec![0.0; n];
    let mut pj = vec![vec![0.0; n]; n];
    match est {
        Estimator::Art => {
            let mass: f64 = docs.iter().map(|d| d.len() as f64).sum();
            if mass > 0.0 {
                for i in 0..n {
                    p[i] = docs.iter().map(|d| count(d, &vocab[i])).sum::<f64>() / mass;
                    for j in 0..n {
                        pj[i][j] = docs
                            .iter()
                            .map(|d| count(d, &vocab[i]).min(count(d, &vocab[j])))
                            .sum::<f64>()
                            / mass;
                    }
                }
            }
        }
        Estimator::Col => {
            let used: Vec<&Vec<String>> = docs.iter().filter(|d| !d.is_empty()).collect();
            if !used.is_empty() {
                let u = used.len() as f64;
                for i in 0..n {
                    p[i] = used.iter().map(|d| count(d, &vocab[i]) / d.len() as f64).sum::<f64>() / u;
                    for j in 0..n {
                        pj[i][j] = used
                            .iter()
                            .map(|d| count(d, &vocab[i]).min(count(d, &vocab[j])) / d.len() as f64)
                            .sum::<f64>()
                            / u;
                    }
                }
            }
        }
    }
    let mut values = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let pmi = ((pj[i][j] + eps) / (p[i] * p[j] + eps)).log2();
            values.push(match measure {
                Measure::Pmi => pmi,
                Measure::Npmi => {
                    let denom = -(pj[i][j] + eps).log2();
                    if denom <= 0.0 {
                        1.0
                    } else {
                        pmi / denom
                    }
                }
            });
        }
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

fn random_corpus(rng: &mut ChaCha8Rng, max_docs: usize, max_vocab: usize) -> (Vec<Vec<String>>, Vec<String>) {
    let v = rng.random_range(2..=max_vocab);
    let vocab: Vec<String> = (0..v).map(|i| format!("v{i}")).collect();
    let mut pool = vocab.clone();
    pool.extend(["x".to_string(), "y".to_string()]);
    let n = rng.random_range(1..=max_docs);
    let docs = (0..n)
        .map(|_| {
            let len = rng.random_range(0..16);
            (0..len).map(|_| pool.choose(rng).unwrap().clone()).collect()
        })
        .collect();
    (docs, vocab)
}

fn c5_pmi_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eps = 1e-12;
    let mut worst: f64 = 0.0;
    for c in 0..50 {
        let (docs, vocab) = random_corpus(&mut rng, 20, 10);
        let dist = TermDistribution::from_tokens(&docs, &vocab);
        for est in [Estimator::Art, Estimator::Col] {
            for measure in [Measure::Pmi, Measure::Npmi] {
                let got = pmi_family(&dist, est, measure, Aggregation::Median, eps).map_err(|e| e.to_string())?;
                let want = oracle_pmi(&docs, &vocab, est, measure, eps);
                ensure!(
                    (got - want).abs() <= 1e-9,
                    "corpus {c} {est:?} {measure:?}: {got} vs oracle {want}"
                );
                worst = worst.max((got - want).abs());
            }
        }
    }
    let mut out_of_range = 0;
    let mut extremes = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let (docs, vocab) = random_corpus(&mut rng, 30, 12);
        let dist = TermDistribution::from_tokens(&docs, &vocab);
        for est in [Estimator::Art, Estimator::Col] {
            let probs = Probabilities::estimate(&dist, est);
            for v in pair_values(&probs, Measure::Npmi, eps) {
                extremes = (extremes.0.min(v), extremes.1.max(v));
                if !(-1.0..=1.0).contains(&v) {
                    out_of_range += 1;
                }
            }
        }
    }
    ensure!(out_of_range == 0, "{out_of_range} NPMI values outside [-1, 1]");
    Ok(format!(
        "50 toy corpora x 4 variants, max |dev| {worst:.1e}; NPMI in [{:.3}, {:.3}] over 1000 corpora",
        extremes.0, extremes.1
    ))
}

// 6 ------------------------------------------------------------------------

fn c6_density_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for c in 0..1000 {
        let (docs, vocab) = random_corpus(&mut rng, 30, 12);
        let dist = TermDistribution::from_tokens(&docs, &vocab);
        match augmented_density(&dist, 0.0) {
            Ok((v, _)) => {
                ensure!((0.0..=1.0).contains(&v), "corpus {c}: augmented density {v}");
                range = (range.0.min(v), range.1.max(v));
            }
            Err(wikitailor::Error::UndefinedMetric(_)) => {}
            Err(e) => return Err(format!("corpus {c}: {e}")),
        }
    }
    // c_terms = 5, c_max = 10.
    let doc = tokens("a a a a a z z z z z z z z z z");
    let dist = TermDistribution::from_tokens(&[doc], &["a"]);
    ensure!(dist.c_terms(0) == 5 && dist.c_max[0] == 10, "fixture counts");
    let (v, _) = augmented_density(&dist, 0.0).map_err(|e| e.to_string())?;
    ensure!(v == 0.5, "hand example gave {v}");
    Ok(format!(
        "1000 corpora within [{:.3}, {:.3}]; c_terms=5, c_max=10 gives {v}",
        range.0, range.1
    ))
}

// 7 ------------------------------------------------------------------------

/// d_ESA with a dense term-by-document matrix.
fn dense_d_esa(reference: &[Vec<String>], collection: &[Vec<String>]) -> f64 {
    let terms: Vec<String> = reference
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = reference.len() as f64;
    let tf = |d: &[String], t: &str| d.iter().filter(|x| *x == t).count() as f64;
    let idf: Vec<f64> = terms
        .iter()
        .map(|t| (n / reference.iter().filter(|d| d.contains(t)).count() as f64).ln())
        .collect();
    let matrix: Vec<Vec<f64>> = terms
        .iter()
        .zip(&idf)
        .map(|(t, w)| reference.iter().map(|d| tf(d, t) * w).collect())
        .collect();
    let col_norm: Vec<f64> = (0..reference.len())
        .map(|j| matrix.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .collect();
    let vectors: Vec<Vec<f64>> = collection
        .iter()
        .map(|doc| {
            let q: Vec<f64> = terms.iter().zip(&idf).map(|(t, w)| tf(doc, t) * w).collect();
            let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            (0..reference.len())
                .map(|j| {
                    if qn == 0.0 || col_norm[j] == 0.0 {
                        return 0.0;
                    }
                    let dot: f64 = q.iter().zip(&matrix).map(|(a, row)| a * row[j]).sum();
                    dot / (qn * col_norm[j])
                })
                .collect()
        })
        .filter(|v: &Vec<f64>| v.iter().any(|x| *x != 0.0))
        .collect();
    let k = vectors.len() as f64;
    let centroid: Vec<f64> = (0..reference.len())
        .map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / k)
        .collect();
    let cn = centroid.iter().map(|x| x * x).sum::<f64>().sqrt();
    vectors
        .iter()
        .map(|v| {
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = v.iter().zip(&centroid).map(|(a, b)| a * b).sum();
            (dot / (vn * cn)).clamp(-1.0, 1.0).acos()
        })
        .sum::<f64>()
        / k
}

fn with_ids(docs: &[Vec<String>]) -> Vec<(ArticleId, Vec<String>)> {
    docs.iter().enumerate().map(|(i, d)| (i as ArticleId, d.clone())).collect()
}

fn c7_esa() -> Outcome {
    let reference: Vec<Vec<String>> = ["alpha beta", "gamma delta", "epsilon zeta"]
        .iter()
        .map(|s| tokens(s))
        .collect();
    let space = EsaSpace::build("en", &with_ids(&reference), 0);
    let (single, _) = d_esa(&[tokens("alpha gamma gamma")], &space).map_err(|e| e.to_string())?;
    ensure!(single == 0.0, "singleton d_ESA {single}");
    let (orth, _) = d_esa(&[tokens("alpha"), tokens("delta")], &space).map_err(|e| e.to_string())?;
    ensure!((orth - FRAC_PI_4).abs() <= 1e-9, "orthogonal pair {orth}");
    let (raw, _) = mean_angle_to_centroid(&[vec![1.0, 0.0], vec![0.0, 1.0]]).map_err(|e| e.to_string())?;
    ensure!((raw - FRAC_PI_4).abs() <= 1e-9, "unit vectors {raw}");
    ensure!(angle(&[1.0, 0.0], &[0.0, 2.0]) == std::f64::consts::FRAC_PI_2, "right angle");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
    let mut draw = |len: usize, extra: bool| -> Vec<String> {
        (0..len)
            .map(|_| {
                if extra && rng.random_bool(0.1) {
                    "unseen".to_string()
                } else {
                    let u: f64 = rng.random();
                    pool[(u * u * pool.len() as f64) as usize].clone()
                }
            })
            .collect()
    };
    let reference: Vec<Vec<String>> = (0..20).map(|i| draw(10 + i, false)).collect();
    let collection: Vec<Vec<String>> = (0..8).map(|i| draw(5 + 3 * i, true)).collect();
    let space = EsaSpace::build("en", &with_ids(&reference), 0);
    let (got, _) = d_esa(&collection, &space).map_err(|e| e.to_string())?;
    let want = dense_d_esa(&reference, &collection);
    ensure!((got - want).abs() <= 1e-9, "20-doc fixture {got} vs dense {want}");
    Ok(format!(
        "singleton 0, orthogonal pair {orth:.12} (pi/4), 20-doc fixture {got:.9} vs dense {want:.9}"
    ))
}

// 8 ------------------------------------------------------------------------

fn c8_dom() -> Outcome {
    let focused = [
        "star planet orbit comet telescope star",
        "planet orbit star galaxy telescope",
        "comet orbit star planet galaxy",
        "galaxy star telescope planet orbit",
        "star comet planet orbit telescope galaxy",
    ];
    let scattered = [
        "star recipe flour butter oven",
        "goal striker league planet referee",
        "guitar chorus album orbit drummer",
        "parliament election comet ballot",
        "harbor ferry galaxy anchor",
    ];
    let to_docs = |texts: &[&str]| -> Vec<Vec<String>> { texts.iter().map(|t| tokens(t)).collect() };
    let (a, b) = (to_docs(&focused), to_docs(&scattered));
    let reference: Vec<Vec<String>> = a.iter().chain(&b).cloned().collect();
    let space = EsaSpace::build("en", &with_ids(&reference), 0);
    let vocab = ["star", "planet", "orbit", "comet", "telescope", "galaxy"];
    let cfg = MetricsConfig::default();
    let mut reports = vec![
        compute_report("A", &a, &vocab, &a, Some(&space), &cfg).map_err(|e| e.to_string())?,
        compute_report("B", &b, &vocab, &a, Some(&space), &cfg).map_err(|e| e.to_string())?,
    ];
    let (pa, pb) = (reports[0].pmi_col.unwrap(), reports[1].pmi_col.unwrap());
    let (da, db) = (reports[0].d_esa.unwrap(), reports[1].d_esa.unwrap());
    ensure!(pa > pb && da < db, "fixture does not dominate: PMI {pa} vs {pb}, d_ESA {da} vs {db}");
    assign_dom(&mut reports);
    ensure!(
        reports[0].dom == Some(1.0) && reports[1].dom == Some(0.0),
        "Dom {:?} {:?}",
        reports[0].dom,
        reports[1].dom
    );

    let flat = dom_score(&[2.0, 2.0, 2.0], &[0.7, 0.7, 0.7]).map_err(|e| e.to_string())?;
    ensure!(flat == [0.5, 0.5, 0.5], "degenerate ranges gave {flat:?}");
    let half = dom_score(&[1.0, 1.0], &[0.2, 0.4]).map_err(|e| e.to_string())?;
    ensure!(half == [0.75, 0.25], "one degenerate range gave {half:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut drift: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(2..10);
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..2.0)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
        let (s1, o1, s2, o2) = (
            rng.random_range(0.5..4.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(0.5..4.0),
            rng.random_range(-3.0..3.0),
        );
        let p2: Vec<f64> = p.iter().map(|x| s1 * x + o1).collect();
        let d2: Vec<f64> = d.iter().map(|x| s2 * x + o2).collect();
        let base = dom_score(&p, &d).map_err(|e| e.to_string())?;
        let moved = dom_score(&p2, &d2).map_err(|e| e.to_string())?;
        for (x, y) in base.iter().zip(&moved) {
            drift = drift.max((x - y).abs());
        }
    }
    ensure!(drift <= 1e-12, "affine drift {drift:e}");
    Ok(format!(
        "Dom(A)=1, Dom(B)=0 (PMI_col {pa:.3}>{pb:.3}, d_ESA {da:.3}<{db:.3}); degenerate 0.5; affine drift {drift:.1e}"
    ))
}

// 9 ------------------------------------------------------------------------

fn judgments_from(labels: &[[Label; 3]]) -> Vec<Judgment> {
    labels
        .iter()
        .enumerate()
        .flat_map(|(i, ls)| {
            ls.iter().enumerate().map(move |(r, l)| Judgment {
                article_id: i as ArticleId,
                annotator_id: format!("r{r}"),
                label: *l,
            })
        })
        .collect()
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize, p_in: f64) -> Vec<[Label; 3]> {
    (0..n)
        .map(|_| {
            let mut draw = || if rng.random_bool(p_in) { Label::InDomain } else { Label::Other };
            [draw(), draw(), draw()]
        })
        .collect()
}

fn c9_eval_stats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let p_in = rng.random_range(0.0..1.0);
        let j = judgments_from(&random_labels(&mut rng, n, p_in));
        let hard = precision(&j, PrecisionMode::Hard).map_err(|e| e.to_string())?;
        let soft = precision(&j, PrecisionMode::Soft).map_err(|e| e.to_string())?;
        if hard > soft {
            violations += 1;
        }
    }
    ensure!(violations == 0, "{violations} sets with hard > soft");

    let unanimous = vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3], vec![3, 0, 0], vec![0, 0, 3]];
    let k3 = fleiss_kappa(&unanimous).map_err(|e| e.to_string())?;
    ensure!(k3 == 1.0, "three-category unanimous kappa {k3}");
    use Label::{InDomain as I, Other as O};
    let j = judgments_from(&[[I, I, I], [O, O, O], [I, I, I]]);
    let k2 = fleiss_kappa(&rating_matrix(&j).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(k2 == 1.0, "two-category unanimous kappa {k2}");

    let noise = judgments_from(&random_labels(&mut rng, 10_000, 0.5));
    let k_ind = fleiss_kappa(&rating_matrix(&noise).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(k_ind.abs() < 0.02, "independent raters kappa {k_ind}");

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(3..500);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + rng.random::<f64>()).collect();
        let nf = n as f64;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let oracle = (nf * sxy - sx * sy) / ((nf * sxx - sx * sx).sqrt() * (nf * syy - sy * sy).sqrt());
        let got = pearson(&x, &y).map_err(|e| e.to_string())?;
        worst = worst.max((got - oracle).abs());
    }
    ensure!(worst <= 1e-12, "pearson deviation {worst:e}");
    Ok(format!(
        "1000 sets hard<=soft; kappa 1 on unanimous (3 and 2 categories); independent kappa {k_ind:+.4}; pearson |dev| {worst:.1e}"
    ))
}

// 10 -----------------------------------------------------------------------

struct Editions {
    en: CorpusStore,
    fr: CorpusStore,
}

fn editions() -> &'static Editions {
    static EDITIONS: OnceLock<Editions> = OnceLock::new();
    EDITIONS.get_or_init(|| {
        let dir = fixture_dir();
        Editions {
            en: parse_dump(&dir.join("enwiki-mini.xml"), "en").expect("en fixture parses"),
            fr: parse_dump(&dir.join("frwiki-mini.xml"), "fr").expect("fr fixture parses"),
        }
    })
}

fn golden_config(stores: &std::path::Path, out: &std::path::Path, jobs: usize) -> RunConfig {
    let mut cfg = RunConfig::new(stores, out);
    cfg.languages = vec!["en".into(), "fr".into()];
    cfg.domains = vec![DomainSpec::new("Astronomy")];
    cfg.systems = vec![
        parse_system_name("50-WT100").unwrap(),
        parse_system_name("100-IR10").unwrap(),
    ];
    cfg.seed = 2015;
    cfg.jobs = jobs;
    cfg
}

fn c10_golden_run() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let stores = tmp.path().join("stores");
    let ed = editions();
    for store in [&ed.en, &ed.fr] {
        persist_store(store, &stores.join(store.edition())).map_err(|e| e.to_string())?;
    }
    let (art_en, art_fr) = (ed.en.article_count(), ed.fr.article_count());
    let cats = ed.en.category_count() + ed.fr.category_count();

    let first = tmp.path().join("run1");
    let outcome = run_batch(&golden_config(&stores, &first, 2)).map_err(|e| e.to_string())?;
    ensure!(outcome.succeeded(), "batch failures: {:?}", outcome.manifest.failures);
    let second = tmp.path().join("run2");
    run_batch(&golden_config(&stores, &second, 1)).map_err(|e| e.to_string())?;
    let m1 = std::fs::read(first.join("manifest.json")).map_err(|e| e.to_string())?;
    let m2 = std::fs::read(second.join("manifest.json")).map_err(|e| e.to_string())?;
    ensure!(m1 == m2, "rerun manifest differs");

    let golden = fixture_dir().join("golden");
    let produced = read_tree(&first);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        copy_tree(&first, &golden);
        return Ok(format!("golden outputs rewritten ({} files)", produced.len()));
    }
    ensure!(golden.is_dir(), "no golden outputs; run with UPDATE_GOLDEN=1");
    let expected = read_tree(&golden);
    let missing: Vec<&String> = expected.keys().filter(|k| !produced.contains_key(*k)).collect();
    let extra: Vec<&String> = produced.keys().filter(|k| !expected.contains_key(*k)).collect();
    let differing: Vec<&String> = expected
        .iter()
        .filter(|(k, v)| produced.get(*k).is_some_and(|p| p != *v))
        .map(|(k, _)| k)
        .collect();
    ensure!(
        missing.is_empty() && extra.is_empty() && differing.is_empty(),
        "golden mismatch: missing {missing:?}, extra {extra:?}, differing {differing:?}"
    );
    let aligned = produced.keys().filter(|k| k.starts_with("aligned/")).count();
    Ok(format!(
        "{art_en}+{art_fr} articles, {cats} categories; {} files identical to golden ({aligned} alignment files); rerun manifest identical",
        produced.len()
    ))
}

// 11 -----------------------------------------------------------------------

fn c11_directional() -> Outcome {
    let truth = read_truth();
    let ed = editions();
    let mut lines = Vec::new();
    for (store, other) in [(&ed.en, &ed.fr), (&ed.fr, &ed.en)] {
        let lang = store.edition();
        let labels = &truth[lang];
        let cfg = PreprocessConfig::for_lang(lang);
        let root = resolve_root(&DomainSpec::new("Astronomy"), lang, store, &[other]).map_err(|e| e.to_string())?;
        let seeds = select_seed_articles(store, root).map_err(|e| e.to_string())?;
        let vocab = build_vocabulary(store, "Astronomy", &seeds, &cfg, CapMode::Top10Pct).map_err(|e| e.to_string())?;
        let wt = traverse_and_extract(store, root, &vocab.capped(CapMode::Top100Of10Pct), 50.0, &cfg)
            .map_err(|e| e.to_string())?;
        let index = ir::build_index(store, &cfg);
        let ir = ir::extract(&index, &vocab, 100, ThresholdMode::MaxOver10).map_err(|e| e.to_string())?;
        let prec = |ids: &BTreeSet<ArticleId>| {
            ids.iter().filter(|id| labels[*id] == "astronomy").count() as f64 / ids.len() as f64
        };
        let (p_wt, p_ir) = (prec(&wt.article_ids), prec(&ir.article_ids));
        ensure!(p_wt >= p_ir, "{lang}: WT precision {p_wt} < IR precision {p_ir}");

        // Domainness is scored on a held-out half of the edition; the other
        // half is the ESA reference, so no article is compared with itself.
        let all_ids: Vec<ArticleId> = store.articles().map(|a| a.article_id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let reference_ids: BTreeSet<ArticleId> = sample(&mut rng, all_ids.len(), all_ids.len() / 2)
            .into_iter()
            .map(|i| all_ids[i])
            .collect();
        let held_out = |id: &ArticleId| !reference_ids.contains(id);
        let wt_held: BTreeSet<ArticleId> = wt.article_ids.iter().copied().filter(held_out).collect();
        let off_domain: Vec<ArticleId> = labels
            .iter()
            .filter(|(id, t)| *t != "astronomy" && held_out(id))
            .map(|(id, _)| *id)
            .collect();
        let take = off_domain.len().min(wt_held.len());
        let noise: BTreeSet<ArticleId> = sample(&mut rng, off_domain.len(), take)
            .into_iter()
            .map(|i| off_domain[i])
            .collect();
        let reference: Vec<(ArticleId, Vec<String>)> = reference_ids
            .iter()
            .copied()
            .zip(preprocess_articles(store, &reference_ids, &cfg))
            .collect();
        let esa = EsaSpace::build(lang, &reference, 0);
        let root_docs = preprocess_articles(store, &seeds, &cfg);
        let metrics = MetricsConfig::default();
        let terms = vocab.top(metrics.vocab_size);
        let report = |name: &str, ids: &BTreeSet<ArticleId>| {
            compute_report(name, &preprocess_articles(store, ids, &cfg), &terms, &root_docs, Some(&esa), &metrics)
                .map_err(|e| e.to_string())
        };
        let mut reports = vec![report("wt", &wt_held)?, report("noise", &noise)?];
        assign_dom(&mut reports);
        let (d_wt, d_noise) = (reports[0].dom, reports[1].dom);
        ensure!(
            matches!((d_wt, d_noise), (Some(a), Some(b)) if a > b),
            "{lang}: Dom(WT) {d_wt:?} vs Dom(noise) {d_noise:?}"
        );
        lines.push(format!(
            "{lang}: P_WT {p_wt:.3} >= P_IR {p_ir:.3} ({} vs {} articles), held-out Dom {:.3} > {:.3} ({} vs {} articles)",
            wt.article_ids.len(),
            ir.article_ids.len(),
            d_wt.unwrap(),
            d_noise.unwrap(),
            wt_held.len(),
            noise.len()
        ));
    }
    Ok(lines.join("; "))
}
