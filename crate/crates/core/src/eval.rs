//! Evaluation-set sampling and the agreement statistics used to score
//! manual judgments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ArticleId;

/// Raters per article.
pub const RATERS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    InDomain,
    Other,
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "in-domain" | "in_domain" | "in" | "yes" | "1" => Ok(Label::InDomain),
            "other" | "out" | "no" | "0" => Ok(Label::Other),
            _ => Err(Error::Invalid(format!("unknown label {s:?}"))),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::InDomain => "in-domain",
            Label::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub article_id: ArticleId,
    pub annotator_id: String,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionMode {
    /// All raters agree on in-domain.
    Hard,
    /// A majority of raters say in-domain.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSet {
    pub common: Vec<ArticleId>,
    pub only_a: Vec<ArticleId>,
    pub only_b: Vec<ArticleId>,
}

impl EvalSet {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.common.len(), self.only_a.len(), self.only_b.len())
    }

    /// `article_id,stratum` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("article_id,stratum\n");
        for (name, ids) in [
            ("common", &self.common),
            ("only_a", &self.only_a),
            ("only_b", &self.only_b),
        ] {
            for id in ids {
                out.push_str(&format!("{id},{name}\n"));
            }
        }
        out
    }
}

fn sample_stratum(ids: &BTreeSet<ArticleId>, n: usize, rng: &mut ChaCha8Rng) -> Vec<ArticleId> {
    let all: Vec<ArticleId> = ids.iter().copied().collect();
    if all.len() <= n {
        return all;
    }
    let mut picked: Vec<ArticleId> = sample(rng, all.len(), n).into_iter().map(|i| all[i]).collect();
    picked.sort_unstable();
    picked
}

/// Seeded uniform sample of up to `n_per_stratum` articles from the common
/// part and from each system's exclusive part.
pub fn build_eval_set(
    sel_a: &BTreeSet<ArticleId>,
    sel_b: &BTreeSet<ArticleId>,
    n_per_stratum: usize,
    seed: u64,
) -> Result<EvalSet> {
    if n_per_stratum == 0 {
        return Err(Error::Config("stratum size must be at least 1".into()));
    }
    let common: BTreeSet<ArticleId> = sel_a.intersection(sel_b).copied().collect();
    let only_a: BTreeSet<ArticleId> = sel_a.difference(sel_b).copied().collect();
    let only_b: BTreeSet<ArticleId> = sel_b.difference(sel_a).copied().collect();
    if common.is_empty() && only_a.is_empty() && only_b.is_empty() {
        return Err(Error::Invalid("both selections are empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(EvalSet {
        common: sample_stratum(&common, n_per_stratum, &mut rng),
        only_a: sample_stratum(&only_a, n_per_stratum, &mut rng),
        only_b: sample_stratum(&only_b, n_per_stratum, &mut rng),
    })
}

/// Labels per article, checking one label per (article, annotator) and
/// exactly [`RATERS`] labels per article.
pub fn group_judgments(judgments: &[Judgment]) -> Result<BTreeMap<ArticleId, Vec<Label>>> {
    let mut by_article: BTreeMap<ArticleId, BTreeMap<&str, Label>> = BTreeMap::new();
    for j in judgments {
        if by_article
            .entry(j.article_id)
            .or_default()
            .insert(&j.annotator_id, j.label)
            .is_some()
        {
            return Err(Error::Invalid(format!(
                "annotator {} labelled article {} twice",
                j.annotator_id, j.article_id
            )));
        }
    }
    let mut out = BTreeMap::new();
    for (id, labels) in by_article {
        if labels.len() != RATERS {
            return Err(Error::Invalid(format!(
                "article {id} has {} judgments, expected {RATERS}",
                labels.len()
            )));
        }
        out.insert(id, labels.into_values().collect());
    }
    Ok(out)
}

pub fn precision(judgments: &[Judgment], mode: PrecisionMode) -> Result<f64> {
    let grouped = group_judgments(judgments)?;
    if grouped.is_empty() {
        return Err(Error::UndefinedMetric("precision of no articles".into()));
    }
    let needed = match mode {
        PrecisionMode::Hard => RATERS,
        PrecisionMode::Soft => RATERS / 2 + 1,
    };
    let hits = grouped
        .values()
        .filter(|ls| ls.iter().filter(|l| **l == Label::InDomain).count() >= needed)
        .count();
    Ok(hits as f64 / grouped.len() as f64)
}

/// Items x categories count matrix from judgments; columns are
/// `[in-domain, other]`.
pub fn rating_matrix(judgments: &[Judgment]) -> Result<Vec<Vec<u32>>> {
    Ok(group_judgments(judgments)?
        .values()
        .map(|ls| {
            let inn = ls.iter().filter(|l| **l == Label::InDomain).count() as u32;
            vec![inn, ls.len() as u32 - inn]
        })
        .collect())
}

/// Fleiss' kappa of an items x categories count matrix with a constant
/// number of raters per item.
pub fn fleiss_kappa(matrix: &[Vec<u32>]) -> Result<f64> {
    let Some(first) = matrix.first() else {
        return Err(Error::UndefinedMetric("kappa of no items".into()));
    };
    let raters: u32 = first.iter().sum();
    let cats = first.len();
    if raters < 2 {
        return Err(Error::Invalid("kappa needs at least two raters per item".into()));
    }
    if matrix.iter().any(|r| r.len() != cats || r.iter().sum::<u32>() != raters) {
        return Err(Error::Invalid("every item needs the same raters and categories".into()));
    }
    let n = raters as f64;
    let items = matrix.len() as f64;
    let mut p_bar = 0.0;
    let mut col = vec![0u64; cats];
    for row in matrix {
        let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
        p_bar += (sq - n) / (n * (n - 1.0));
        for (t, &c) in col.iter_mut().zip(row) {
            *t += c as u64;
        }
    }
    p_bar /= items;
    let p_e: f64 = col
        .iter()
        .map(|&c| {
            let p = c as f64 / (items * n);
            p * p
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::UndefinedMetric(
            "kappa is degenerate: a single category is used throughout".into(),
        ));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Invalid("pearson: length mismatch".into()));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedMetric("pearson needs at least three points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedMetric("pearson: zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Deserialize)]
struct JudgmentRow {
    article_id: ArticleId,
    annotator_id: String,
    label: String,
}

pub fn read_judgments(path: &Path) -> Result<Vec<Judgment>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for row in reader.deserialize::<JudgmentRow>() {
        let row = row.map_err(|e| csv_error(path, e))?;
        out.push(Judgment {
            article_id: row.article_id,
            annotator_id: row.annotator_id,
            label: row.label.parse()?,
        });
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Corrupt {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

pub fn write_eval_set(set: &EvalSet, path: &Path) -> Result<()> {
    fs::write(path, set.to_csv()).map_err(|e| Error::io(path, e))
}

/// Metric columns of a report table, keyed by collection then column.
/// Empty cells are undefined values.
pub type MetricTable = BTreeMap<String, BTreeMap<String, Option<f64>>>;

/// Reads a `report.csv` as written by the domainness module.
pub fn read_metric_table(path: &Path) -> Result<MetricTable> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut table = MetricTable::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let collection = row.get(0).unwrap_or_default().to_string();
        let mut values = BTreeMap::new();
        for (name, cell) in headers.iter().zip(row.iter()).skip(1) {
            let value = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| Error::Corrupt {
                    path: path.to_path_buf(),
                    line: i + 2,
                    message: format!("{name}: not a number: {cell:?}"),
                })?)
            };
            values.insert(name.to_string(), value);
        }
        table.insert(collection, values);
    }
    Ok(table)
}

/// Pearson correlation between a per-collection score and each metric
/// column, over the collections where both are defined. A column with fewer
/// than three such collections, or a constant column, maps to `None`.
pub fn metric_correlations(scores: &BTreeMap<String, f64>, table: &MetricTable) -> BTreeMap<String, Option<f64>> {
    let columns: BTreeSet<&String> = table.values().flat_map(|row| row.keys()).collect();
    columns
        .into_iter()
        .map(|column| {
            let (x, y): (Vec<f64>, Vec<f64>) = scores
                .iter()
                .filter_map(|(c, s)| Some((*s, table.get(c)?.get(column).copied().flatten()?)))
                .unzip();
            let r = if x.len() >= 3 { pearson(&x, &y).ok() } else { None };
            (column.clone(), r)
        })
        .collect()
}
