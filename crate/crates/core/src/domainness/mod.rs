//! Domainness metrics of an extracted collection: term density, (N)PMI
//! coherence, rank correlation against the root articles, ESA cohesion, and
//! the combined `Dom` score over a comparison set.

pub mod distribution;
pub mod esa;
pub mod pmi;
pub mod rank;

use std::fs;
use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

pub use distribution::{augmented_density, density, TermDistribution};
pub use esa::{d_esa, EsaSpace};
pub use pmi::{pmi_family, Aggregation, Estimator, Measure};
pub use rank::{correlation_vectors, kendall_tau, spearman};

use crate::error::{Error, Result};
use crate::vocabulary::count_terms;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub epsilon: f64,
    /// Augmented-frequency constant.
    pub k: f64,
    pub aggregation: Aggregation,
    pub vocab_size: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-12,
            k: 0.0,
            aggregation: Aggregation::Median,
            vocab_size: 100,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.k) {
            return Err(Error::Config("K must be in [0, 1)".into()));
        }
        if self.vocab_size < 2 {
            return Err(Error::Config("metric vocabulary needs at least two terms".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Excluded {
    /// Articles without tokens, skipped by the augmented density and the
    /// per-article PMI estimator.
    pub empty_articles: usize,
    /// Articles whose ESA vector is zero.
    pub esa_zero_vectors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainnessReport {
    pub collection: String,
    pub articles: usize,
    pub vocabulary_terms: usize,
    pub density: Option<f64>,
    pub augmented_density: Option<f64>,
    pub pmi_art: Option<f64>,
    pub pmi_col: Option<f64>,
    pub npmi_art: Option<f64>,
    pub npmi_col: Option<f64>,
    pub spearman: Option<f64>,
    pub kendall: Option<f64>,
    pub d_esa: Option<f64>,
    pub dom: Option<f64>,
    pub excluded: Excluded,
    /// Metrics left undefined, with the reason.
    pub undefined: Vec<String>,
    pub config: MetricsConfig,
}

fn keep(undefined: &mut Vec<String>, name: &str, r: Result<f64>) -> Option<f64> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            undefined.push(format!("{name}: {e}"));
            None
        }
    }
}

/// All single-collection metrics. `docs` and `root_docs` are preprocessed
/// articles; `vocab` is the ranked vocabulary (only the first
/// `cfg.vocab_size` terms are used). `dom` is left empty; see
/// [`assign_dom`].
pub fn compute_report(
    collection: &str,
    docs: &[Vec<String>],
    vocab: &[&str],
    root_docs: &[Vec<String>],
    esa: Option<&EsaSpace>,
    cfg: &MetricsConfig,
) -> Result<DomainnessReport> {
    cfg.validate()?;
    let terms: Vec<&str> = vocab.iter().take(cfg.vocab_size).copied().collect();
    let dist = TermDistribution::from_tokens(docs, &terms);
    let mut undefined = Vec::new();
    let mut excluded = Excluded {
        empty_articles: dist.totals.iter().filter(|t| **t == 0).count(),
        ..Excluded::default()
    };

    let density = keep(&mut undefined, "density", density(&dist));
    let augmented = keep(
        &mut undefined,
        "augmented_density",
        augmented_density(&dist, cfg.k).map(|(v, _)| v),
    );
    let mut family = |est, measure, name: &str| {
        keep(
            &mut undefined,
            name,
            pmi_family(&dist, est, measure, cfg.aggregation, cfg.epsilon),
        )
    };
    let pmi_art = family(Estimator::Art, Measure::Pmi, "pmi_art");
    let pmi_col = family(Estimator::Col, Measure::Pmi, "pmi_col");
    let npmi_art = family(Estimator::Art, Measure::Npmi, "npmi_art");
    let npmi_col = family(Estimator::Col, Measure::Npmi, "npmi_col");

    let coll_counts = count_terms(docs.iter().flatten());
    let root_counts = count_terms(root_docs.iter().flatten());
    let (spearman, kendall) = match correlation_vectors(&coll_counts, &root_counts) {
        Some((x, y)) => {
            let s = rank::spearman(&x, &y);
            let k = rank::kendall_tau(&x, &y);
            if s.is_none() {
                undefined.push("spearman: constant rank vector".into());
            }
            if k.is_none() {
                undefined.push("kendall: constant rank vector".into());
            }
            (s, k)
        }
        None => {
            undefined.push(format!(
                "spearman, kendall: fewer than {} points",
                rank::MIN_POINTS
            ));
            (None, None)
        }
    };

    let d_esa = match esa {
        Some(space) => match esa::d_esa(docs, space) {
            Ok((v, ex)) => {
                excluded.esa_zero_vectors = ex;
                Some(v)
            }
            Err(e) => {
                excluded.esa_zero_vectors = docs.len();
                undefined.push(format!("d_esa: {e}"));
                None
            }
        },
        None => {
            undefined.push("d_esa: no reference space".into());
            None
        }
    };

    Ok(DomainnessReport {
        collection: collection.to_string(),
        articles: docs.len(),
        vocabulary_terms: terms.len(),
        density,
        augmented_density: augmented,
        pmi_art,
        pmi_col,
        npmi_art,
        npmi_col,
        spearman,
        kendall,
        d_esa,
        dom: None,
        excluded,
        undefined,
        config: cfg.clone(),
    })
}

fn min_max(values: &[f64], ascending: bool, label: &str) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        info!("Dom: {label} has a degenerate range; using 0.5");
        return vec![0.5; values.len()];
    }
    values
        .iter()
        .map(|v| {
            if ascending {
                (v - lo) / range
            } else {
                (hi - v) / range
            }
        })
        .collect()
}

/// Combined score per collection: mean of min-max normalized PMI_col
/// (higher is better) and d_ESA (lower is better) over the comparison set.
pub fn dom_score(pmi_col: &[f64], d_esa: &[f64]) -> Result<Vec<f64>> {
    if pmi_col.len() != d_esa.len() {
        return Err(Error::Invalid("Dom inputs differ in length".into()));
    }
    if pmi_col.len() < 2 {
        return Err(Error::UndefinedMetric(
            "Dom needs at least two collections to normalize".into(),
        ));
    }
    let p = min_max(pmi_col, true, "PMI_col");
    let d = min_max(d_esa, false, "d_ESA");
    Ok(p.iter().zip(&d).map(|(a, b)| (a + b) / 2.0).collect())
}

/// Fills `dom` for every report that has both components, normalizing over
/// exactly those reports.
pub fn assign_dom(reports: &mut [DomainnessReport]) {
    let members: Vec<usize> = (0..reports.len())
        .filter(|&i| reports[i].pmi_col.is_some() && reports[i].d_esa.is_some())
        .collect();
    let pmi: Vec<f64> = members.iter().map(|&i| reports[i].pmi_col.unwrap()).collect();
    let esa: Vec<f64> = members.iter().map(|&i| reports[i].d_esa.unwrap()).collect();
    match dom_score(&pmi, &esa) {
        Ok(scores) => {
            for (&i, s) in members.iter().zip(scores) {
                reports[i].dom = Some(s);
            }
        }
        Err(e) => {
            warn!("Dom not computed: {e}");
            for r in reports.iter_mut() {
                r.undefined.push(format!("dom: {e}"));
            }
        }
    }
    for &i in (0..reports.len()).filter(|i| !members.contains(i)).collect::<Vec<_>>().iter() {
        reports[i]
            .undefined
            .push("dom: missing PMI_col or d_ESA".into());
    }
}

pub fn write_report_json(report: &DomainnessReport, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub const CSV_HEADER: &str = "collection,articles,density,augmented_density,pmi_art,pmi_col,npmi_art,npmi_col,spearman,kendall,d_esa,dom";

pub fn reports_csv(reports: &[DomainnessReport]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let fields = [
            r.collection.clone(),
            r.articles.to_string(),
            cell(r.density),
            cell(r.augmented_density),
            cell(r.pmi_art),
            cell(r.pmi_col),
            cell(r.npmi_art),
            cell(r.npmi_col),
            cell(r.spearman),
            cell(r.kendall),
            cell(r.d_esa),
            cell(r.dom),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_reports_csv(reports: &[DomainnessReport], path: &Path) -> Result<()> {
    fs::write(path, reports_csv(reports)).map_err(|e| Error::io(path, e))
}
