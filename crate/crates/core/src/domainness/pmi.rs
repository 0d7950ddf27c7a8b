use serde::{Deserialize, Serialize};

use super::distribution::TermDistribution;
use crate::error::{Error, Result};

/// How term probabilities are estimated from a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Pooled counts over pooled token mass.
    Art,
    /// Mean of per-article relative frequencies.
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Pmi,
    Npmi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Median,
    Mean,
}

/// Marginal and joint probabilities of the vocabulary under one estimator.
///
/// The joint occurrence of two terms within an article is
/// `min(count_i, count_j)`: zero unless both are present, and never more
/// than either marginal.
#[derive(Debug, Clone)]
pub struct Probabilities {
    pub marginal: Vec<f64>,
    joint: Vec<f64>,
    n: usize,
}

impl Probabilities {
    pub fn estimate(dist: &TermDistribution, estimator: Estimator) -> Self {
        let n = dist.vocab.len();
        let mut marginal = vec![0.0; n];
        let mut joint = vec![0.0; n * n];
        match estimator {
            Estimator::Art => {
                let mass: u64 = dist.totals.iter().sum();
                if mass > 0 {
                    let mut m = vec![0u64; n];
                    let mut j = vec![0u64; n * n];
                    for row in &dist.counts {
                        accumulate_u64(row, &mut m, &mut j);
                    }
                    for i in 0..n {
                        marginal[i] = m[i] as f64 / mass as f64;
                    }
                    for (p, c) in joint.iter_mut().zip(&j) {
                        *p = *c as f64 / mass as f64;
                    }
                }
            }
            Estimator::Col => {
                let mut used = 0usize;
                for (row, &total) in dist.counts.iter().zip(&dist.totals) {
                    if total == 0 {
                        continue;
                    }
                    used += 1;
                    let t = total as f64;
                    for i in 0..n {
                        if row[i] == 0 {
                            continue;
                        }
                        marginal[i] += row[i] as f64 / t;
                        for k in (i + 1)..n {
                            let both = row[i].min(row[k]);
                            if both > 0 {
                                joint[i * n + k] += both as f64 / t;
                            }
                        }
                    }
                }
                if used > 0 {
                    let u = used as f64;
                    marginal.iter_mut().for_each(|p| *p /= u);
                    joint.iter_mut().for_each(|p| *p /= u);
                }
            }
        }
        Self { marginal, joint, n }
    }

    /// Joint probability of terms `i < j`.
    pub fn joint(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.joint[a * self.n + b]
    }
}

fn accumulate_u64(row: &[u64], m: &mut [u64], j: &mut [u64]) {
    let n = row.len();
    for i in 0..n {
        if row[i] == 0 {
            continue;
        }
        m[i] += row[i];
        for k in (i + 1)..n {
            j[i * n + k] += row[i].min(row[k]);
        }
    }
}

pub fn pmi(p_ij: f64, p_i: f64, p_j: f64, epsilon: f64) -> f64 {
    ((p_ij + epsilon) / (p_i * p_j + epsilon)).log2()
}

/// Normalized PMI, clamped to [-1, 1] to absorb rounding at the extremes.
pub fn npmi(p_ij: f64, p_i: f64, p_j: f64, epsilon: f64) -> f64 {
    let denom = -(p_ij + epsilon).log2();
    if denom <= 0.0 {
        return 1.0;
    }
    (pmi(p_ij, p_i, p_j, epsilon) / denom).clamp(-1.0, 1.0)
}

/// Values of `measure` for every unordered pair `i < j`, in lexicographic
/// pair order.
pub fn pair_values(probs: &Probabilities, measure: Measure, epsilon: f64) -> Vec<f64> {
    let n = probs.marginal.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (pij, pi, pj) = (probs.joint(i, j), probs.marginal[i], probs.marginal[j]);
            out.push(match measure {
                Measure::Pmi => pmi(pij, pi, pj, epsilon),
                Measure::Npmi => npmi(pij, pi, pj, epsilon),
            });
        }
    }
    out
}

pub fn aggregate(values: &mut [f64], how: Aggregation) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(match how {
        Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregation::Median => {
            values.sort_by(f64::total_cmp);
            let m = values.len() / 2;
            if values.len() % 2 == 1 {
                values[m]
            } else {
                (values[m - 1] + values[m]) / 2.0
            }
        }
    })
}

/// Aggregated (N)PMI over all vocabulary pairs.
pub fn pmi_family(
    dist: &TermDistribution,
    estimator: Estimator,
    measure: Measure,
    aggregation: Aggregation,
    epsilon: f64,
) -> Result<f64> {
    if dist.vocab.len() < 2 {
        return Err(Error::UndefinedMetric(
            "PMI needs a vocabulary of at least two terms".into(),
        ));
    }
    if dist.is_empty() {
        return Err(Error::UndefinedMetric("PMI of an empty collection".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Config("epsilon must be positive".into()));
    }
    let probs = Probabilities::estimate(dist, estimator);
    let mut values = pair_values(&probs, measure, epsilon);
    Ok(aggregate(&mut values, aggregation).expect("at least one pair"))
}
