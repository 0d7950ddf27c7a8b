use std::collections::{BTreeSet, HashMap};

use crate::vocabulary::{rank_terms, ten_percent};

/// Terms taken from the head of each corpus's ranking.
pub const MAX_TERMS_PER_CORPUS: usize = 1000;

/// Correlations are left undefined below this many points.
pub const MIN_POINTS: usize = 5;

/// Mid-ranks (1-based); tied values share the mean of their positions.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn has_ties(ranks: &[f64]) -> bool {
    ranks.iter().any(|r| r.fract() != 0.0) || {
        let mut seen = std::collections::HashSet::new();
        !ranks.iter().all(|r| seen.insert(r.to_bits()))
    }
}

/// Spearman's rho: `1 - 6 sum d^2 / (n (n^2 - 1))` when neither side has
/// ties, otherwise the Pearson correlation of mid-ranks (the two agree
/// without ties). `None` when either side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rx = mid_ranks(x);
    let ry = mid_ranks(y);
    let n = x.len() as f64;
    if !has_ties(&rx) && !has_ties(&ry) {
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
        return Some(1.0 - 6.0 * d2 / (n * (n * n - 1.0)));
    }
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pair counts behind Kendall's tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Pairs tied in x (`T`).
    pub ties_x: u64,
    /// Pairs tied in y (`U`).
    pub ties_y: u64,
    pub pairs: u64,
}

fn tied_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

/// Counts in O(n log n): sort by (x, y), then count inversions in y with a
/// merge sort.
pub fn kendall_counts(x: &[f64], y: &[f64]) -> KendallCounts {
    assert_eq!(x.len(), y.len(), "kendall: length mismatch");
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let mut ties_x = 0u64;
    let mut ties_xy = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        ties_x += tied_pairs((j - i) as u64);
        let mut a = i;
        while a < j {
            let mut b = a + 1;
            while b < j && y[idx[b]] == y[idx[a]] {
                b += 1;
            }
            ties_xy += tied_pairs((b - a) as u64);
            a = b;
        }
        i = j;
    }

    let mut ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut ties_y = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        ties_y += tied_pairs((j - i) as u64);
        i = j;
    }

    let pairs = tied_pairs(n as u64);
    // Pairs tied in neither variable are either concordant or discordant.
    let untied = pairs + ties_xy - ties_x - ties_y;
    let discordant = swaps;
    KendallCounts {
        concordant: untied - discordant,
        discordant,
        ties_x,
        ties_y,
        pairs,
    }
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-b. `None` when either variable is constant.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let c = kendall_counts(x, y);
    tau_from_counts(&c)
}

pub fn tau_from_counts(c: &KendallCounts) -> Option<f64> {
    let dx = (c.pairs - c.ties_x) as f64;
    let dy = (c.pairs - c.ties_y) as f64;
    if dx == 0.0 || dy == 0.0 {
        return None;
    }
    Some((c.concordant as f64 - c.discordant as f64) / (dx * dy).sqrt())
}

/// The terms a corpus contributes: its top 10% (at most
/// [`MAX_TERMS_PER_CORPUS`]) after discarding frequency-1 terms.
pub fn head_terms(counts: &HashMap<String, u64>) -> Vec<String> {
    let ranked = rank_terms(counts);
    let keep = ten_percent(ranked.len());
    ranked
        .into_iter()
        .take(keep)
        .filter(|(_, c)| *c > 1)
        .take(MAX_TERMS_PER_CORPUS)
        .map(|(t, _)| t)
        .collect()
}

/// Paired frequency vectors over the union of both corpora's head terms.
/// A term missing from one corpus has frequency 0 there and so ranks at its
/// bottom. `None` with fewer than [`MIN_POINTS`] terms.
pub fn correlation_vectors(
    collection: &HashMap<String, u64>,
    reference: &HashMap<String, u64>,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let terms: BTreeSet<String> = head_terms(collection)
        .into_iter()
        .chain(head_terms(reference))
        .collect();
    if terms.len() < MIN_POINTS {
        return None;
    }
    let freq = |m: &HashMap<String, u64>, t: &String| m.get(t).copied().unwrap_or(0) as f64;
    Some((
        terms.iter().map(|t| freq(collection, t)).collect(),
        terms.iter().map(|t| freq(reference, t)).collect(),
    ))
}
