//! Two-sided Wilcoxon signed-rank test.
//!
//! Variant fixed for the benchmark protocol: zero differences are dropped,
//! tied absolute differences get averaged ranks, the null distribution is
//! exact (enumerated) up to 25 nonzero pairs and a normal approximation
//! with tie correction and continuity correction beyond that. Two methods
//! are "the same" when the two-sided p-value exceeds 0.05.

use crate::error::{Error, Result};

const ALPHA: f64 = 0.05;
const EXACT_LIMIT: usize = 25;

/// Paired two-sided signed-rank p-value.
pub fn wilcoxon_signed_rank_p(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        // Every pair agrees; no evidence of a difference.
        return Ok(1.0);
    }

    let ranks = average_ranks(&diffs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = total - w_plus;

    if n <= EXACT_LIMIT {
        Ok(exact_p(&ranks, w_plus.min(w_minus)))
    } else {
        Ok(normal_approx_p(&diffs, &ranks, w_plus))
    }
}

/// True when the test cannot tell the two paired samples apart at 95%.
pub fn wilcoxon_same(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(wilcoxon_signed_rank_p(x, y)? > ALPHA)
}

/// Ranks of |d|, ascending, ties averaged.
fn average_ranks(diffs: &[f64]) -> Vec<f64> {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        diffs[a]
            .abs()
            .partial_cmp(&diffs[b].abs())
            .expect("finite differences")
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Exact two-sided p-value: enumerate the null distribution of W over all
/// sign assignments of the observed (possibly tied) ranks. Ranks are
/// doubled so averaged ties become integers; counts stay exact in f64 for
/// n <= 25.
fn exact_p(ranks: &[f64], w_min: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in &doubled {
        reach += r;
        for w in (r..=reach).rev() {
            counts[w] += counts[w - r];
        }
    }
    let threshold = (w_min * 2.0).round() as usize;
    let below: f64 = counts[..=threshold.min(total)].iter().sum();
    let p = 2.0 * below / 2f64.powi(ranks.len() as i32);
    p.min(1.0)
}

/// Normal approximation with tie-corrected variance and continuity
/// correction.
fn normal_approx_p(diffs: &[f64], ranks: &[f64], w_plus: f64) -> f64 {
    let n = diffs.len() as f64;
    let mean = n * (n + 1.0) / 4.0;

    // Tie correction: sum t^3 - t over groups of equal |d|.
    let mut abs_sorted: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    abs_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite differences"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < abs_sorted.len() {
        let mut j = i;
        while j + 1 < abs_sorted.len() && abs_sorted[j + 1] == abs_sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if variance <= 0.0 {
        return 1.0;
    }
    debug_assert_eq!(ranks.len(), diffs.len());

    let shift = (w_plus - mean).abs();
    let corrected = (shift - 0.5).max(0.0);
    let z = corrected / variance.sqrt();
    // Two-sided tail of the standard normal.
    libm::erfc(z / std::f64::consts::SQRT_2)
}
