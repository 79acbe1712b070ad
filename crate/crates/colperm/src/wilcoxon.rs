//! Wilcoxon signed-rank test for paired samples.
//!
//! Differences `a - b` equal to zero are dropped. Absolute differences are
//! ranked with average ranks on ties and `V` is the sum of the ranks of the
//! positive differences.
//!
//! For up to [`EXACT_LIMIT`] nonzero pairs the p-value comes from the exact
//! null distribution of `V` given the observed ranks (every sign assignment
//! equally likely), counted by dynamic programming over doubled ranks. Above
//! that, the normal approximation is used:
//!
//! ```text
//! mean  = n(n+1)/4
//! var   = n(n+1)(2n+1)/24 - sum(t^3 - t)/48     (t = size of each tie group)
//! z     = (V - mean - cc) / sqrt(var)
//! ```
//!
//! with continuity correction `cc = sign(V - mean)/2` for the two-sided test,
//! `+1/2` for `greater` and `-1/2` for `less`.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `a` tends to be smaller than `b`.
    Less,
    /// `a` tends to be larger than `b`.
    Greater,
}

impl std::str::FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            _ => Err(format!("unknown alternative `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact when there are at most [`EXACT_LIMIT`] nonzero pairs.
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    Length(usize, usize),
    #[error("no nonzero pairs")]
    NoNonzeroPairs,
    #[error("exact distribution limited to {EXACT_LIMIT} pairs, got {0}")]
    TooLargeForExact(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonReport {
    /// Nonzero pairs used.
    pub n: usize,
    pub v: f64,
    pub p_value: f64,
    pub exact: bool,
    pub alternative: Alternative,
}

/// Average ranks (1-based) of `values`.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alternative: Alternative) -> Result<WilcoxonReport, StatsError> {
    wilcoxon_signed_rank_with(a, b, alternative, Method::Auto)
}

pub fn wilcoxon_signed_rank_with(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    method: Method,
) -> Result<WilcoxonReport, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::Length(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|&d| d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(StatsError::NoNonzeroPairs);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    // Starts from +0.0: an empty f64 sum is -0.0.
    let v = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, &d)| d > 0.0)
        .fold(0.0, |acc, (r, _)| acc + r);

    let exact = match method {
        Method::Auto => n <= EXACT_LIMIT,
        Method::Exact if n > EXACT_LIMIT => return Err(StatsError::TooLargeForExact(n)),
        Method::Exact => true,
        Method::Normal => false,
    };
    let p_value = if exact {
        exact_p(&ranks, v, alternative)
    } else {
        normal_p(&abs, &ranks, v, alternative)
    };
    Ok(WilcoxonReport {
        n,
        v,
        p_value,
        exact,
        alternative,
    })
}

/// Counts, for every achievable doubled rank sum, how many of the `2^n` sign
/// assignments reach it.
fn doubled_sum_counts(ranks: &[f64]) -> Vec<u64> {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &d in &doubled {
        reach += d;
        for s in (d..=reach).rev() {
            counts[s] += counts[s - d];
        }
    }
    counts
}

fn exact_p(ranks: &[f64], v: f64, alternative: Alternative) -> f64 {
    let counts = doubled_sum_counts(ranks);
    let target = (v * 2.0).round() as usize;
    let all = 2f64.powi(ranks.len() as i32);
    let below: u64 = counts[..=target].iter().sum();
    let above: u64 = counts[target..].iter().sum();
    let lower = below as f64 / all;
    let upper = above as f64 / all;
    match alternative {
        Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
        Alternative::Less => lower,
        Alternative::Greater => upper,
    }
}

fn normal_p(abs: &[f64], ranks: &[f64], v: f64, alternative: Alternative) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ties / 48.0;
    let centered = v - mean;
    let cc = match alternative {
        Alternative::TwoSided if centered == 0.0 => 0.0,
        Alternative::TwoSided => 0.5 * centered.signum(),
        Alternative::Less => -0.5,
        Alternative::Greater => 0.5,
    };
    let z = (centered - cc) / var.sqrt();
    let normal = Normal::standard();
    match alternative {
        Alternative::TwoSided => (2.0 * normal.cdf(z).min(normal.sf(z))).min(1.0),
        Alternative::Less => normal.cdf(z),
        Alternative::Greater => normal.sf(z),
    }
}
