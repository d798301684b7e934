use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub const ALPHA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KruskalWallis {
    /// Tie-corrected H statistic.
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
    pub significant: bool,
}

/// Average ranks (1-based) with ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Kruskal–Wallis H-test at significance level 0.05.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::InvalidParameter("need at least two groups".into()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidParameter("empty group".into()));
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite observation".into()));
    }
    let n = all.len() as f64;
    let ranks = average_ranks(&all);
    let mut h = 0.0;
    let mut start = 0;
    for g in groups {
        let r: f64 = ranks[start..start + g.len()].iter().sum();
        h += r * r / g.len() as f64;
        start += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    let mut sorted = all.clone();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Err(Error::Degenerate("all observations are equal"));
    }
    h /= correction;
    let df = groups.len() - 1;
    let chi = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    let p_value = 1.0 - chi.cdf(h.max(0.0));
    Ok(KruskalWallis {
        h,
        df,
        p_value,
        significant: h > chi.inverse_cdf(1.0 - ALPHA),
    })
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
