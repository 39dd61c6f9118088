//! Reference computations shared by the integration tests. Nothing here
//! calls into the sampler or parameter code it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `ρ_σ(y − c)` normalized by direct summation over `[lo, hi]`.
pub fn exact_pmf(sigma: f64, center: f64, lo: i64, hi: i64) -> BTreeMap<i64, f64> {
    let weight = |y: i64| (-std::f64::consts::PI * (y as f64 - center).powi(2) / (sigma * sigma)).exp();
    let total: f64 = (lo..=hi).map(weight).sum();
    (lo..=hi).map(|y| (y, weight(y) / total)).collect()
}

pub fn histogram(draws: &[i64]) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for &d in draws {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

/// Total variation distance between an empirical histogram and a pmf.
pub fn tv_distance(hist: &BTreeMap<i64, usize>, pmf: &BTreeMap<i64, f64>) -> f64 {
    let n: usize = hist.values().sum();
    let mut keys: Vec<i64> = hist.keys().chain(pmf.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let e = hist.get(k).copied().unwrap_or(0) as f64 / n as f64;
            (e - pmf.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum::<f64>()
        / 2.0
}

/// p-value of the χ² homogeneity test between two samples. Values are
/// grouped into bins holding at least `min_count` pooled observations.
pub fn two_sample_chi2(a: &[i64], b: &[i64], min_count: usize) -> f64 {
    let (ha, hb) = (histogram(a), histogram(b));
    let mut keys: Vec<i64> = ha.keys().chain(hb.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for k in keys {
        cur.0 += ha.get(&k).copied().unwrap_or(0) as f64;
        cur.1 += hb.get(&k).copied().unwrap_or(0) as f64;
        if cur.0 + cur.1 >= min_count as f64 {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += cur.0;
        last.1 += cur.1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let pooled = (x + y) / (na + nb);
            let (ea, eb) = (pooled * na, pooled * nb);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    let dof = (bins.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}
