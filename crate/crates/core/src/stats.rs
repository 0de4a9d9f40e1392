//! Empirical distributions: quantiles, tail frequencies and KS distances.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sorted Monte-Carlo sample with quantile and ecdf queries.
///
/// The quantile convention is fixed once for the whole crate: `quantile(q)`
/// returns the order statistic with 1-based index `ceil(q * count)`.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Takes ownership of the samples and sorts them ascending.
    pub fn from_samples(mut samples: Vec<f64>) -> Self {
        samples.sort_unstable_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
        EmpiricalDistribution { samples }
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Order statistic at 1-based index `ceil(q * count)`, `q` in (0, 1).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain("quantile level must be in (0,1)"));
        }
        if self.samples.is_empty() {
            return Err(Error::UnstableQuantile { needed: 1, got: 0 });
        }
        let idx = math::ceil(q * self.samples.len() as f64) as usize;
        let idx = idx.clamp(1, self.samples.len());
        Ok(self.samples[idx - 1])
    }

    /// Empirical P{X <= x}.
    pub fn ecdf(&self, x: f64) -> f64 {
        let below = self.samples.partition_point(|&s| s <= x);
        below as f64 / self.samples.len() as f64
    }

    /// Empirical P{X >= x}.
    pub fn survival(&self, x: f64) -> f64 {
        let strictly_below = self.samples.partition_point(|&s| s < x);
        (self.samples.len() - strictly_below) as f64 / self.samples.len() as f64
    }
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (a.samples(), b.samples());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max(math::abs(i as f64 / n - j as f64 / m));
    }
    d
}

/// One-sample KS distance of an empirical distribution against a CDF.
pub fn ks_against_cdf<F: Fn(f64) -> f64>(dist: &EmpiricalDistribution, cdf: F) -> f64 {
    let xs = dist.samples();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(math::abs((i as f64 + 1.0) / n - f));
        d = d.max(math::abs(i as f64 / n - f));
    }
    d
}

/// 95% binomial half-width for an estimated proportion.
pub fn binomial_halfwidth(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    1.959964 * math::sqrt(p * (1.0 - p) / trials as f64)
}
