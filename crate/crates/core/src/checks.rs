//! Self-check oracles for the asymptotics the calibrators rely on.
//!
//! Three independent cross-checks:
//! * the chi-square tail P{xi^2/2 >= x} = erfc(sqrt(x)) against its
//!   asymptote exp(-x)/sqrt(pi x);
//! * the standardized Bayes null statistic against the limiting variable
//!   sampled in `zeta`;
//! * the upper order statistics of w_k exp(xi_k^2/2) against the Pyke
//!   spacing representation built from sums of unit exponentials.

use alloc::vec::Vec;

use crate::calibration::{b_n, null_statistic_trial, SQRT_PI};
use crate::detectors::TestKind;
use crate::error::{Error, Result};
use crate::math;
use crate::priors::{discrete_entropy_offset, PriorVector};
use crate::rng::RngStream;
use crate::stats::EmpiricalDistribution;

pub const SQRT_PI_OVER_2: f64 = 1.2533141373155003;

/// P{xi^2 / 2 >= x} for standard Gaussian xi, exactly: erfc(sqrt(x)).
pub fn gaussian_tail_exact(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        math::erfc(math::sqrt(x))
    }
}

/// Large-x asymptote exp(-x) / sqrt(pi x).
pub fn gaussian_tail_asymptote(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain("asymptote needs x > 0"));
    }
    Ok(math::exp(-x) / math::sqrt(core::f64::consts::PI * x))
}

/// Closed-form comparison: (x, exact, asymptote, relative error) over a
/// grid, relative to the asymptote.
pub fn gaussian_tail_table(x_grid: &[f64]) -> Result<Vec<(f64, f64, f64, f64)>> {
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let exact = gaussian_tail_exact(x);
        let asym = gaussian_tail_asymptote(x)?;
        out.push((x, exact, asym, math::abs(exact - asym) / asym));
    }
    Ok(out)
}

/// Monte-Carlo comparison: empirical P{xi^2/2 >= x} over the grid against
/// the asymptote, returned as relative errors. One Gaussian stream feeds
/// every grid point.
pub fn gaussian_tail_check(x_grid: &[f64], trials: u64, seed: u64) -> Result<Vec<f64>> {
    let mut hits = alloc::vec![0u64; x_grid.len()];
    let mut rng = RngStream::new(seed, 0);
    for _ in 0..trials {
        let z = rng.next_gaussian();
        let v = z * z / 2.0;
        for (h, &x) in hits.iter_mut().zip(x_grid) {
            if v >= x {
                *h += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(x_grid.len());
    for (&h, &x) in hits.iter().zip(x_grid) {
        let emp = h as f64 / trials as f64;
        let asym = gaussian_tail_asymptote(x)?;
        out.push(math::abs(emp - asym) / asym);
    }
    Ok(out)
}

/// One draw of the standardized Bayes null statistic
/// b_n (sqrt(pi/2) sum_k w_k exp(xi_k^2/2) - b_n) - H_n, which converges in
/// law to the limiting variable as n grows. H_n is the discrete entropy
/// offset of the prior.
pub fn standardized_null_trial(prior: &PriorVector, seed: u64, trial: u64) -> Result<f64> {
    let b = b_n(prior.n())?;
    let h = discrete_entropy_offset(prior);
    let log_stat = null_statistic_trial(TestKind::Bayes, prior, seed, trial);
    Ok(b * (SQRT_PI_OVER_2 * math::exp(log_stat) - b) - h)
}

/// Empirical distribution of the standardized null statistic (sequential;
/// the companion crate drives the same trials in parallel).
pub fn standardized_null_distribution(
    prior: &PriorVector,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    let b = b_n(prior.n())?;
    let h = discrete_entropy_offset(prior);
    let samples: Vec<f64> = (0..trials)
        .map(|t| {
            let log_stat = null_statistic_trial(TestKind::Bayes, prior, seed, t);
            b * (SQRT_PI_OVER_2 * math::exp(log_stat) - b) - h
        })
        .collect();
    Ok(EmpiricalDistribution::from_samples(samples))
}

/// Two-sample Kolmogorov-Smirnov distance between the standardized null
/// statistic and a reference sample of the limiting variable.
pub fn null_limit_check(
    prior: &PriorVector,
    trials: u64,
    seed: u64,
    zeta_reference: &EmpiricalDistribution,
) -> Result<f64> {
    let dist = standardized_null_distribution(prior, trials, seed)?;
    Ok(crate::stats::ks_two_sample(&dist, zeta_reference))
}

/// One draw of the k_max + 1 largest of the n normalized values
/// exp(xi_i^2/2)/n, sorted descending (entry k is the (k+1)-th largest).
/// Keeps a small buffer of squared readings and exponentiates only the
/// survivors.
pub fn top_order_statistics_trial(n: u32, k_max: u32, seed: u64, trial: u64) -> Vec<f64> {
    let keep = (k_max + 1) as usize;
    let mut rng = RngStream::new(seed, trial);
    // `top` holds the current keep largest xi^2, unordered except that
    // top[min_idx] is the smallest of them
    let mut top: Vec<f64> = Vec::with_capacity(keep);
    let mut min_idx = 0usize;
    for _ in 0..n {
        let z = rng.next_gaussian();
        let sq = z * z;
        if top.len() < keep {
            top.push(sq);
            if sq < top[min_idx] {
                min_idx = top.len() - 1;
            }
        } else if sq > top[min_idx] {
            top[min_idx] = sq;
            min_idx = 0;
            for (i, &v) in top.iter().enumerate().skip(1) {
                if v < top[min_idx] {
                    min_idx = i;
                }
            }
        }
    }
    top.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    top.iter().map(|&sq| math::exp(sq / 2.0) / n as f64).collect()
}

/// One draw of the (k+1)-th largest of the n normalized values
/// exp(xi_i^2/2)/n.
pub fn top_order_statistic_trial(n: u32, k: u32, seed: u64, trial: u64) -> f64 {
    top_order_statistics_trial(n, k, seed, trial)[k as usize]
}

/// Spacing-representation value at a given exponential sum E:
/// [sqrt(pi) E]^(-1) [log(n / (sqrt(pi) E))]^(-1/2).
pub fn pyke_rhs_at(n: u32, e_sum: f64) -> Result<f64> {
    if !(e_sum > 0.0) {
        return Err(Error::Domain("exponential sum must be positive"));
    }
    let ratio = n as f64 / (SQRT_PI * e_sum);
    if ratio <= 1.0 {
        return Err(Error::InsufficientTail { x: e_sum });
    }
    Ok(1.0 / (SQRT_PI * e_sum * math::sqrt(math::ln(ratio))))
}

/// One draw of the spacing representation for each k <= k_max: entry k uses
/// E = sum of k+1 unit exponentials from stream `(seed, trial)`.
pub fn pyke_rhs_trials(n: u32, k_max: u32, seed: u64, trial: u64) -> Result<Vec<f64>> {
    let mut rng = RngStream::new(seed, trial);
    let mut e = 0.0;
    let mut out = Vec::with_capacity((k_max + 1) as usize);
    for _ in 0..=k_max {
        e += rng.next_exponential();
        out.push(pyke_rhs_at(n, e)?);
    }
    Ok(out)
}

/// One draw of the spacing representation for the (k+1)-th largest of n.
pub fn pyke_rhs_trial(n: u32, k: u32, seed: u64, trial: u64) -> Result<f64> {
    Ok(pyke_rhs_trials(n, k, seed, trial)?[k as usize])
}

/// Maximum over k <= k_max of the two-sample Kolmogorov-Smirnov distance
/// between the (k+1)-th order statistic law and its spacing representation.
/// The representation stream is decorrelated from the Gaussian stream by a
/// fixed seed offset.
pub fn pyke_oracle_check(n: u32, k_max: u32, trials: u64, seed: u64) -> Result<f64> {
    if k_max + 1 >= n {
        return Err(Error::Domain("the spacing representation needs k_max well below n"));
    }
    let keep = (k_max + 1) as usize;
    let mut lhs: Vec<Vec<f64>> = (0..keep).map(|_| Vec::with_capacity(trials as usize)).collect();
    let mut rhs = lhs.clone();
    for t in 0..trials {
        let order = top_order_statistics_trial(n, k_max, seed, t);
        let repr = pyke_rhs_trials(n, k_max, seed ^ 0x5eed, t)?;
        for k in 0..keep {
            lhs[k].push(order[k]);
            rhs[k].push(repr[k]);
        }
    }
    let mut worst = 0.0f64;
    for k in 0..keep {
        let a = EmpiricalDistribution::from_samples(core::mem::take(&mut lhs[k]));
        let b = EmpiricalDistribution::from_samples(core::mem::take(&mut rhs[k]));
        let d = crate::stats::ks_two_sample(&a, &b);
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}
