//! Critical-threshold calibration.
//!
//! Exact thresholds come from Monte-Carlo quantiles of the null statistic:
//! all trials are simulated, sorted once, and the (1 - alpha) order statistic
//! at 1-based index ceil((1 - alpha) * trials) is read off, so a single run
//! serves every alpha. Asymptotic thresholds implement the limiting formulas
//! for the MAP test and for the Bayes test (the latter in the linear domain
//! of the statistic, driven by a quantile of the limiting variable).
//!
//! Trial i draws from the counter-based stream (seed, i), so calibration is
//! deterministic for any worker count.

use alloc::vec::Vec;

use crate::detectors::TestKind;
use crate::error::{Error, Result};
use crate::math;
use crate::priors::PriorVector;
use crate::rng::RngStream;
use crate::stats::{binomial_halfwidth, EmpiricalDistribution};

pub const SQRT_PI: f64 = 1.772453850905516;
/// sqrt(2/pi), the scale of the limiting Bayes statistic.
pub const SQRT_2_OVER_PI: f64 = 0.7978845608028654;

const MIN_TRIALS: u64 = 1_000;
const MIN_TAIL_COUNT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    pub log_threshold: f64,
    pub alpha: f64,
    pub n: u32,
    pub method: Method,
    /// Zero iff the method is asymptotic.
    pub trials: u64,
    /// 95% binomial half-width on the achieved level (Monte-Carlo only).
    pub ci_halfwidth: f64,
}

/// Log of the null statistic for one Monte-Carlo trial.
///
/// Draws one Gaussian per positive-weight channel, in channel order, from
/// stream `(seed, trial)`.
pub fn null_statistic_trial(kind: TestKind, prior: &PriorVector, seed: u64, trial: u64) -> f64 {
    match kind {
        TestKind::Map => null_statistic_pair_trial(prior, seed, trial).0,
        TestKind::Bayes => null_statistic_pair_trial_bayes(prior, seed, trial),
    }
}

/// MAP and Bayes log statistics from the same noise draw.
pub fn null_statistic_pair_trial(prior: &PriorVector, seed: u64, trial: u64) -> (f64, f64) {
    let mut rng = RngStream::new(seed, trial);
    let mut best = f64::NEG_INFINITY;
    let mut m = f64::NEG_INFINITY;
    let mut d = 0.0;
    for (_, w) in prior.iter() {
        let xi = rng.next_gaussian();
        let term = math::ln(w) + 0.5 * xi * xi;
        if term > best {
            best = term;
        }
        if term <= m {
            d += math::exp(term - m);
        } else {
            d = d * math::exp(m - term) + 1.0;
            m = term;
        }
    }
    (best, m + math::ln(d))
}

fn null_statistic_pair_trial_bayes(prior: &PriorVector, seed: u64, trial: u64) -> f64 {
    let mut rng = RngStream::new(seed, trial);
    let mut m = f64::NEG_INFINITY;
    let mut d = 0.0;
    for (_, w) in prior.iter() {
        let xi = rng.next_gaussian();
        let term = math::ln(w) + 0.5 * xi * xi;
        if term <= m {
            d += math::exp(term - m);
        } else {
            d = d * math::exp(m - term) + 1.0;
            m = term;
        }
    }
    m + math::ln(d)
}

/// Simulate `trials` null log-statistics sequentially.
pub fn mc_null_statistics(
    kind: TestKind,
    prior: &PriorVector,
    trials: u64,
    seed: u64,
) -> EmpiricalDistribution {
    let samples: Vec<f64> =
        (0..trials).map(|t| null_statistic_trial(kind, prior, seed, t)).collect();
    EmpiricalDistribution::from_samples(samples)
}

fn check_mc_level(alpha: f64, trials: u64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must be in (0,1)"));
    }
    if trials < MIN_TRIALS {
        return Err(Error::Domain("Monte-Carlo calibration needs at least 1000 trials"));
    }
    if alpha * (trials as f64) < MIN_TAIL_COUNT {
        return Err(Error::UnstableQuantile {
            needed: (MIN_TAIL_COUNT / alpha) as u64,
            got: trials,
        });
    }
    Ok(())
}

/// Read one threshold off a pre-simulated null distribution.
pub fn mc_critical_from_null(
    null: &EmpiricalDistribution,
    alpha: f64,
    n: u32,
) -> Result<CalibrationResult> {
    let trials = null.count() as u64;
    check_mc_level(alpha, trials)?;
    let log_threshold = null.quantile(1.0 - alpha)?;
    Ok(CalibrationResult {
        log_threshold,
        alpha,
        n,
        method: Method::MonteCarlo,
        trials,
        ci_halfwidth: binomial_halfwidth(alpha, trials),
    })
}

/// Monte-Carlo critical threshold (log domain) for one test at one level.
pub fn mc_critical(
    kind: TestKind,
    prior: &PriorVector,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<CalibrationResult> {
    check_mc_level(alpha, trials)?;
    let null = mc_null_statistics(kind, prior, trials, seed);
    mc_critical_from_null(&null, alpha, prior.n())
}

/// Limiting MAP critical level, log t* = log(1/(sqrt(pi) alpha))
/// - (1/2) log log(n / (sqrt(pi) alpha)).
pub fn asymptotic_critical_map(alpha: f64, n: u32) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must be in (0,1)"));
    }
    if n < 2 {
        return Err(Error::Domain("asymptotic MAP threshold needs n >= 2"));
    }
    let ratio = n as f64 / (SQRT_PI * alpha);
    if ratio <= core::f64::consts::E {
        return Err(Error::Domain("n/(sqrt(pi) alpha) must exceed e"));
    }
    Ok(math::ln(1.0 / (SQRT_PI * alpha)) - 0.5 * math::ln(math::ln(ratio)))
}

/// Normalizing scale b_n = sqrt(2 log(n / sqrt(pi log n))).
pub fn b_n(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain("b_n needs n >= 3"));
    }
    let n = n as f64;
    Ok(math::sqrt(2.0 * math::ln(n / math::sqrt(core::f64::consts::PI * math::ln(n)))))
}

/// Asymptotic Bayes threshold, in the linear domain of the statistic and its
/// logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesThreshold {
    pub linear: f64,
    pub log: f64,
}

/// sqrt(2/pi) [ b_n + (t_alpha + H) / b_n ], the limiting Bayes critical
/// value; `zeta_quantile` is the upper-alpha quantile of the limiting
/// variable and `entropy` the differential entropy of the prior shape.
pub fn asymptotic_critical_bayes(
    alpha: f64,
    n: u32,
    entropy: f64,
    zeta_quantile: f64,
) -> Result<BayesThreshold> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must be in (0,1)"));
    }
    let b = b_n(n)?;
    let linear = SQRT_2_OVER_PI * (b + (zeta_quantile + entropy) / b);
    if linear <= 0.0 {
        return Err(Error::Domain("asymptotic Bayes threshold is not positive"));
    }
    Ok(BayesThreshold { linear, log: math::ln(linear) })
}

/// MAP approximation error against an already-computed MC log threshold.
pub fn approx_error_map_from(log_threshold_mc: f64, alpha: f64, n: u32) -> Result<f64> {
    Ok(log_threshold_mc - asymptotic_critical_map(alpha, n)?)
}

/// Delta(alpha, n): Monte-Carlo MAP log threshold for a uniform prior of
/// dimension n, minus the limiting formula.
pub fn approx_error_map(alpha: f64, n: u32, trials: u64, seed: u64) -> Result<f64> {
    let prior = PriorVector::uniform(n)?;
    let mc = mc_critical(TestKind::Map, &prior, alpha, trials, seed)?;
    approx_error_map_from(mc.log_threshold, alpha, n)
}

/// Bayes approximation error in the linear domain against an
/// already-computed MC log threshold.
pub fn approx_error_bayes_from(
    log_threshold_mc: f64,
    alpha: f64,
    n: u32,
    entropy: f64,
    zeta_quantile: f64,
) -> Result<f64> {
    let asym = asymptotic_critical_bayes(alpha, n, entropy, zeta_quantile)?;
    Ok(math::exp(log_threshold_mc) - asym.linear)
}

/// Bayes approximation error (linear domain): MC threshold minus the
/// limiting formula driven by `zeta_quantile`.
pub fn approx_error_bayes(
    alpha: f64,
    prior: &PriorVector,
    entropy: f64,
    zeta_quantile: f64,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let mc = mc_critical(TestKind::Bayes, prior, alpha, trials, seed)?;
    approx_error_bayes_from(mc.log_threshold, alpha, prior.n(), entropy, zeta_quantile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::TestKind;

    // frozen direct evaluations of the limiting formulas
    const LOG_TSTAR_005_400: f64 = 1.3583694063469554;
    const LOG_TSTAR_005_40: f64 = 1.5182201165622713;
    const B_400: f64 = 3.0079666433392624;
    const B_40: f64 = 2.219843751576952;

    #[test]
    fn asymptotic_map_matches_frozen_values() {
        assert!((asymptotic_critical_map(0.05, 400).unwrap() - LOG_TSTAR_005_400).abs() < 1e-12);
        assert!((asymptotic_critical_map(0.05, 40).unwrap() - LOG_TSTAR_005_40).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_map_first_term_vanishes_at_inv_sqrt_pi() {
        let alpha = 1.0 / SQRT_PI;
        let n = 400;
        let v = asymptotic_critical_map(alpha, n).unwrap();
        let expected = -0.5 * math::ln(math::ln(n as f64));
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_map_domain_error() {
        // n/(sqrt(pi) alpha) = 2/(sqrt(pi) * 0.99) ~ 1.14 <= e
        assert!(matches!(asymptotic_critical_map(0.99, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn b_n_matches_frozen_values() {
        assert!((b_n(400).unwrap() - B_400).abs() < 1e-12);
        assert!((b_n(40).unwrap() - B_40).abs() < 1e-12);
        assert!(b_n(400).unwrap() > b_n(40).unwrap());
        assert!(b_n(2).is_err());
    }

    #[test]
    fn asymptotic_bayes_zero_offset_case() {
        // H = 0 and zeta quantile 0 collapse to sqrt(2/pi) b_n
        let t = asymptotic_critical_bayes(0.05, 400, 0.0, 0.0).unwrap();
        assert!((t.linear - SQRT_2_OVER_PI * B_400).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_bayes_entropy_shift() {
        // exponential prior (H = 1) exceeds uniform by sqrt(2/pi)/b_n
        let t0 = asymptotic_critical_bayes(0.05, 400, 0.0, 26.01).unwrap();
        let t1 = asymptotic_critical_bayes(0.05, 400, 1.0, 26.01).unwrap();
        assert!((t1.linear - t0.linear - SQRT_2_OVER_PI / B_400).abs() < 1e-12);
        // spot value: sqrt(2/pi) [b + 26.01/b] for the uniform prior
        assert!((t0.linear - SQRT_2_OVER_PI * (B_400 + 26.01 / B_400)).abs() < 1e-10);
    }

    #[test]
    fn bayes_single_channel_closed_form() {
        // P{xi^2/2 >= t} = erfc(sqrt(t)); solve for alpha = 0.05 by bisection
        let alpha = 0.05;
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if math::erfc(math::sqrt(mid)) > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi); // ~1.9207
        assert!((oracle - 1.9207294103).abs() < 1e-6);

        let prior = PriorVector::uniform(1).unwrap();
        let mc = mc_critical(TestKind::Bayes, &prior, alpha, 200_000, 11).unwrap();
        assert!(
            (mc.log_threshold - oracle).abs() < 0.04,
            "mc {} vs oracle {}",
            mc.log_threshold,
            oracle
        );
    }

    #[test]
    fn map_threshold_at_alpha_near_one_is_the_sample_min() {
        let prior = PriorVector::uniform(40).unwrap();
        let null = mc_null_statistics(TestKind::Map, &prior, 1000, 5);
        let r = mc_critical_from_null(&null, 0.9999, 40).unwrap();
        assert_eq!(r.log_threshold, null.min());
    }

    #[test]
    fn thresholds_decrease_in_alpha() {
        let prior = PriorVector::uniform(40).unwrap();
        for kind in [TestKind::Map, TestKind::Bayes] {
            let null = mc_null_statistics(kind, &prior, 100_000, 9);
            let t1 = mc_critical_from_null(&null, 0.01, 40).unwrap().log_threshold;
            let t5 = mc_critical_from_null(&null, 0.05, 40).unwrap().log_threshold;
            let t10 = mc_critical_from_null(&null, 0.10, 40).unwrap().log_threshold;
            assert!(t1 > t5 && t5 > t10);
        }
    }

    #[test]
    fn unstable_quantile_guard() {
        let prior = PriorVector::uniform(4).unwrap();
        assert!(matches!(
            mc_critical(TestKind::Map, &prior, 0.001, 1000, 1),
            Err(Error::UnstableQuantile { .. })
        ));
    }

    #[test]
    fn approx_error_is_deterministic() {
        let a = approx_error_map(0.05, 40, 5_000, 123).unwrap();
        let b = approx_error_map(0.05, 40, 5_000, 123).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn calibrated_level_is_achieved() {
        // MAP, uniform n = 40: calibrate then measure on fresh noise
        let prior = PriorVector::uniform(40).unwrap();
        let trials = 100_000u64;
        let r = mc_critical(TestKind::Map, &prior, 0.05, trials, 21).unwrap();
        let hits = (0..trials)
            .filter(|&t| null_statistic_trial(TestKind::Map, &prior, 22, t) >= r.log_threshold)
            .count();
        let achieved = hits as f64 / trials as f64;
        assert!((achieved - 0.05).abs() < 0.005, "achieved {achieved}");
    }
}
