//! Parallel Monte-Carlo drivers.
//!
//! Every trial is a pure function of `(seed, trial_index)` through a
//! counter-based stream, so mapping trial indices across a thread pool and
//! collecting in index order reproduces the sequential output bit for bit,
//! whatever the worker count.

use chandet::detectors::TestKind;
use chandet::power::{PowerReport, SignalSpec};
use chandet::priors::PriorVector;
use chandet::stats::binomial_halfwidth;
use chandet::EmpiricalDistribution;
use rayon::prelude::*;

/// Install a global thread pool with the requested worker count. Call at
/// most once, before any parallel work; `None` keeps the rayon default.
pub fn init_workers(workers: Option<usize>) -> anyhow::Result<()> {
    if let Some(w) = workers {
        if w == 0 {
            anyhow::bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    Ok(())
}

/// Null-statistic sample, parallel twin of the sequential calibrator.
pub fn null_statistics(
    kind: TestKind,
    prior: &PriorVector,
    trials: u64,
    seed: u64,
) -> EmpiricalDistribution {
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| chandet::calibration::null_statistic_trial(kind, prior, seed, t))
        .collect();
    EmpiricalDistribution::from_samples(samples)
}

/// MAP and Bayes null statistics off one shared Gaussian stream per trial.
pub fn null_statistic_pairs(
    prior: &PriorVector,
    trials: u64,
    seed: u64,
) -> (EmpiricalDistribution, EmpiricalDistribution) {
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| chandet::calibration::null_statistic_pair_trial(prior, seed, t))
        .collect();
    let map: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let bayes: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    (EmpiricalDistribution::from_samples(map), EmpiricalDistribution::from_samples(bayes))
}

/// Sample of the limiting variable, parallel twin of `ZetaSampler::sample`.
pub fn zeta_samples(terms: u32, m: u64, seed: u64) -> EmpiricalDistribution {
    let samples: Vec<f64> =
        (0..m).into_par_iter().map(|i| chandet::zeta::zeta_draw(terms, seed, i)).collect();
    EmpiricalDistribution::from_samples(samples)
}

/// Parallel twin of `mc_second_kind`: signal trials on streams 0..trials,
/// fresh null trials on trials..2*trials.
pub fn second_kind(
    kind: TestKind,
    prior: &PriorVector,
    signal: SignalSpec,
    log_threshold: f64,
    alpha_target: f64,
    trials: u64,
    seed: u64,
) -> chandet::Result<PowerReport> {
    if trials < 1_000 {
        return Err(chandet::Error::Domain("second-kind estimation needs at least 1000 trials"));
    }
    if prior.weight_of(signal.channel).is_none() {
        return Err(chandet::Error::ZeroWeightChannel { channel: signal.channel });
    }
    let misses = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            chandet::power::signal_statistic_trial(kind, prior, &signal, seed, t) < log_threshold
        })
        .count();
    let beta = misses as f64 / trials as f64;
    let hits = (trials..2 * trials)
        .into_par_iter()
        .filter(|&t| {
            chandet::calibration::null_statistic_trial(kind, prior, seed, t) >= log_threshold
        })
        .count();
    Ok(PowerReport {
        test_kind: kind,
        alpha_target,
        alpha_achieved: hits as f64 / trials as f64,
        beta_estimates: vec![(signal, beta, binomial_halfwidth(beta, trials))],
        trials,
        seed,
    })
}
