//! Detection of a signal of unknown energy hidden in one of many Gaussian
//! channels, under a small non-uniform prior on the channel index.
//!
//! The crate provides:
//! * prior discretization onto `n` channels with entropy diagnostics
//!   ([`priors`]);
//! * the MAP and Bayes log-domain test statistics and decision rules
//!   ([`detectors`]);
//! * Monte-Carlo and closed-form asymptotic threshold calibration for a
//!   target false-alarm level ([`calibration`]);
//! * the heavy-tailed limiting variable of the normalized Bayes null
//!   statistic, its sampler, quantiles, and stability combination
//!   ([`zeta`]);
//! * second-kind-error estimation and the per-channel boxes of
//!   non-detectable signal amplitudes ([`power`]);
//! * deterministic observation generators under both hypotheses
//!   ([`simulate`]);
//! * independent oracles for the asymptotics the calibrators rely on
//!   ([`checks`]).
//!
//! All randomness flows through counter-based streams keyed by
//! `(seed, stream)`, so every Monte-Carlo result is bit-identical across
//! runs, trial orders, and worker counts. The crate is `no_std`-compatible
//! (with `alloc`); disable the default `std` feature to build without the
//! standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod calibration;
pub mod checks;
pub mod detectors;
pub mod error;
pub(crate) mod math;
pub mod power;
pub mod priors;
pub mod quad;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod zeta;

pub use calibration::{
    asymptotic_critical_bayes, asymptotic_critical_map, b_n, mc_critical, CalibrationResult,
    Method,
};
pub use detectors::{bayes_statistic, decide, map_statistic, Observation, TestKind, TestStatistic};
pub use error::{Error, Result};
pub use power::{mc_second_kind, PowerReport, SignalSpec};
pub use priors::{discretize_prior, PriorShape, PriorVector};
pub use rng::RngStream;
pub use stats::EmpiricalDistribution;
pub use zeta::{zeta_quantile, ZetaSampler};
