//! Observation generators for both hypotheses.
//!
//! Each trial consumes exactly one counter-based stream keyed by
//! `(seed, trial)`, so regenerated observations are bit-identical for any
//! worker count or trial order. Under the alternative the signal channel is
//! drawn first (by inverse transform on the prior weights), then the noise
//! vector, so the noise draws align with the null generator given the same
//! stream.

use alloc::vec::Vec;

use crate::detectors::Observation;
use crate::error::{Error, Result};
use crate::power::SignalSpec;
use crate::priors::PriorVector;
use crate::rng::RngStream;

/// Noise-only observation: truncation_index independent N(0, sigma^2) draws.
pub fn sample_h0(prior: &PriorVector, sigma: f64, seed: u64, trial: u64) -> Result<Observation> {
    let mut rng = RngStream::new(seed, trial);
    let values = noise_vector(&mut rng, prior, sigma);
    Observation::new(values, sigma)
}

/// Observation with a fixed signal added in its channel.
pub fn sample_h1(
    prior: &PriorVector,
    signal: &SignalSpec,
    seed: u64,
    trial: u64,
) -> Result<Observation> {
    if prior.weight_of(signal.channel).is_none() {
        return Err(Error::ZeroWeightChannel { channel: signal.channel });
    }
    let mut rng = RngStream::new(seed, trial);
    let mut values = noise_vector(&mut rng, prior, signal.sigma);
    values[(signal.channel - 1) as usize] += signal.amplitude;
    Observation::new(values, signal.sigma)
}

/// Observation with the signal channel itself random, drawn from the prior
/// weights by inverse transform; the amplitude placed there comes from the
/// supplied per-channel rule. Returns the drawn channel alongside.
pub fn sample_h1_random_channel<F: Fn(u32) -> f64>(
    prior: &PriorVector,
    amplitude_rule: F,
    sigma: f64,
    seed: u64,
    trial: u64,
) -> Result<(Observation, u32)> {
    let mut rng = RngStream::new(seed, trial);
    let channel = draw_channel(&mut rng, prior);
    let amplitude = amplitude_rule(channel);
    if !amplitude.is_finite() {
        return Err(Error::Domain("amplitude rule must be finite on the prior support"));
    }
    let mut values = noise_vector(&mut rng, prior, sigma);
    values[(channel - 1) as usize] += amplitude;
    Ok((Observation::new(values, sigma)?, channel))
}

/// Inverse-transform draw of a channel from the prior weights. The weights
/// sum to one by construction; the final channel absorbs rounding slack.
pub fn draw_channel(rng: &mut RngStream, prior: &PriorVector) -> u32 {
    let u = rng.next_uniform();
    let mut acc = 0.0;
    let mut last = 1u32;
    for (channel, w) in prior.iter() {
        acc += w;
        last = channel;
        if u <= acc {
            return channel;
        }
    }
    last
}

fn noise_vector(rng: &mut RngStream, prior: &PriorVector, sigma: f64) -> Vec<f64> {
    let len = prior.truncation_index() as usize;
    let mut values = alloc::vec![0.0; len];
    for (channel, _) in prior.iter() {
        values[(channel - 1) as usize] = sigma * rng.next_gaussian();
    }
    values
}
