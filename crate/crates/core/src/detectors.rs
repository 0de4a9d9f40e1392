//! MAP and Bayes test statistics and decision functions.
//!
//! Both statistics live in the log domain: the per-channel evidence
//! exp(Y_k^2 / (2 sigma^2)) overflows f64 well before the dimensions of
//! interest, and thresholding is order-preserving under log. The MAP
//! statistic is the maximum of log w_k + Y_k^2/(2 sigma^2); the Bayes
//! statistic is the log-sum-exp of the same terms.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::priors::PriorVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Map,
    Bayes,
}

/// Channel readings paired with the noise level.
#[derive(Debug, Clone)]
pub struct Observation {
    values: Vec<f64>,
    sigma: f64,
}

impl Observation {
    pub fn new(values: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain("noise level sigma must be positive"));
        }
        Ok(Observation { values, sigma })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestStatistic {
    pub log_value: f64,
    pub kind: TestKind,
    /// Maximizing channel (1-based), MAP only; ties broken by lowest index.
    pub argmax_channel: Option<u32>,
}

fn check_dims(y: &Observation, prior: &PriorVector) -> Result<()> {
    let expected = prior.truncation_index() as usize;
    if y.values.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: y.values.len() });
    }
    Ok(())
}

/// log max_k [ w_k exp(Y_k^2 / 2 sigma^2) ] with the maximizing channel.
pub fn map_statistic(y: &Observation, prior: &PriorVector) -> Result<TestStatistic> {
    check_dims(y, prior)?;
    let inv_two_sigma_sq = 1.0 / (2.0 * y.sigma * y.sigma);
    let mut best = f64::NEG_INFINITY;
    let mut best_channel = 0u32;
    for (channel, w) in prior.iter() {
        let v = y.values[(channel - 1) as usize];
        let term = math::ln(w) + v * v * inv_two_sigma_sq;
        if term > best {
            best = term;
            best_channel = channel;
        }
    }
    Ok(TestStatistic { log_value: best, kind: TestKind::Map, argmax_channel: Some(best_channel) })
}

/// log sum_k w_k exp(Y_k^2 / 2 sigma^2), via the max-shifted transform.
pub fn bayes_statistic(y: &Observation, prior: &PriorVector) -> Result<TestStatistic> {
    check_dims(y, prior)?;
    let inv_two_sigma_sq = 1.0 / (2.0 * y.sigma * y.sigma);
    // online log-sum-exp: track the running max and the shifted mass
    let mut m = f64::NEG_INFINITY;
    let mut d = 0.0;
    for (channel, w) in prior.iter() {
        let v = y.values[(channel - 1) as usize];
        let term = math::ln(w) + v * v * inv_two_sigma_sq;
        if term <= m {
            d += math::exp(term - m);
        } else {
            d = d * math::exp(m - term) + 1.0;
            m = term;
        }
    }
    Ok(TestStatistic { log_value: m + math::ln(d), kind: TestKind::Bayes, argmax_channel: None })
}

/// Decision function: 1 (accept the alternative) iff the log statistic
/// reaches the log threshold. The boundary is inclusive.
pub fn decide(stat: &TestStatistic, log_threshold: f64) -> u8 {
    u8::from(stat.log_value >= log_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::{discretize_prior, PriorShape, DEFAULT_TAIL_TOL};
    use crate::rng::RngStream;
    use alloc::vec;

    fn uniform40() -> PriorVector {
        PriorVector::uniform(40).unwrap()
    }

    #[test]
    fn map_all_zero_readings_ties_to_channel_one() {
        let y = Observation::new(vec![0.0; 40], 1.0).unwrap();
        let s = map_statistic(&y, &uniform40()).unwrap();
        assert!((s.log_value + (40.0f64).ln()).abs() < 1e-12);
        assert_eq!(s.argmax_channel, Some(1));
    }

    #[test]
    fn map_single_dominant_channel() {
        let j = 17usize;
        let mut values = vec![0.0; 40];
        values[j - 1] = 3.0;
        let y = Observation::new(values, 1.0).unwrap();
        let s = map_statistic(&y, &uniform40()).unwrap();
        assert!((s.log_value - (-(40.0f64).ln() + 4.5)).abs() < 1e-12);
        assert_eq!(s.argmax_channel, Some(j as u32));
    }

    #[test]
    fn bayes_zero_readings_is_log_one() {
        let y = Observation::new(vec![0.0; 40], 1.0).unwrap();
        let s = bayes_statistic(&y, &uniform40()).unwrap();
        assert!(s.log_value.abs() < 1e-12);
    }

    #[test]
    fn bayes_single_channel() {
        let prior = PriorVector::uniform(1).unwrap();
        let y = Observation::new(vec![2.0], 1.0).unwrap();
        let s = bayes_statistic(&y, &prior).unwrap();
        assert!((s.log_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn statistics_match_brute_force_on_random_input() {
        // brute force in the linear domain is safe at these magnitudes
        let shape = PriorShape::exponential(1.0).unwrap();
        let prior = discretize_prior(&shape, 400, DEFAULT_TAIL_TOL).unwrap();
        let mut rng = RngStream::new(2024, 0);
        let values: Vec<f64> =
            (0..prior.truncation_index()).map(|_| rng.next_gaussian()).collect();
        let y = Observation::new(values.clone(), 1.0).unwrap();

        let mut linear_max = 0.0f64;
        let mut linear_sum = 0.0f64;
        for (ch, w) in prior.iter() {
            let v = values[(ch - 1) as usize];
            let t = w * (v * v / 2.0).exp();
            linear_sum += t;
            linear_max = linear_max.max(t);
        }

        let m = map_statistic(&y, &prior).unwrap();
        let b = bayes_statistic(&y, &prior).unwrap();
        assert!((m.log_value - linear_max.ln()).abs() < 1e-12 * linear_max.ln().abs().max(1.0));
        let rel = ((b.log_value - linear_sum.ln()) / linear_sum.ln().abs().max(1.0)).abs();
        assert!(rel < 1e-12);
    }

    #[test]
    fn decide_boundary_is_inclusive() {
        let s = TestStatistic { log_value: 0.0, kind: TestKind::Bayes, argmax_channel: None };
        assert_eq!(decide(&s, 0.0), 1);
        let s = TestStatistic { log_value: -1.0, kind: TestKind::Bayes, argmax_channel: None };
        assert_eq!(decide(&s, 0.0), 0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let y = Observation::new(vec![0.0; 39], 1.0).unwrap();
        assert!(matches!(
            map_statistic(&y, &uniform40()),
            Err(Error::DimensionMismatch { expected: 40, got: 39 })
        ));
    }
}
