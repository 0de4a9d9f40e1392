//! Channel prior construction.
//!
//! A continuous shape density on the positive half-line is sampled on the
//! grid k/n and renormalized into a vector of channel probabilities of order
//! 1/n. The support is truncated where the relative raw tail mass drops
//! below a configurable tolerance; channels whose grid density is exactly
//! zero are dropped so nothing downstream ever takes log(0).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::quad;

/// Tolerance on the shape normalization check.
pub const SHAPE_NORMALIZATION_TOL: f64 = 1e-9;
/// Absolute tolerance of the entropy quadrature.
pub const ENTROPY_TOL: f64 = 1e-8;
/// Default relative tail mass permitted to be truncated away.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

const TRUNCATION_ITER_CAP: u64 = 100_000_000;

/// Continuous prior shape on the positive half-line.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// Constant density 1/(b-a) on [a, b].
    Uniform { a: f64, b: f64 },
    /// Density rate * exp(-rate * x) on [0, inf).
    Exponential { rate: f64 },
    /// Triangular density on [a, b] with mode c.
    Triangular { a: f64, b: f64, c: f64 },
    /// Piecewise-linear density through (x, density) nodes; zero outside.
    Tabulated { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorShape {
    kind: ShapeKind,
}

impl PriorShape {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain("uniform shape needs 0 <= a < b"));
        }
        Ok(PriorShape { kind: ShapeKind::Uniform { a, b } })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain("exponential shape needs rate > 0"));
        }
        Ok(PriorShape { kind: ShapeKind::Exponential { rate } })
    }

    /// Triangular shape on [a, b] with mode c, a <= c <= b.
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && c >= a && c <= b) {
            return Err(Error::Domain("triangular shape needs 0 <= a <= c <= b, a < b"));
        }
        Ok(PriorShape { kind: ShapeKind::Triangular { a, b, c } })
    }

    /// Tabulated density; errors unless it integrates to 1 within tolerance.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let shape = Self::tabulated_raw(points)?;
        let integral = shape.normalization()?;
        if math::abs(integral - 1.0) > SHAPE_NORMALIZATION_TOL {
            return Err(Error::InvalidShape { integral });
        }
        Ok(shape)
    }

    /// Tabulated density rescaled so it integrates to 1.
    pub fn tabulated_normalized(points: Vec<(f64, f64)>) -> Result<Self> {
        let shape = Self::tabulated_raw(points)?;
        let integral = shape.normalization()?;
        if !(integral > 0.0 && integral.is_finite()) {
            return Err(Error::InvalidShape { integral });
        }
        let ShapeKind::Tabulated { points } = shape.kind else { unreachable!() };
        let scaled = points.into_iter().map(|(x, d)| (x, d / integral)).collect();
        Ok(PriorShape { kind: ShapeKind::Tabulated { points: scaled } })
    }

    fn tabulated_raw(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("tabulated shape needs at least two nodes"));
        }
        let monotone = points.windows(2).all(|w| w[0].0 < w[1].0);
        let valid = points.iter().all(|&(x, d)| x >= 0.0 && d >= 0.0 && x.is_finite() && d.is_finite());
        if !monotone || !valid {
            return Err(Error::Domain("tabulated nodes must be sorted with nonnegative values"));
        }
        Ok(PriorShape { kind: ShapeKind::Tabulated { points } })
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    /// Density at x; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            ShapeKind::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            ShapeKind::Exponential { rate } => {
                if x >= 0.0 {
                    rate * math::exp(-rate * x)
                } else {
                    0.0
                }
            }
            ShapeKind::Triangular { a, b, c } => {
                if x < *a || x > *b {
                    0.0
                } else if x < *c {
                    2.0 * (x - a) / ((b - a) * (c - a))
                } else if x > *c {
                    2.0 * (b - x) / ((b - a) * (b - c))
                } else {
                    2.0 / (b - a)
                }
            }
            ShapeKind::Tabulated { points } => {
                let first = points[0].0;
                let last = points[points.len() - 1].0;
                if x < first || x > last {
                    return 0.0;
                }
                let idx = points.partition_point(|&(px, _)| px <= x);
                if idx == 0 {
                    return points[0].1;
                }
                if idx == points.len() {
                    return points[points.len() - 1].1;
                }
                let (x0, d0) = points[idx - 1];
                let (x1, d1) = points[idx];
                d0 + (d1 - d0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Support as (lower, upper); `None` upper means +infinity.
    pub fn support(&self) -> (f64, Option<f64>) {
        match &self.kind {
            ShapeKind::Uniform { a, b } => (*a, Some(*b)),
            ShapeKind::Exponential { .. } => (0.0, None),
            ShapeKind::Triangular { a, b, .. } => (*a, Some(*b)),
            ShapeKind::Tabulated { points } => (points[0].0, Some(points[points.len() - 1].0)),
        }
    }

    /// Upper bound on the density.
    pub fn sup_bound(&self) -> f64 {
        match &self.kind {
            ShapeKind::Uniform { a, b } => 1.0 / (b - a),
            ShapeKind::Exponential { rate } => *rate,
            ShapeKind::Triangular { a, b, .. } => 2.0 / (b - a),
            ShapeKind::Tabulated { points } => points.iter().fold(0.0, |m, &(_, d)| m.max(d)),
        }
    }

    /// Integral of the density over its support.
    pub fn normalization(&self) -> Result<f64> {
        let (lo, hi) = self.support();
        match hi {
            Some(hi) => quad::integrate(|x| self.density(x), lo, hi, SHAPE_NORMALIZATION_TOL / 10.0),
            None => quad::integrate_half_line(|x| self.density(x), lo, SHAPE_NORMALIZATION_TOL / 10.0),
        }
    }

    /// Errors unless the shape integrates to 1 within tolerance.
    pub fn validate(&self) -> Result<()> {
        let integral = self.normalization()?;
        if math::abs(integral - 1.0) > SHAPE_NORMALIZATION_TOL {
            return Err(Error::InvalidShape { integral });
        }
        Ok(())
    }

    /// Raw shape mass on the grid strictly beyond index k, i.e. sum over j > k
    /// of density(j/n). Exact for finite supports, geometric-series bound for
    /// the exponential tail.
    fn raw_grid_tail(&self, k: u64, n: u32) -> f64 {
        match &self.kind {
            ShapeKind::Exponential { rate } => {
                let step = rate / n as f64;
                rate * math::exp(-step * (k + 1) as f64) / (1.0 - math::exp(-step))
            }
            _ => {
                let (_, hi) = self.support();
                let hi = hi.expect("finite support");
                if (k + 1) as f64 / n as f64 > hi {
                    0.0
                } else {
                    f64::INFINITY // still inside the support; keep iterating
                }
            }
        }
    }
}

/// Normalized channel probabilities on the grid k/n.
///
/// `channels[i]` is the 1-based grid index carrying `weights[i]`; grid points
/// with zero density inside the support are dropped. `truncation_index` is
/// the grid cutoff K, so paired observations carry K readings.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    weights: Vec<f64>,
    channels: Vec<u32>,
    n: u32,
    truncation_index: u32,
    truncated_mass: f64,
}

impl PriorVector {
    /// Uniform prior over channels 1..=n.
    pub fn uniform(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("effective dimension n must be positive"));
        }
        let w = 1.0 / n as f64;
        Ok(PriorVector {
            weights: alloc::vec![w; n as usize],
            channels: (1..=n).collect(),
            n,
            truncation_index: n,
            truncated_mass: 0.0,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn channels(&self) -> &[u32] {
        &self.channels
    }

    /// Number of positive-weight channels.
    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn truncation_index(&self) -> u32 {
        self.truncation_index
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Weight of a 1-based channel, `None` if outside the positive support.
    pub fn weight_of(&self, channel: u32) -> Option<f64> {
        self.channels
            .binary_search(&channel)
            .ok()
            .map(|i| self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.channels.iter().copied().zip(self.weights.iter().copied())
    }
}

#[inline]
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0, 0.0);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Discretize a continuous shape onto the grid k/n (Bayes-prior convention:
/// weight k proportional to density(k/n)), truncating where the relative raw
/// tail mass falls below `tail_tol`.
pub fn discretize_prior(shape: &PriorShape, n: u32, tail_tol: f64) -> Result<PriorVector> {
    if n == 0 {
        return Err(Error::Domain("effective dimension n must be positive"));
    }
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain("tail tolerance must be in (0, 1e-6]"));
    }
    shape.validate()?;

    let mut raw: Vec<(u32, f64)> = Vec::new();
    let mut running = 0.0;
    let mut k: u64 = 0;
    let tail = loop {
        k += 1;
        if k > TRUNCATION_ITER_CAP || k > u32::MAX as u64 {
            return Err(Error::DivergentTail);
        }
        let x = k as f64 / n as f64;
        let v = shape.density(x);
        if v > 0.0 {
            raw.push((k as u32, v));
            running += v;
        }
        let tail = shape.raw_grid_tail(k, n);
        if tail <= tail_tol * running {
            break tail;
        }
    };
    if raw.is_empty() {
        return Err(Error::Domain("shape has no mass on the grid k/n"));
    }

    let truncation_index = k as u32;
    let sum = kahan_sum(raw.iter().map(|&(_, v)| v));
    let mut channels = Vec::with_capacity(raw.len());
    let mut weights = Vec::with_capacity(raw.len());
    for (ch, v) in raw {
        channels.push(ch);
        weights.push(v / sum);
    }
    // one renormalization pass to absorb the division rounding
    let post = kahan_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= post;
    }

    Ok(PriorVector {
        weights,
        channels,
        n,
        truncation_index,
        truncated_mass: tail / (sum + tail),
    })
}

/// Differential entropy H of a shape, by adaptive quadrature.
pub fn continuous_entropy(shape: &PriorShape) -> Result<f64> {
    shape.validate()?;
    let integrand = |x: f64| {
        let p = shape.density(x);
        if p > 0.0 {
            -p * math::ln(p)
        } else {
            0.0
        }
    };
    let (lo, hi) = shape.support();
    let res = match hi {
        Some(hi) => quad::integrate(integrand, lo, hi, ENTROPY_TOL),
        None => quad::integrate_half_line(integrand, lo, ENTROPY_TOL),
    };
    res.map_err(|_| Error::EntropyDivergence)
}

/// Discrete entropy of the prior vector minus log(n); converges to the
/// continuous entropy as n grows.
pub fn discrete_entropy_offset(prior: &PriorVector) -> f64 {
    let h = kahan_sum(prior.weights().iter().map(|&w| -w * math::ln(w)));
    h - math::ln(prior.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_n40_has_equal_weights() {
        let shape = PriorShape::uniform(0.0, 1.0).unwrap();
        let p = discretize_prior(&shape, 40, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(p.support_len(), 40);
        assert_eq!(p.truncation_index(), 40);
        for &w in p.weights() {
            assert!((w - 1.0 / 40.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_prior_n1_is_degenerate() {
        let shape = PriorShape::uniform(0.0, 1.0).unwrap();
        let p = discretize_prior(&shape, 1, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(p.weights(), &[1.0]);
        assert_eq!(p.channels(), &[1]);
    }

    #[test]
    fn exponential_prior_matches_geometric_oracle() {
        let n = 100u32;
        let tol = 1e-12;
        let shape = PriorShape::exponential(1.0).unwrap();
        let p = discretize_prior(&shape, n, tol).unwrap();

        // independent oracle: geometric series r = exp(-1/n)
        let r: f64 = (-1.0 / n as f64).exp();
        let mut oracle_k = 0u32;
        let mut retained = 0.0;
        loop {
            oracle_k += 1;
            retained += r.powi(oracle_k as i32);
            let tail = r.powi(oracle_k as i32 + 1) / (1.0 - r);
            if tail <= tol * retained {
                break;
            }
        }
        assert_eq!(p.truncation_index(), oracle_k);

        let sum: f64 = p.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        // weights proportional to exp(-k/100)
        let w0 = p.weights()[0];
        for (i, (ch, w)) in p.iter().enumerate() {
            assert_eq!(ch, i as u32 + 1);
            let expect = w0 * ((-(ch as f64 - 1.0) / n as f64).exp());
            assert!((w - expect).abs() < 1e-12 * expect.max(1.0));
        }
        assert!(p.truncated_mass() <= tol);
    }

    #[test]
    fn normalization_within_1e12_for_large_supports() {
        let shape = PriorShape::exponential(0.5).unwrap();
        for n in [10u32, 100, 1000, 5000] {
            let p = discretize_prior(&shape, n, DEFAULT_TAIL_TOL).unwrap();
            let sum = kahan_sum(p.weights().iter().copied());
            assert!((sum - 1.0).abs() < 1e-12, "n={n}: sum off by {}", sum - 1.0);
        }
    }

    #[test]
    fn continuous_entropy_uniform_unit() {
        let shape = PriorShape::uniform(0.0, 1.0).unwrap();
        assert!(continuous_entropy(&shape).unwrap().abs() < 1e-8);
    }

    #[test]
    fn continuous_entropy_uniform_doubled() {
        let shape = PriorShape::uniform(0.0, 2.0).unwrap();
        let h = continuous_entropy(&shape).unwrap();
        assert!((h - core::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn continuous_entropy_exponential_is_one() {
        // closed-form oracle: integral of x * exp(-x) over [0, inf) = 1
        let shape = PriorShape::exponential(1.0).unwrap();
        let h = continuous_entropy(&shape).unwrap();
        assert!((h - 1.0).abs() < 1e-7);
    }

    #[test]
    fn entropy_offset_uniform_is_zero() {
        for n in [40u32, 400] {
            let p = PriorVector::uniform(n).unwrap();
            assert!(discrete_entropy_offset(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_offset_exponential_converges() {
        let shape = PriorShape::exponential(1.0).unwrap();
        let p = discretize_prior(&shape, 400, DEFAULT_TAIL_TOL).unwrap();
        assert!((discrete_entropy_offset(&p) - 1.0).abs() < 0.02);
    }

    #[test]
    fn discretization_consistency_at_n1000() {
        for shape in [
            PriorShape::uniform(0.0, 1.0).unwrap(),
            PriorShape::exponential(1.0).unwrap(),
        ] {
            let h_cont = continuous_entropy(&shape).unwrap();
            let p = discretize_prior(&shape, 1000, DEFAULT_TAIL_TOL).unwrap();
            assert!((discrete_entropy_offset(&p) - h_cont).abs() < 0.05);
        }
    }

    #[test]
    fn scale_free_weights() {
        // tabulated triangle vs the same nodes scaled by 7, renormalized
        let nodes: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let x = i as f64 / 10.0;
                (x, if x < 1.0 { x } else { 2.0 - x })
            })
            .collect();
        let scaled: Vec<(f64, f64)> = nodes.iter().map(|&(x, d)| (x, 7.0 * d)).collect();
        let a = PriorShape::tabulated_normalized(nodes).unwrap();
        let b = PriorShape::tabulated_normalized(scaled).unwrap();
        let pa = discretize_prior(&a, 50, DEFAULT_TAIL_TOL).unwrap();
        let pb = discretize_prior(&b, 50, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(pa.channels(), pb.channels());
        for (wa, wb) in pa.weights().iter().zip(pb.weights()) {
            assert!((wa - wb).abs() < 1e-14);
        }
    }

    #[test]
    fn unnormalized_tabulated_is_rejected() {
        let nodes = alloc::vec![(0.0, 2.0), (1.0, 2.0)];
        match PriorShape::tabulated(nodes) {
            Err(Error::InvalidShape { integral }) => assert!((integral - 2.0).abs() < 1e-6),
            other => panic!("expected InvalidShape, got {other:?}"),
        }
    }

    #[test]
    fn triangular_drops_zero_density_endpoints() {
        let shape = PriorShape::triangular(0.0, 1.0, 0.5).unwrap();
        let p = discretize_prior(&shape, 10, DEFAULT_TAIL_TOL).unwrap();
        // x = 10/10 = 1.0 has zero density: kept in the grid, dropped from weights
        assert_eq!(p.truncation_index(), 10);
        assert_eq!(p.channels().last(), Some(&9));
        assert!(p.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn bad_tail_tol_rejected() {
        let shape = PriorShape::uniform(0.0, 1.0).unwrap();
        assert!(discretize_prior(&shape, 10, 1e-3).is_err());
        assert!(discretize_prior(&shape, 10, 0.0).is_err());
    }
}
