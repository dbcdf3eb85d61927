//! Probability distributions used by the inventory model.
//!
//! Discrete families (logarithmic, Poisson, negative binomial, point mass)
//! live on the non-negative integers; continuous families (gamma, mixed
//! Erlang) on the positive reals. Every family can be fitted from a
//! [`MomentPair`] and exposes the partial expectation `E[(X - z)+]` that the
//! wait-time formulas are built from.
//!
//! Tabulated discrete families truncate their support at the `1 - 1e-12`
//! quantile. The truncation point is available through
//! [`NegativeBinomial::truncation_point`] for auditing.

mod compound;
mod gamma;
mod logarithmic;
mod mixed_erlang;
mod negbin;
mod normal;
mod point;
mod poisson;
pub mod quadrature;
mod residual;

pub use compound::{fit_logarithmic_compound, CompoundPoissonLogarithmic};
pub use gamma::{gamma_from_moments, Gamma};
pub use logarithmic::{logarithmic_pmf, Logarithmic};
pub use mixed_erlang::{mixed_erlang_from_moments, MixedErlang, DEFAULT_PHASE_CAP};
pub use negbin::{negbin_from_moments, NegativeBinomial};
pub use normal::{normal_loss, std_normal_cdf, std_normal_pdf, std_normal_sf};
pub use point::PointMass;
pub use poisson::{poisson_pmf, Poisson};
pub use residual::{residual_lifetime_moments, RawMoments, ResidualLifetimes};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper tail mass dropped when tabulating a discrete support.
pub const TRUNCATION_TAIL: f64 = 1e-12;

/// Mean and variance of a quantity (demand, lead time, wait time, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() || variance < 0.0 {
            return Err(Error::Domain(format!(
                "moment pair requires finite mean and variance >= 0, got ({mean}, {variance})"
            )));
        }
        Ok(Self { mean, variance })
    }

    /// Unchecked constructor for values known to be valid.
    pub const fn raw(mean: f64, variance: f64) -> Self {
        Self { mean, variance }
    }

    pub const fn zero() -> Self {
        Self { mean: 0.0, variance: 0.0 }
    }

    pub fn sd(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }

    pub fn second_moment(&self) -> f64 {
        self.variance + self.mean * self.mean
    }

    /// Squared coefficient of variation.
    pub fn scv(&self) -> f64 {
        self.variance / (self.mean * self.mean)
    }

    /// Moments of `X / unit`.
    pub fn in_units_of(&self, unit: f64) -> Self {
        Self { mean: self.mean / unit, variance: self.variance / (unit * unit) }
    }

    /// Moments of the sum of two independent quantities.
    pub fn plus_independent(&self, other: &MomentPair) -> Self {
        Self { mean: self.mean + other.mean, variance: self.variance + other.variance }
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { mean: self.mean + offset, variance: self.variance }
    }
}

/// A distribution on the non-negative integers.
pub trait DiscreteDistribution: Send + Sync {
    fn pmf(&self, k: i64) -> f64;
    fn cdf(&self, k: i64) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;

    /// `E[(X - z)+]` for integer `z`.
    ///
    /// Uses `E[X] - sum_{x<=z} x f(x) - z (1 - F(z))`, valid for `z >= 0`;
    /// for negative `z` the positive part is the identity and the result is
    /// `E[X] - z`.
    fn partial_expectation(&self, z: i64) -> f64 {
        if z < 0 {
            return self.mean() - z as f64;
        }
        let mut head = 0.0;
        let mut cdf = 0.0;
        for x in 0..=z {
            let f = self.pmf(x);
            head += x as f64 * f;
            cdf += f;
        }
        (self.mean() - head - z as f64 * (1.0 - cdf)).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> u64;
}

/// A distribution on the (non-negative) reals.
pub trait ContinuousDistribution: Send + Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
    /// `E[(X - z)+]`.
    fn partial_expectation(&self, z: f64) -> f64;
    fn sample(&self, rng: &mut dyn RngCore) -> f64;
}

/// `E[(X - z)+]` for an integer-valued `X` and real `z`, by linear
/// interpolation between the integer neighbours (exact for integer support).
pub fn partial_expectation_real<D: DiscreteDistribution + ?Sized>(d: &D, z: f64) -> f64 {
    let lo = z.floor();
    let frac = z - lo;
    let at_lo = d.partial_expectation(lo as i64);
    if frac == 0.0 {
        return at_lo;
    }
    // Between integers the function is linear with slope -P(X > lo).
    let tail = 1.0 - d.cdf(lo as i64);
    (at_lo - frac * tail).max(0.0)
}

/// `E[(X - z)+]` for an integer-valued `X` and integer `z`, via the
/// partial-sum identity. Alias kept for callers that prefer a free function.
pub fn partial_expectation_discrete<D: DiscreteDistribution + ?Sized>(d: &D, z: i64) -> f64 {
    d.partial_expectation(z)
}

pub(crate) fn uniform01(rng: &mut dyn RngCore) -> f64 {
    // 53 random bits mapped onto [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
