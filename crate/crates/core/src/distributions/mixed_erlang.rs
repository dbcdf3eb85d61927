use rand::RngCore;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::{uniform01, ContinuousDistribution, MomentPair};
use crate::error::{Error, Result};

/// Default cap on the number of Erlang phases.
pub const DEFAULT_PHASE_CAP: u64 = 10_000;

/// Two-moment phase-type fit.
///
/// For a squared coefficient of variation `c2 <= 1` this is the mixture of
/// Erlang(k-1) and Erlang(k) with a common rate, where `1/k <= c2 <= 1/(k-1)`.
/// For `c2 > 1` a two-phase hyperexponential with balanced means is used.
#[derive(Debug, Clone, PartialEq)]
pub enum MixedErlang {
    /// With probability `p` Erlang(`k - 1`, `rate`), otherwise Erlang(`k`, `rate`).
    Erlang { k: u64, p: f64, rate: f64 },
    /// With probability `p` Exp(`rate1`), otherwise Exp(`rate2`).
    Hyperexponential { p: f64, rate1: f64, rate2: f64 },
}

/// Fits the mixed Erlang / hyperexponential family to `m`.
///
/// Fails with [`Error::NumericalInstability`] when the required number of
/// phases exceeds `phase_cap`.
pub fn mixed_erlang_from_moments(m: MomentPair, phase_cap: u64) -> Result<MixedErlang> {
    if !(m.mean > 0.0) || !m.mean.is_finite() || m.variance < 0.0 {
        return Err(Error::Domain(format!(
            "mixed Erlang fit needs mean > 0 and var >= 0, got ({}, {})",
            m.mean, m.variance
        )));
    }
    let c2 = m.scv();
    if c2 > 1.0 {
        let p = 0.5 * (1.0 + ((c2 - 1.0) / (c2 + 1.0)).sqrt());
        return Ok(MixedErlang::Hyperexponential {
            p,
            rate1: 2.0 * p / m.mean,
            rate2: 2.0 * (1.0 - p) / m.mean,
        });
    }
    let k_real = (1.0 / c2).ceil();
    if !k_real.is_finite() || k_real > phase_cap as f64 {
        return Err(Error::NumericalInstability(format!(
            "squared coefficient of variation {c2:e} needs {k_real} Erlang phases (cap {phase_cap})"
        )));
    }
    let k = (k_real as u64).max(1);
    let kf = k as f64;
    let disc = (kf * (1.0 + c2) - kf * kf * c2).max(0.0);
    let p = ((kf * c2 - disc.sqrt()) / (1.0 + c2)).clamp(0.0, 1.0);
    let rate = (kf - p) / m.mean;
    Ok(MixedErlang::Erlang { k, p, rate })
}

/// `P(Erlang(n, rate) > z)`.
fn erlang_sf(n: u64, rate: f64, z: f64) -> f64 {
    if n == 0 {
        return if z < 0.0 { 1.0 } else { 0.0 };
    }
    if z <= 0.0 {
        return 1.0;
    }
    gamma_ur(n as f64, rate * z)
}

/// `E[(Erlang(n, rate) - z)+]`.
fn erlang_partial_expectation(n: u64, rate: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return n as f64 / rate - z;
    }
    if n == 0 {
        return 0.0;
    }
    (n as f64 / rate * erlang_sf(n + 1, rate, z) - z * erlang_sf(n, rate, z)).max(0.0)
}

fn erlang_pdf(n: u64, rate: f64, x: f64) -> f64 {
    if n == 0 || x <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * rate.ln() + (nf - 1.0) * x.ln() - rate * x - ln_gamma(nf)).exp()
}

impl MixedErlang {
    /// Number of Erlang phases of the larger component (1 for hyperexponential).
    pub fn phases(&self) -> u64 {
        match self {
            MixedErlang::Erlang { k, .. } => *k,
            MixedErlang::Hyperexponential { .. } => 1,
        }
    }

    /// `E[X^n]` for `n <= 2`.
    pub fn raw_moment(&self, n: u32) -> f64 {
        match *self {
            MixedErlang::Erlang { k, p, rate } => {
                let m = |j: f64| (0..n).fold(1.0, |acc, i| acc * (j + i as f64)) / rate.powi(n as i32);
                p * m(k as f64 - 1.0) + (1.0 - p) * m(k as f64)
            }
            MixedErlang::Hyperexponential { p, rate1, rate2 } => {
                let fact = (1..=n).product::<u32>() as f64;
                fact * (p / rate1.powi(n as i32) + (1.0 - p) / rate2.powi(n as i32))
            }
        }
    }
}

impl ContinuousDistribution for MixedErlang {
    fn pdf(&self, x: f64) -> f64 {
        match *self {
            MixedErlang::Erlang { k, p, rate } => {
                p * erlang_pdf(k - 1, rate, x) + (1.0 - p) * erlang_pdf(k, rate, x)
            }
            MixedErlang::Hyperexponential { p, rate1, rate2 } => {
                if x < 0.0 {
                    0.0
                } else {
                    p * rate1 * (-rate1 * x).exp() + (1.0 - p) * rate2 * (-rate2 * x).exp()
                }
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match *self {
            MixedErlang::Erlang { k, p, rate } => {
                1.0 - p * erlang_sf(k - 1, rate, x) - (1.0 - p) * erlang_sf(k, rate, x)
            }
            MixedErlang::Hyperexponential { p, rate1, rate2 } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - p * (-rate1 * x).exp() - (1.0 - p) * (-rate2 * x).exp()
                }
            }
        }
    }

    fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    fn variance(&self) -> f64 {
        let m = self.raw_moment(1);
        self.raw_moment(2) - m * m
    }

    fn partial_expectation(&self, z: f64) -> f64 {
        match *self {
            MixedErlang::Erlang { k, p, rate } => {
                p * erlang_partial_expectation(k - 1, rate, z)
                    + (1.0 - p) * erlang_partial_expectation(k, rate, z)
            }
            MixedErlang::Hyperexponential { p, rate1, rate2 } => {
                if z <= 0.0 {
                    return self.mean() - z;
                }
                p * (-rate1 * z).exp() / rate1 + (1.0 - p) * (-rate2 * z).exp() / rate2
            }
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let exp = |rng: &mut dyn RngCore, rate: f64| -(1.0 - uniform01(rng)).ln() / rate;
        match *self {
            MixedErlang::Erlang { k, p, rate } => {
                let n = if uniform01(rng) < p { k - 1 } else { k };
                (0..n).map(|_| exp(rng, rate)).sum()
            }
            MixedErlang::Hyperexponential { p, rate1, rate2 } => {
                if uniform01(rng) < p {
                    exp(rng, rate1)
                } else {
                    exp(rng, rate2)
                }
            }
        }
    }
}
