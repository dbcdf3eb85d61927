use serde::{Deserialize, Serialize};

use crate::distributions::{
    gamma_from_moments, negbin_from_moments, ContinuousDistribution, DiscreteDistribution, Gamma, MomentPair,
    NegativeBinomial, TRUNCATION_TAIL,
};

use super::params::{EffectiveLeadTime, WarehouseParams};

/// Which branch of the selection rule produced a lead-time-demand model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LtdFamily {
    NegativeBinomial,
    Gamma,
    /// Zero variance: all mass at the mean.
    Degenerate,
}

/// A fitted lead-time demand.
///
/// A gamma fit is read at integer points without continuity correction.
#[derive(Debug, Clone)]
pub enum LtdDistribution {
    NegBin(NegativeBinomial),
    Gamma(Gamma),
    Degenerate(f64),
}

/// Negative binomial if `var > mean`, gamma otherwise. A zero variance (or
/// zero mean) has no gamma fit and yields a point mass.
pub fn select_ltd_distribution(m: MomentPair) -> LtdDistribution {
    if m.mean > 0.0 && m.variance > m.mean {
        if let Ok(nb) = negbin_from_moments(m) {
            return LtdDistribution::NegBin(nb);
        }
    }
    if m.mean > 0.0 && m.variance > 0.0 {
        if let Ok(g) = gamma_from_moments(m) {
            return LtdDistribution::Gamma(g);
        }
    }
    LtdDistribution::Degenerate(m.mean.max(0.0))
}

/// `E[D] = mu E[L]`, `Var[D] = sigma^2 E[L] + mu^2 Var[L]`.
pub fn lead_time_demand_local(w: &WarehouseParams, eff: &EffectiveLeadTime) -> MomentPair {
    let d = w.daily_demand();
    let l = eff.effective;
    MomentPair::raw(d.mean * l.mean, d.variance * l.mean + d.mean * d.mean * l.variance)
}

impl LtdDistribution {
    pub fn family(&self) -> LtdFamily {
        match self {
            LtdDistribution::NegBin(_) => LtdFamily::NegativeBinomial,
            LtdDistribution::Gamma(_) => LtdFamily::Gamma,
            LtdDistribution::Degenerate(_) => LtdFamily::Degenerate,
        }
    }

    /// `P(D <= x)` at an integer point.
    pub fn cdf(&self, x: i64) -> f64 {
        match self {
            LtdDistribution::NegBin(d) => d.cdf(x),
            LtdDistribution::Gamma(g) => g.cdf(x as f64),
            LtdDistribution::Degenerate(c) => {
                if x as f64 >= *c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            LtdDistribution::NegBin(d) => d.mean(),
            LtdDistribution::Gamma(g) => g.mean(),
            LtdDistribution::Degenerate(c) => *c,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            LtdDistribution::NegBin(d) => d.variance(),
            LtdDistribution::Gamma(g) => g.variance(),
            LtdDistribution::Degenerate(_) => 0.0,
        }
    }

    /// `E[(D - z)+]`.
    pub fn partial_expectation(&self, z: f64) -> f64 {
        match self {
            LtdDistribution::NegBin(d) => crate::distributions::partial_expectation_real(d, z),
            LtdDistribution::Gamma(g) => g.partial_expectation(z),
            LtdDistribution::Degenerate(c) => (c - z).max(0.0),
        }
    }

    /// Smallest integer `x >= 0` with `P(D <= x) >= 1 - 1e-12`.
    pub fn upper_support(&self) -> i64 {
        match self {
            LtdDistribution::NegBin(d) => d.truncation_point(),
            LtdDistribution::Gamma(g) => g.quantile(1.0 - TRUNCATION_TAIL).ceil().max(0.0) as i64,
            LtdDistribution::Degenerate(c) => c.ceil() as i64,
        }
    }
}

/// `S(m) = sum_{x=0}^{m} P(D <= x)`, tabulated up to the upper support and
/// extended linearly (with `P = 1`) beyond it.
#[derive(Debug, Clone)]
pub struct CdfPrefix {
    prefix: Vec<f64>,
}

impl CdfPrefix {
    pub fn new(ltd: &LtdDistribution) -> Self {
        let top = ltd.upper_support().max(0) as usize;
        let mut prefix = Vec::with_capacity(top + 1);
        let mut acc = 0.0;
        for x in 0..=top {
            acc += ltd.cdf(x as i64);
            prefix.push(acc);
        }
        Self { prefix }
    }

    pub fn sum_to(&self, m: i64) -> f64 {
        if m < 0 {
            return 0.0;
        }
        let last = self.prefix.len() - 1;
        let mu = m as usize;
        if mu <= last {
            self.prefix[mu]
        } else {
            self.prefix[last] + (mu - last) as f64
        }
    }

    /// `sum_{x=a}^{b} P(D <= x)`.
    pub fn sum_between(&self, a: i64, b: i64) -> f64 {
        if b < a {
            0.0
        } else {
            self.sum_to(b) - self.sum_to(a - 1)
        }
    }
}
