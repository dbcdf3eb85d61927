use rand::Rng;

use super::{Logarithmic, MomentPair, Poisson};
use crate::error::{Error, Result};

/// Daily demand as a compound Poisson process with logarithmic order sizes.
#[derive(Debug, Clone)]
pub struct CompoundPoissonLogarithmic {
    lambda: f64,
    order_size: Logarithmic,
    arrivals: Poisson,
}

/// Fits `theta = 1 - mu/sigma^2` and `lambda = -mu (1-theta) ln(1-theta) / theta`.
pub fn fit_logarithmic_compound(demand: MomentPair) -> Result<CompoundPoissonLogarithmic> {
    if !(demand.mean > 0.0) || !(demand.variance > demand.mean) {
        return Err(Error::VarianceNotAboveMean { mean: demand.mean, variance: demand.variance });
    }
    let theta = 1.0 - demand.mean / demand.variance;
    let lambda = -demand.mean * (1.0 - theta) * (-theta).ln_1p() / theta;
    CompoundPoissonLogarithmic::new(lambda, theta)
}

impl CompoundPoissonLogarithmic {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        Ok(Self { lambda, order_size: Logarithmic::new(theta)?, arrivals: Poisson::new(lambda)? })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.order_size.theta()
    }

    pub fn order_size(&self) -> &Logarithmic {
        &self.order_size
    }

    /// Implied daily demand moments `(lambda E[K], lambda E[K^2])`.
    pub fn daily_moments(&self) -> MomentPair {
        use super::DiscreteDistribution;
        MomentPair::raw(self.lambda * self.order_size.mean(), self.lambda * self.order_size.second_moment())
    }

    /// Number of customers arriving in one day.
    #[inline]
    pub fn draw_customers<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.arrivals.draw(rng)
    }

    /// Size of one customer order.
    #[inline]
    pub fn draw_order_size<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.order_size.quantile_index(rng.random::<f64>())
    }

    /// Total demand of one day.
    pub fn draw_day<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let n = self.draw_customers(rng);
        (0..n).map(|_| self.draw_order_size(rng)).sum()
    }
}
