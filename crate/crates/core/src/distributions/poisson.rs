use rand::RngCore;
use rand_distr::Distribution;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::DiscreteDistribution;
use crate::error::{Error, Result};

/// `e^{-lambda} lambda^x / x!`.
pub fn poisson_pmf(x: i64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("Poisson mean must be > 0, got {lambda}")));
    }
    if x < 0 {
        return Ok(0.0);
    }
    let xf = x as f64;
    Ok((-lambda + xf * lambda.ln() - ln_gamma(xf + 1.0)).exp())
}

#[derive(Debug, Clone)]
pub struct Poisson {
    lambda: f64,
    sampler: rand_distr::Poisson<f64>,
}

impl Poisson {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("Poisson mean must be > 0, got {lambda}")));
        }
        let sampler = rand_distr::Poisson::new(lambda)
            .map_err(|e| Error::Domain(format!("Poisson({lambda}): {e}")))?;
        Ok(Self { lambda, sampler })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sampler.sample(rng) as u64
    }
}

impl DiscreteDistribution for Poisson {
    fn pmf(&self, k: i64) -> f64 {
        poisson_pmf(k, self.lambda).unwrap_or(0.0)
    }

    fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            gamma_ur(k as f64 + 1.0, self.lambda)
        }
    }

    fn mean(&self) -> f64 {
        self.lambda
    }

    fn variance(&self) -> f64 {
        self.lambda
    }

    fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        self.draw(rng)
    }
}
