use rand::RngCore;

use super::DiscreteDistribution;

/// Degenerate distribution concentrated on a single non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass(pub u64);

impl DiscreteDistribution for PointMass {
    fn pmf(&self, k: i64) -> f64 {
        if k >= 0 && k as u64 == self.0 {
            1.0
        } else {
            0.0
        }
    }

    fn cdf(&self, k: i64) -> f64 {
        if k >= 0 && k as u64 >= self.0 {
            1.0
        } else {
            0.0
        }
    }

    fn mean(&self) -> f64 {
        self.0 as f64
    }

    fn variance(&self) -> f64 {
        0.0
    }

    fn partial_expectation(&self, z: i64) -> f64 {
        (self.0 as f64 - z as f64).max(0.0)
    }

    fn sample(&self, _rng: &mut dyn RngCore) -> u64 {
        self.0
    }
}
