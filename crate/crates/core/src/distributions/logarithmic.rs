use rand::RngCore;

use super::{uniform01, DiscreteDistribution, TRUNCATION_TAIL};
use crate::error::{Error, Result};

/// Probability mass `-theta^k / (k ln(1 - theta))` of the logarithmic
/// distribution on `k = 1, 2, ...`.
pub fn logarithmic_pmf(k: i64, theta: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain(format!("logarithmic pmf needs k >= 1, got {k}")));
    }
    check_theta(theta)?;
    Ok(-theta.powi(k as i32) / (k as f64 * (-theta).ln_1p()))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("logarithmic shape must lie in (0,1), got {theta}")));
    }
    Ok(())
}

/// Logarithmic (log-series) distribution, used for customer order sizes.
///
/// The cumulative distribution is tabulated once so that sampling is a
/// binary search on a uniform draw.
#[derive(Debug, Clone)]
pub struct Logarithmic {
    theta: f64,
    cdf: Vec<f64>,
}

impl Logarithmic {
    pub fn new(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        let norm = -1.0 / (-theta).ln_1p();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut power = 1.0;
        let mut k = 1usize;
        loop {
            power *= theta;
            acc += norm * power / k as f64;
            cdf.push(acc);
            if acc >= 1.0 - TRUNCATION_TAIL || power < 1e-300 {
                break;
            }
            k += 1;
        }
        Ok(Self { theta, cdf })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Largest tabulated order size.
    pub fn truncation_point(&self) -> i64 {
        self.cdf.len() as i64
    }

    /// `E[K^2]`.
    pub fn second_moment(&self) -> f64 {
        let t = self.theta;
        -t / ((1.0 - t) * (1.0 - t) * (-t).ln_1p())
    }

    /// Draws an order size using a pre-drawn uniform.
    #[inline]
    pub fn quantile_index(&self, u: f64) -> u64 {
        let idx = self.cdf.partition_point(|&c| c <= u);
        if idx < self.cdf.len() {
            return idx as u64 + 1;
        }
        // Beyond the table: walk the geometric-like tail.
        let mut k = self.cdf.len() as u64;
        let mut acc = *self.cdf.last().unwrap_or(&0.0);
        let norm = -1.0 / (-self.theta).ln_1p();
        loop {
            k += 1;
            let f = norm * self.theta.powi(k as i32) / k as f64;
            acc += f;
            if acc > u || f < 1e-300 {
                return k;
            }
        }
    }
}

impl DiscreteDistribution for Logarithmic {
    fn pmf(&self, k: i64) -> f64 {
        if k < 1 {
            0.0
        } else {
            logarithmic_pmf(k, self.theta).unwrap_or(0.0)
        }
    }

    fn cdf(&self, k: i64) -> f64 {
        if k < 1 {
            0.0
        } else if (k as usize) <= self.cdf.len() {
            self.cdf[k as usize - 1]
        } else {
            1.0
        }
    }

    fn mean(&self) -> f64 {
        let t = self.theta;
        -t / ((1.0 - t) * (-t).ln_1p())
    }

    fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }

    fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        self.quantile_index(uniform01(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pmf_at_one_and_two() {
        let ln2 = std::f64::consts::LN_2;
        assert_relative_eq!(logarithmic_pmf(1, 0.5).unwrap(), 0.5 / ln2, max_relative = 1e-14);
        assert_relative_eq!(logarithmic_pmf(2, 0.5).unwrap(), 0.25 / (2.0 * ln2), max_relative = 1e-14);
        assert_relative_eq!(logarithmic_pmf(1, 0.5).unwrap(), 0.72135, epsilon = 1e-5);
        assert_relative_eq!(logarithmic_pmf(2, 0.5).unwrap(), 0.18034, epsilon = 1e-5);
    }

    #[test]
    fn pmf_normalises() {
        let total: f64 = (1..2000).map(|k| logarithmic_pmf(k, 0.5).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(logarithmic_pmf(0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(logarithmic_pmf(1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(logarithmic_pmf(1, 0.0), Err(Error::Domain(_))));
        assert!(Logarithmic::new(-0.1).is_err());
    }

    #[test]
    fn moments_match_series() {
        let d = Logarithmic::new(0.875).unwrap();
        let (mut m1, mut m2) = (0.0, 0.0);
        for k in 1..5000 {
            let f = d.pmf(k);
            m1 += k as f64 * f;
            m2 += (k * k) as f64 * f;
        }
        assert_relative_eq!(d.mean(), m1, max_relative = 1e-10);
        assert_relative_eq!(d.second_moment(), m2, max_relative = 1e-10);
    }

    #[test]
    fn quantile_index_inverts_cdf() {
        let d = Logarithmic::new(0.5).unwrap();
        assert_eq!(d.quantile_index(0.0), 1);
        assert_eq!(d.quantile_index(0.7), 1);
        assert_eq!(d.quantile_index(0.73), 2);
        assert!(d.quantile_index(1.0 - 1e-13) > 10);
    }
}
