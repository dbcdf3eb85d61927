use rand::RngCore;

use super::{uniform01, DiscreteDistribution, MomentPair, TRUNCATION_TAIL};
use crate::error::{Error, Result};

/// Negative binomial distribution
/// `f(x) = Gamma(n + x) / (Gamma(n) x!) p^n (1 - p)^x`, `x = 0, 1, ...`.
///
/// The pmf is tabulated up to the `1 - 1e-12` quantile together with the
/// running sums needed for partial expectations.
#[derive(Debug, Clone)]
pub struct NegativeBinomial {
    n: f64,
    p: f64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    head: Vec<f64>,
}

/// Fits `(n, p)` so that `n(1-p)/p` and `n(1-p)/p^2` reproduce `m`.
pub fn negbin_from_moments(m: MomentPair) -> Result<NegativeBinomial> {
    if !(m.mean > 0.0) || !(m.variance > m.mean) {
        return Err(Error::VarianceNotAboveMean { mean: m.mean, variance: m.variance });
    }
    let p = m.mean / m.variance;
    let n = m.mean * m.mean / (m.variance - m.mean);
    NegativeBinomial::new(n, p)
}

fn log_pmf(n: f64, p: f64, k: i64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let kf = k as f64;
    ln_gamma(n + kf) - ln_gamma(n) - ln_gamma(kf + 1.0) + n * p.ln() + kf * (1.0 - p).ln()
}

impl NegativeBinomial {
    pub fn new(n: f64, p: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() || !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("negative binomial needs n > 0, p in (0,1); got n={n}, p={p}")));
        }
        let mean = n * (1.0 - p) / p;
        let mut pmf = Vec::new();
        let mut cdf = Vec::new();
        let mut head = Vec::new();
        let mut log_f = n * p.ln();
        let (mut acc, mut acc_x) = (0.0, 0.0);
        let mut x = 0usize;
        loop {
            let f = log_f.exp();
            acc += f;
            acc_x += x as f64 * f;
            pmf.push(f);
            cdf.push(acc);
            head.push(acc_x);
            // Past the mode the pmf ratio r is decreasing, so the remaining
            // tail is at most f r / (1 - r).
            let ratio = (n + x as f64) / (x as f64 + 1.0) * (1.0 - p);
            let tail_bound = if ratio < 1.0 { f * ratio / (1.0 - ratio) } else { f64::INFINITY };
            if x as f64 >= mean && (acc >= 1.0 - TRUNCATION_TAIL || tail_bound < TRUNCATION_TAIL * 1e-3) {
                break;
            }
            if x > 50_000_000 {
                break;
            }
            x += 1;
            log_f = if x.is_multiple_of(64) { log_pmf(n, p, x as i64) } else { log_f + ratio.ln() };
        }
        Ok(Self { n, p, pmf, cdf, head })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Largest tabulated support point.
    pub fn truncation_point(&self) -> i64 {
        self.pmf.len() as i64 - 1
    }

    fn log_pmf_direct(&self, k: i64) -> f64 {
        log_pmf(self.n, self.p, k)
    }

    /// Brute-force tail sum beyond the table.
    fn tail_partial_expectation(&self, z: i64) -> f64 {
        let ln_q = (1.0 - self.p).ln();
        let mut x = z + 1;
        let mut log_f = self.log_pmf_direct(x);
        let mut total = 0.0;
        loop {
            let term = (x - z) as f64 * log_f.exp();
            total += term;
            if term < 1e-300 || (term < total * 1e-17) {
                break;
            }
            log_f += ((self.n + x as f64) / (x as f64 + 1.0)).ln() + ln_q;
            x += 1;
        }
        total
    }
}

impl DiscreteDistribution for NegativeBinomial {
    fn pmf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.pmf.get(k as usize).copied().unwrap_or(0.0)
        }
    }

    fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.cdf.get(k as usize).copied().unwrap_or(1.0)
        }
    }

    fn mean(&self) -> f64 {
        self.n * (1.0 - self.p) / self.p
    }

    fn variance(&self) -> f64 {
        self.n * (1.0 - self.p) / (self.p * self.p)
    }

    fn partial_expectation(&self, z: i64) -> f64 {
        if z < 0 {
            return self.mean() - z as f64;
        }
        let zi = z as usize;
        if zi >= self.pmf.len() {
            return self.tail_partial_expectation(z);
        }
        (self.mean() - self.head[zi] - z as f64 * (1.0 - self.cdf[zi])).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        let u = uniform01(rng);
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fit_inverts_moments() {
        let d = negbin_from_moments(MomentPair::raw(10.0, 20.0)).unwrap();
        assert_relative_eq!(d.p(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(d.n(), 10.0, max_relative = 1e-15);
        assert_relative_eq!(d.mean(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(d.variance(), 20.0, max_relative = 1e-12);
        let total: f64 = (0..=d.truncation_point()).map(|k| d.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_mean_table_stays_short() {
        let d = NegativeBinomial::new(2700.0, 0.5).unwrap();
        assert!(d.truncation_point() < 10_000, "{}", d.truncation_point());
        let mean: f64 = (0..=d.truncation_point()).map(|k| k as f64 * d.pmf(k)).sum();
        assert_relative_eq!(mean, 2700.0, max_relative = 1e-9);
    }

    #[test]
    fn boundary_variance_equal_mean() {
        assert!(matches!(
            negbin_from_moments(MomentPair::raw(10.0, 10.0)),
            Err(Error::VarianceNotAboveMean { .. })
        ));
    }

    #[test]
    fn partial_expectation_at_zero_is_mean() {
        let d = negbin_from_moments(MomentPair::raw(3.3, 17.0)).unwrap();
        assert_relative_eq!(d.partial_expectation(0), d.mean(), max_relative = 1e-12);
    }

    #[test]
    fn partial_expectation_beyond_table_is_tiny_and_monotone() {
        let d = negbin_from_moments(MomentPair::raw(5.0, 8.0)).unwrap();
        let t = d.truncation_point();
        let a = d.partial_expectation(t - 1);
        let b = d.partial_expectation(t);
        let c = d.partial_expectation(t + 5);
        assert!(a >= b && b >= c && c >= 0.0);
        assert!(a < 1e-9);
    }
}
