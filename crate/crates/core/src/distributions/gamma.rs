use rand::RngCore;
use rand_distr::Distribution;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use super::{ContinuousDistribution, MomentPair};
use crate::error::{Error, Result};

/// Gamma distribution with `shape` and `scale` (mean = shape * scale).
#[derive(Debug, Clone)]
pub struct Gamma {
    shape: f64,
    scale: f64,
    sampler: rand_distr::Gamma<f64>,
}

/// Moment inversion: `shape = mean^2 / var`, `scale = var / mean`.
pub fn gamma_from_moments(m: MomentPair) -> Result<Gamma> {
    if !(m.mean > 0.0) || !(m.variance > 0.0) || !m.mean.is_finite() || !m.variance.is_finite() {
        return Err(Error::Domain(format!(
            "gamma fit needs positive moments, got mean={} var={}",
            m.mean, m.variance
        )));
    }
    Gamma::new(m.mean * m.mean / m.variance, m.variance / m.mean)
}

impl Gamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
            return Err(Error::Domain(format!("gamma needs shape, scale > 0; got {shape}, {scale}")));
        }
        let sampler = rand_distr::Gamma::new(shape, scale)
            .map_err(|e| Error::Domain(format!("gamma({shape}, {scale}): {e}")))?;
        Ok(Self { shape, scale, sampler })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `E[X^n] = scale^n * shape (shape + 1) ... (shape + n - 1)`.
    pub fn raw_moment(&self, n: u32) -> f64 {
        (0..n).fold(1.0, |acc, j| acc * (self.shape + j as f64) * self.scale)
    }

    /// Upper tail `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            gamma_ur(self.shape, x / self.scale)
        }
    }

    /// Inverse cdf by safeguarded Newton iteration.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return f64::INFINITY;
        }
        let mean = self.shape * self.scale;
        let (mut lo, mut hi) = (0.0, mean.max(self.scale));
        while self.cdf(hi) < u {
            lo = hi;
            hi *= 2.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.cdf(x) - u;
            if f.abs() <= 1e-14 * u.min(1.0 - u) {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.pdf(x);
            let newton = if d > 0.0 { x - f / d } else { f64::NAN };
            x = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        x
    }

    #[inline]
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler.sample(rng)
    }
}

impl ContinuousDistribution for Gamma {
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = (self.shape - 1.0) * x.ln() - x / self.scale - ln_gamma(self.shape) - self.shape * self.scale.ln();
        ln.exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            gamma_lr(self.shape, x / self.scale)
        }
    }

    fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// `shape * scale * Q(shape + 1, z/scale) - z Q(shape, z/scale)`.
    fn partial_expectation(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return self.mean() - z;
        }
        let t = z / self.scale;
        (self.mean() * gamma_ur(self.shape + 1.0, t) - z * gamma_ur(self.shape, t)).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.draw(rng)
    }
}
