use super::MomentPair;
use crate::error::{Error, Result};

/// First four raw moments `E[L^n]` of a non-negative random time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl RawMoments {
    pub fn deterministic(c: f64) -> Self {
        Self { m1: c, m2: c * c, m3: c * c * c, m4: c * c * c * c }
    }
}

/// Moments of the two auxiliary horizons derived from a lead time `L`:
/// the residual lifetime `L^` with cdf `(1/E[L]) int_0^y (1 - F(z)) dz`, and
/// `L~` with cdf `(2/E[L^2]) int_0^y int_x^inf (z - x) dF(z) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualLifetimes {
    pub hat: MomentPair,
    pub tilde: MomentPair,
    /// False when the supplied moments violate `E[L^3] E[L] >= E[L^2]^2`
    /// (or its fourth-moment analogue), i.e. no distribution has them.
    pub moments_consistent: bool,
}

/// `E[L^] = E[L^2]/(2E[L])`, `E[L^^2] = E[L^3]/(3E[L])`,
/// `E[L~] = E[L^3]/(3E[L^2])`, `E[L~^2] = E[L^4]/(6E[L^2])`.
pub fn residual_lifetime_moments(raw: RawMoments) -> Result<ResidualLifetimes> {
    if !(raw.m1 > 0.0) || !(raw.m2 > 0.0) {
        return Err(Error::Domain(format!("residual lifetime needs E[L] > 0, got {}", raw.m1)));
    }
    let hat_m1 = raw.m2 / (2.0 * raw.m1);
    let hat_m2 = raw.m3 / (3.0 * raw.m1);
    let tilde_m1 = raw.m3 / (3.0 * raw.m2);
    let tilde_m2 = raw.m4 / (6.0 * raw.m2);
    let hat_var = hat_m2 - hat_m1 * hat_m1;
    let tilde_var = tilde_m2 - tilde_m1 * tilde_m1;
    let tol = 1e-12;
    let consistent = raw.m3 * raw.m1 >= raw.m2 * raw.m2 * (1.0 - tol)
        && raw.m4 * raw.m2 >= raw.m3 * raw.m3 * (1.0 - tol)
        && hat_var >= -tol * hat_m2
        && tilde_var >= -tol * tilde_m2;
    Ok(ResidualLifetimes {
        hat: MomentPair::raw(hat_m1, hat_var.max(0.0)),
        tilde: MomentPair::raw(tilde_m1, tilde_var.max(0.0)),
        moments_consistent: consistent,
    })
}
