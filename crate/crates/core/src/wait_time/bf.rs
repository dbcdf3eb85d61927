use crate::distributions::quadrature::gauss_legendre_unit;
use crate::distributions::std_normal_cdf;

use super::{Method, WaitContext, WaitFlags, WaitTimeEstimate, WarehouseWait};

const NODES: usize = 64;

/// Lognormal demand rate `rho` fitted to `(mean, variance)`.
#[derive(Debug, Clone, Copy)]
struct RateLaw {
    m: f64,
    s: f64,
    mean: f64,
}

impl RateLaw {
    fn new(mean: f64, variance: f64) -> Self {
        let s2 = (variance / (mean * mean)).ln_1p();
        Self { m: mean.ln() - 0.5 * s2, s: s2.sqrt(), mean }
    }

    /// `E[rho^-j ; rho > c]`.
    fn partial_inverse_moment(&self, j: f64, c: f64) -> f64 {
        let scale = (-j * self.m + 0.5 * j * j * self.s * self.s).exp();
        scale * std_normal_cdf((self.m - j * self.s * self.s - c.ln()) / self.s)
    }

    /// First two moments of `(L - a / rho)+` for `a > 0`.
    fn wait_moments(&self, lead: f64, a: f64) -> (f64, f64) {
        if self.s < 1e-12 {
            let w = (lead - a / self.mean).max(0.0);
            return (w, w * w);
        }
        let c = a / lead;
        let p = self.partial_inverse_moment(0.0, c);
        let e1 = self.partial_inverse_moment(1.0, c);
        let e2 = self.partial_inverse_moment(2.0, c);
        let w1 = lead * p - a * e1;
        let w2 = lead * lead * p - 2.0 * lead * a * e1 + a * a * e2;
        (w1.max(0.0), w2.max(0.0))
    }
}

/// Demand-rate approximation with a lognormal rate and constant central
/// lead time `E[L_0]`.
///
/// An order of size `Q_i` placed when the central inventory position is
/// `R_0 + U`, `U ~ Uniform(0, Q_0]`, leaves `A = R_0 + U - Q_i` units ahead
/// of it. With demand running at rate `rho` its wait is `(L - A/rho)+`, or
/// the full `L` when `A <= 0`. If `Q_i > Q_0 + R_0` the linear approach
/// breaks down and the central lead-time moments are returned instead.
pub(super) fn estimate(ctx: &WaitContext, r0: i64) -> WaitTimeEstimate {
    let lead = ctx.l0_raw.m1;
    let q0 = ctx.net.central.order_quantity as f64;
    let mu: f64 = ctx.net.locals.iter().map(|w| w.daily_demand().mean).sum();
    let rate_var = ctx.demand_fixed_horizon.variance / (lead * lead);
    let law = (mu > 0.0).then(|| RateLaw::new(mu, rate_var));
    let r0_eff = ctx.grid.effective_units(r0);
    let (nodes, weights) = gauss_legendre_unit(NODES);
    let per_warehouse = ctx
        .net
        .locals
        .iter()
        .map(|w| {
            let qi = w.order_quantity as f64;
            if qi > q0 + r0 as f64 {
                let flags = WaitFlags { fallback: true, ..Default::default() };
                return WarehouseWait::from_raw(&w.id, ctx.l0.mean, ctx.l0.variance, flags);
            }
            let Some(law) = law else {
                return WarehouseWait::from_raw(&w.id, 0.0, 0.0, WaitFlags::default());
            };
            // U below `split` leaves nothing ahead of the order.
            let split = (qi - r0_eff).clamp(0.0, q0);
            let full = split / q0;
            let (mut m1, mut m2) = (full * lead, full * lead * lead);
            let width = q0 - split;
            if width > 0.0 {
                for (x, wt) in nodes.iter().zip(&weights) {
                    let a = r0_eff - qi + split + width * x;
                    let (w1, w2) = if a > 0.0 { law.wait_moments(lead, a) } else { (lead, lead * lead) };
                    m1 += wt * width / q0 * w1;
                    m2 += wt * width / q0 * w2;
                }
            }
            WarehouseWait::from_raw(&w.id, m1, m2 - m1 * m1, WaitFlags::default())
        })
        .collect();
    WaitTimeEstimate { method: Method::Bf, r0, per_warehouse }
}
