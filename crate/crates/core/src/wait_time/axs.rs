use crate::distributions::{normal_loss, std_normal_sf};

use super::{Method, WaitContext, WaitFlags, WaitTimeEstimate, WarehouseWait};

/// Little's-law wait time under a normal central lead-time demand.
///
/// `k = (R_0 + Q_0 - sum mu_i E[L_0]) / (sum sigma_i E[L_0])`,
/// `E[W] = G(k) sum sigma_i E[L_0] / sum mu_i` and
/// `Var[W] = (E[W]/G)^2 (1 - Phi(k)) - E[W]^2 k / G - E[W]^2`.
pub(super) fn estimate(ctx: &WaitContext, r0: i64) -> WaitTimeEstimate {
    let net = &ctx.net;
    let el0 = ctx.l0.mean;
    let mu: f64 = net.locals.iter().map(|w| w.daily_demand().mean).sum();
    let spread: f64 = net.locals.iter().map(|w| w.daily_demand().sd() * el0).sum();
    let r0_eff = ctx.grid.effective_units(r0);
    let (mean, var) = if mu <= 0.0 {
        (0.0, 0.0)
    } else if spread <= 0.0 {
        // No demand uncertainty: a stockout happens only if R0 + Q0 < demand.
        let short = (mu * el0 - r0_eff - net.central.order_quantity as f64).max(0.0);
        (short / mu, 0.0)
    } else {
        let k = (r0_eff + net.central.order_quantity as f64 - mu * el0) / spread;
        let g = normal_loss(k);
        let mean = g * spread / mu;
        let c = spread / mu;
        let var = if g > 0.0 {
            let v = c * c * std_normal_sf(k) - mean * mean * k / g - mean * mean;
            // Far in the tail the three terms cancel; treat rounding noise as zero.
            if v < 0.0 && v > -1e-9 * c * c {
                0.0
            } else {
                v
            }
        } else {
            0.0
        };
        (mean, var)
    };
    WaitTimeEstimate {
        method: Method::Axs,
        r0,
        per_warehouse: net
            .locals
            .iter()
            .map(|w| WarehouseWait::from_raw(&w.id, mean, var, WaitFlags::default()))
            .collect(),
    }
}
