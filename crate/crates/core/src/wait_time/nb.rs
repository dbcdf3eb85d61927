use crate::model::{select_ltd_distribution, LtdFamily};

use super::{Method, WaitContext, WaitFlags, WaitTimeEstimate, WarehouseWait};

/// KKSL-style moments with `O_i = Q_i` and a negative binomial fit of
/// `D_0(L^_0) + Q_i` (gamma when the variance does not exceed the mean),
/// evaluated in calculation units with the discrete partial expectation.
pub(super) fn estimate(ctx: &WaitContext, r0: i64) -> WaitTimeEstimate {
    let unit = ctx.unit();
    let r = ctx.grid.to_grid(r0) as f64;
    let q0 = ctx.net.central.order_quantity as f64 / unit;
    let per_warehouse = ctx
        .net
        .locals
        .iter()
        .map(|w| {
            let qi = w.order_quantity as f64 / unit;
            let hat = select_ltd_distribution(ctx.demand_hat.shifted(qi));
            let tilde = select_ltd_distribution(ctx.demand_tilde.shifted(qi));
            let flags = WaitFlags {
                gamma_fallback: hat.family() != LtdFamily::NegativeBinomial
                    || tilde.family() != LtdFamily::NegativeBinomial,
                inconsistent_moments: !ctx.residual.moments_consistent,
                ..Default::default()
            };
            let mean = ctx.l0_raw.m1 / q0 * (hat.partial_expectation(r) - hat.partial_expectation(r + q0));
            let second = ctx.l0_raw.m2 / q0 * (tilde.partial_expectation(r) - tilde.partial_expectation(r + q0));
            WarehouseWait::from_raw(&w.id, mean, second - mean * mean, flags)
        })
        .collect();
    WaitTimeEstimate { method: Method::Nb, r0, per_warehouse }
}
