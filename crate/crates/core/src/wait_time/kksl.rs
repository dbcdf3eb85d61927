use crate::distributions::{
    fit_logarithmic_compound, mixed_erlang_from_moments, ContinuousDistribution, DiscreteDistribution, MomentPair,
    DEFAULT_PHASE_CAP,
};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;

use super::{Method, WaitContext, WaitFlags, WaitTimeEstimate, WarehouseWait};

/// Distribution of the actual replenishment order size `O_i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum KkslOrderSizeModel {
    /// `O_i = Q_i`.
    #[default]
    Fixed,
    /// `O_i = Q_i G_i` with `G_i` geometric on `{1, 2, ...}`; entry `i` is
    /// the probability of needing one more batch.
    GeometricMultiple(Vec<f64>),
}

impl KkslOrderSizeModel {
    /// Geometric multiples with `p_i = P(K_i >= Q_i)`, the chance that one
    /// customer order alone exhausts a batch.
    pub fn geometric_from_demand(net: &NetworkConfig) -> Result<Self> {
        let mut ps = Vec::with_capacity(net.locals.len());
        for w in &net.locals {
            let p = match fit_logarithmic_compound(w.daily_demand()) {
                Ok(c) => 1.0 - c.order_size().cdf(w.order_quantity as i64 - 1),
                Err(Error::VarianceNotAboveMean { .. }) => 0.0,
                Err(e) => return Err(e),
            };
            ps.push(p.clamp(0.0, 0.999));
        }
        Ok(KkslOrderSizeModel::GeometricMultiple(ps))
    }

    /// Moments of `O_i` in pieces.
    pub fn moments(&self, index: usize, q: f64) -> Result<MomentPair> {
        match self {
            KkslOrderSizeModel::Fixed => Ok(MomentPair::raw(q, 0.0)),
            KkslOrderSizeModel::GeometricMultiple(ps) => {
                let p = *ps.get(index).ok_or_else(|| {
                    Error::Config(format!("order-size model has no entry for warehouse {index}"))
                })?;
                if !(0.0..1.0).contains(&p) {
                    return Err(Error::Domain(format!("geometric continuation probability {p} outside [0,1)")));
                }
                let m = 1.0 / (1.0 - p);
                Ok(MomentPair::raw(q * m, q * q * p / ((1.0 - p) * (1.0 - p))))
            }
        }
    }
}

/// `E[W_i] = E[L_0]/Q_0 (E[(X^ - R_0)+] - E[(X^ - R_0 - Q_0)+])` and the
/// analogous second moment with `E[L_0^2]` and `X~`, where `X = D_0 + O_i`
/// is fitted by a mixed Erlang distribution.
pub(super) fn estimate(ctx: &WaitContext, r0: i64) -> Result<WaitTimeEstimate> {
    if r0 < 0 {
        return Err(Error::NegativeReorderPoint(r0));
    }
    let unit = ctx.unit();
    let r = ctx.grid.to_grid(r0) as f64;
    let q0 = ctx.net.central.order_quantity as f64 / unit;
    let base_flags = WaitFlags { inconsistent_moments: !ctx.residual.moments_consistent, ..Default::default() };
    let mut per_warehouse = Vec::with_capacity(ctx.net.locals.len());
    for (i, w) in ctx.net.locals.iter().enumerate() {
        let o = ctx.kksl_orders.moments(i, w.order_quantity as f64)?.in_units_of(unit);
        let hat = mixed_erlang_from_moments(ctx.demand_hat.plus_independent(&o), DEFAULT_PHASE_CAP)?;
        let tilde = mixed_erlang_from_moments(ctx.demand_tilde.plus_independent(&o), DEFAULT_PHASE_CAP)?;
        let mean = ctx.l0_raw.m1 / q0 * (hat.partial_expectation(r) - hat.partial_expectation(r + q0));
        let second = ctx.l0_raw.m2 / q0 * (tilde.partial_expectation(r) - tilde.partial_expectation(r + q0));
        per_warehouse.push(WarehouseWait::from_raw(&w.id, mean, second - mean * mean, base_flags));
    }
    Ok(WaitTimeEstimate { method: Method::Kksl, r0, per_warehouse })
}
