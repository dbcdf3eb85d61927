//! Reorder-point calibration: the central reorder point from a prescribed
//! central fill rate, then local reorder points for a given wait-time method.

use serde::{Deserialize, Serialize};

use crate::distributions::MomentPair;
use crate::error::{Error, Result};
use crate::model::{
    lead_time_demand_local, select_ltd_distribution, CentralModel, EffectiveLeadTime, FillRateCurve, LtdFamily,
    NetworkConfig, OrderSizeDistribution, UnitMode, WarehouseParams,
};
use crate::wait_time::{Method, WaitContext, WaitTimeEstimate};

/// Doublings allowed when widening a search bracket.
const MAX_BRACKET_DOUBLINGS: u32 = 48;

/// Smallest integer in `[lo, hi]` satisfying the monotone predicate `ok`,
/// growing `hi` geometrically while `ok(hi)` fails.
pub(crate) fn min_satisfying(lo: i64, hi: i64, target: f64, ok: impl Fn(i64) -> bool) -> Result<i64> {
    if ok(lo) {
        return Ok(lo);
    }
    let mut lo = lo;
    let mut hi = hi.max(lo + 1);
    let mut width = (hi - lo).max(1);
    let mut doublings = 0;
    while !ok(hi) {
        if doublings == MAX_BRACKET_DOUBLINGS {
            return Err(Error::TargetUnreachable {
                target,
                reason: format!("fill rate still below target at reorder point {hi}"),
            });
        }
        lo = hi;
        width = width.saturating_mul(2);
        hi = hi.saturating_add(width);
        doublings += 1;
    }
    // Invariant: !ok(lo), ok(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn check_target(target: f64) -> Result<()> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!("fill-rate target {target} outside (0,1)")));
    }
    Ok(())
}

/// Minimal central reorder point (in pieces) whose analytic order fill rate
/// reaches `target`.
///
/// The search runs on the subbatch grid; the result is the largest piece
/// count mapping to the chosen grid point. The lower end of the search is
/// `-Q_0`.
pub fn central_reorder_point(net: &NetworkConfig, target: f64) -> Result<i64> {
    central_reorder_point_with(&CentralModel::new(net, UnitMode::Subbatch)?, net, target)
}

/// [`central_reorder_point`] reusing a prepared central model.
pub fn central_reorder_point_with(model: &CentralModel, net: &NetworkConfig, target: f64) -> Result<i64> {
    check_target(target)?;
    let q = model.grid.q as i64;
    let q0 = net.central.order_quantity as i64;
    // Smallest grid point whose piece value is at least -Q0.
    let lo = (-q0 - q + 1).div_euclid(q) + i64::from((-q0 - q + 1).rem_euclid(q) != 0);
    let ltd = model.ltd_units();
    let hi = model.grid.to_grid((ltd.mean + 10.0 * ltd.sd()).ceil() as i64).max(lo + 1);
    let r = min_satisfying(lo, hi, target, |r| model.fill_rate_grid(r) >= target)?;
    Ok(model.grid.to_units(r))
}

/// Local lead-time demand and fill-rate curve for a given effective lead time.
#[derive(Debug, Clone)]
pub struct LocalFillModel {
    pub ltd: MomentPair,
    pub family: LtdFamily,
    curve: FillRateCurve,
}

impl LocalFillModel {
    pub fn new(w: &WarehouseParams, eff: &EffectiveLeadTime) -> Result<Self> {
        let ltd = lead_time_demand_local(w, eff);
        let dist = select_ltd_distribution(ltd);
        let sizes = OrderSizeDistribution::for_demand(w.daily_demand())?;
        Ok(Self { ltd, family: dist.family(), curve: FillRateCurve::new(w.order_quantity, &dist, sizes) })
    }

    pub fn fill_rate(&self, r: i64) -> f64 {
        self.curve.at(r)
    }

    /// Minimal reorder point, searched from `-Q`, meeting `target`.
    pub fn reorder_point(&self, order_quantity: u64, target: f64) -> Result<i64> {
        check_target(target)?;
        let lo = -(order_quantity as i64);
        let hi = (self.ltd.mean + 10.0 * self.ltd.sd()).ceil() as i64;
        min_satisfying(lo, hi, target, |r| self.fill_rate(r) >= target)
    }
}

/// Calibrated reorder point of one local warehouse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalCalibration {
    pub id: String,
    pub reorder_point: i64,
    /// Analytic order fill rate at `reorder_point`.
    pub fill_rate: f64,
    /// Analytic fill rate one below, always short of the target.
    pub fill_rate_below: f64,
    pub ltd: MomentPair,
    pub family: LtdFamily,
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub r0: i64,
    pub locals: Vec<LocalCalibration>,
    pub wait: WaitTimeEstimate,
}

impl CalibrationResult {
    pub fn local(&self, id: &str) -> Option<&LocalCalibration> {
        self.locals.iter().find(|l| l.id == id)
    }

    /// Copy of `net` with the calibrated reorder points.
    pub fn apply(&self, net: &NetworkConfig) -> NetworkConfig {
        let mut out = net.clone();
        out.central.reorder_point = self.r0;
        for (w, c) in out.locals.iter_mut().zip(&self.locals) {
            w.reorder_point = c.reorder_point;
        }
        out
    }

    /// Sum of `R_i p_i`, the stock value implied by the local reorder points.
    pub fn local_reorder_value(&self, net: &NetworkConfig) -> f64 {
        net.locals.iter().zip(&self.locals).map(|(w, c)| w.price * c.reorder_point as f64).sum()
    }
}

/// Local reorder points for a given wait-time estimate.
pub fn local_reorder_points_for_wait(net: &NetworkConfig, wait: WaitTimeEstimate) -> Result<CalibrationResult> {
    let mut locals = Vec::with_capacity(net.locals.len());
    for w in &net.locals {
        let wt = wait
            .get(&w.id)
            .ok_or_else(|| Error::KeyMismatch(format!("no wait time for warehouse {}", w.id)))?;
        let model = LocalFillModel::new(w, &EffectiveLeadTime::new(w.lead, wt.moments))?;
        let r = model.reorder_point(w.order_quantity, w.fill_target)?;
        locals.push(LocalCalibration {
            id: w.id.clone(),
            reorder_point: r,
            fill_rate: model.fill_rate(r),
            fill_rate_below: model.fill_rate(r - 1),
            ltd: model.ltd,
            family: model.family,
        });
    }
    Ok(CalibrationResult { r0: wait.r0, locals, wait })
}

/// Local reorder points given `R_0`, with the wait estimated by `method`.
pub fn local_reorder_points(net: &NetworkConfig, r0: i64, method: Method) -> Result<CalibrationResult> {
    local_reorder_points_with(&WaitContext::new(net)?, r0, method)
}

/// [`local_reorder_points`] reusing a prepared wait-time context.
pub fn local_reorder_points_with(ctx: &WaitContext, r0: i64, method: Method) -> Result<CalibrationResult> {
    let wait = ctx.estimate(method, r0)?;
    local_reorder_points_for_wait(ctx.network(), wait)
}

/// How the central reorder point is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CentralPolicy {
    /// Minimal `R_0` meeting an analytic central fill rate.
    Target(f64),
    /// Fixed `R_0`.
    Override(i64),
}

impl CentralPolicy {
    pub fn resolve(&self, net: &NetworkConfig) -> Result<i64> {
        match *self {
            CentralPolicy::Target(t) => central_reorder_point(net, t),
            CentralPolicy::Override(r) => Ok(r),
        }
    }
}

/// Full pipeline: central reorder point, wait time, local reorder points.
pub fn calibrate(net: &NetworkConfig, central: CentralPolicy, method: Method) -> Result<CalibrationResult> {
    let r0 = central.resolve(net)?;
    local_reorder_points(net, r0, method)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_finds_threshold() {
        assert_eq!(min_satisfying(-10, 5, 0.5, |x| x >= 37).unwrap(), 37);
        assert_eq!(min_satisfying(-10, 5, 0.5, |x| x >= -20).unwrap(), -10);
        assert_eq!(min_satisfying(-10, 5, 0.5, |x| x >= 3).unwrap(), 3);
        assert!(matches!(min_satisfying(0, 1, 0.5, |_| false), Err(Error::TargetUnreachable { .. })));
    }

    #[test]
    fn central_point_is_minimal_on_grid() {
        let net = NetworkConfig::reference();
        let model = CentralModel::new(&net, UnitMode::Subbatch).unwrap();
        for t in [0.2, 0.4, 0.95] {
            let r0 = central_reorder_point_with(&model, &net, t).unwrap();
            assert!(model.fill_rate(r0) >= t);
            assert!(model.fill_rate(r0 - net.subbatch as i64) < t);
            assert_eq!((r0 + 1) % net.subbatch as i64, 0);
        }
    }

    #[test]
    fn bad_target_rejected() {
        let net = NetworkConfig::reference();
        assert!(matches!(central_reorder_point(&net, 1.0), Err(Error::Domain(_))));
        assert!(matches!(central_reorder_point(&net, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn override_is_used_verbatim() {
        let net = NetworkConfig::reference();
        assert_eq!(CentralPolicy::Override(1234).resolve(&net).unwrap(), 1234);
    }
}
