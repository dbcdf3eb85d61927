//! Approximations of the wait time local orders suffer at the central
//! warehouse.
//!
//! Each estimator maps a network and a central reorder point `R_0` (pieces)
//! to per-warehouse wait-time moments in days. Pathologies (negative
//! variances, fallbacks) are recorded in [`WaitFlags`] before the values are
//! clamped, so experiments can count them.

mod axs;
mod bf;
mod kksl;
mod nb;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{residual_lifetime_moments, MomentPair, RawMoments, ResidualLifetimes};
use crate::error::{Error, Result};
use crate::model::{CentralDemand, LeadTime, NetworkConfig, SubbatchGrid, UnitMode, DEFAULT_QUADRATURE_NODES};

pub use kksl::KkslOrderSizeModel;

/// Wait-time approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Axs,
    Kksl,
    Bf,
    Nb,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Axs, Method::Kksl, Method::Bf, Method::Nb];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Axs => "axs",
            Method::Kksl => "kksl",
            Method::Bf => "bf",
            Method::Nb => "nb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "axs" => Ok(Method::Axs),
            "kksl" => Ok(Method::Kksl),
            "bf" => Ok(Method::Bf),
            "nb" => Ok(Method::Nb),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Diagnostics attached to one warehouse's estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaitFlags {
    /// The raw variance was negative and has been clamped to zero.
    pub negative_variance: bool,
    /// The raw mean was negative and has been clamped to zero.
    pub negative_mean: bool,
    /// BF: the central lead time was substituted.
    pub fallback: bool,
    /// NB: variance not above mean, gamma used instead.
    pub gamma_fallback: bool,
    /// The lead-time moments admit no distribution.
    pub inconsistent_moments: bool,
}

impl WaitFlags {
    pub fn any(&self) -> bool {
        self.negative_variance || self.negative_mean || self.fallback || self.gamma_fallback || self.inconsistent_moments
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarehouseWait {
    pub id: String,
    /// Post-processed moments (mean and variance >= 0).
    pub moments: MomentPair,
    /// Values before clamping.
    pub raw_mean: f64,
    pub raw_variance: f64,
    pub flags: WaitFlags,
}

impl WarehouseWait {
    pub fn from_raw(id: &str, mean: f64, variance: f64, mut flags: WaitFlags) -> Self {
        if mean < 0.0 {
            flags.negative_mean = true;
        }
        if variance < 0.0 {
            flags.negative_variance = true;
        }
        Self {
            id: id.to_string(),
            moments: MomentPair::raw(mean.max(0.0), variance.max(0.0)),
            raw_mean: mean,
            raw_variance: variance,
            flags,
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn sd(&self) -> f64 {
        self.moments.sd()
    }
}

/// Per-warehouse wait-time moments produced by one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitTimeEstimate {
    pub method: Method,
    pub r0: i64,
    pub per_warehouse: Vec<WarehouseWait>,
}

impl WaitTimeEstimate {
    pub fn get(&self, id: &str) -> Option<&WarehouseWait> {
        self.per_warehouse.iter().find(|w| w.id == id)
    }

    pub fn any_flag(&self, f: impl Fn(&WaitFlags) -> bool) -> bool {
        self.per_warehouse.iter().any(|w| f(&w.flags))
    }

    /// Zero wait for every warehouse.
    pub fn zero(method: Method, net: &NetworkConfig, r0: i64) -> Self {
        Self {
            method,
            r0,
            per_warehouse: net
                .locals
                .iter()
                .map(|w| WarehouseWait::from_raw(&w.id, 0.0, 0.0, WaitFlags::default()))
                .collect(),
        }
    }
}

/// Everything the estimators need that does not depend on `R_0`.
#[derive(Debug, Clone)]
pub struct WaitContext {
    pub(crate) net: NetworkConfig,
    pub(crate) grid: SubbatchGrid,
    pub(crate) l0: MomentPair,
    pub(crate) l0_raw: RawMoments,
    pub(crate) residual: ResidualLifetimes,
    /// `D_0(L^_0)` in calculation units.
    pub(crate) demand_hat: MomentPair,
    /// `D_0(L~_0)` in calculation units.
    pub(crate) demand_tilde: MomentPair,
    /// `D_0(E[L_0])` in pieces, with a deterministic horizon.
    pub(crate) demand_fixed_horizon: MomentPair,
    pub kksl_orders: KkslOrderSizeModel,
}

fn horizon_from(m: MomentPair) -> Result<LeadTime> {
    if m.mean > 0.0 && m.variance > 1e-12 * m.mean * m.mean {
        LeadTime::from_moments(m)
    } else {
        LeadTime::from_moments(MomentPair::raw(m.mean, 0.0))
    }
}

impl WaitContext {
    pub fn new(net: &NetworkConfig) -> Result<Self> {
        Self::with_mode(net, UnitMode::Subbatch)
    }

    pub fn with_mode(net: &NetworkConfig, mode: UnitMode) -> Result<Self> {
        net.validate()?;
        let l0 = LeadTime::from_moments(net.central.lead)?;
        let l0_raw = l0.raw_moments();
        let residual = residual_lifetime_moments(l0_raw)?;
        let nodes = DEFAULT_QUADRATURE_NODES;
        let demand_hat = CentralDemand::compute(net, &horizon_from(residual.hat)?, mode, nodes)?.moments;
        let demand_tilde = CentralDemand::compute(net, &horizon_from(residual.tilde)?, mode, nodes)?.moments;
        let fixed = LeadTime::Deterministic(l0_raw.m1);
        let unit_fixed = CentralDemand::compute(net, &fixed, UnitMode::Unit, nodes)?.moments;
        Ok(Self {
            net: net.clone(),
            grid: SubbatchGrid { q: net.unit(mode) },
            l0: l0.moments(),
            l0_raw,
            residual,
            demand_hat,
            demand_tilde,
            demand_fixed_horizon: unit_fixed,
            kksl_orders: KkslOrderSizeModel::Fixed,
        })
    }

    pub fn network(&self) -> &NetworkConfig {
        &self.net
    }

    pub fn with_kksl_orders(mut self, model: KkslOrderSizeModel) -> Self {
        self.kksl_orders = model;
        self
    }

    pub fn estimate(&self, method: Method, r0: i64) -> Result<WaitTimeEstimate> {
        match method {
            Method::Axs => Ok(axs::estimate(self, r0)),
            Method::Kksl => kksl::estimate(self, r0),
            Method::Bf => Ok(bf::estimate(self, r0)),
            Method::Nb => Ok(nb::estimate(self, r0)),
        }
    }

    /// Calculation unit of the central echelon.
    pub(crate) fn unit(&self) -> f64 {
        self.grid.q as f64
    }
}

pub fn axs_wait(net: &NetworkConfig, r0: i64) -> Result<WaitTimeEstimate> {
    WaitContext::new(net)?.estimate(Method::Axs, r0)
}

pub fn kksl_wait(net: &NetworkConfig, r0: i64, osm: KkslOrderSizeModel) -> Result<WaitTimeEstimate> {
    WaitContext::new(net)?.with_kksl_orders(osm).estimate(Method::Kksl, r0)
}

pub fn bf_wait(net: &NetworkConfig, r0: i64) -> Result<WaitTimeEstimate> {
    WaitContext::new(net)?.estimate(Method::Bf, r0)
}

pub fn nb_wait(net: &NetworkConfig, r0: i64) -> Result<WaitTimeEstimate> {
    WaitContext::new(net)?.estimate(Method::Nb, r0)
}

/// Dispatches to one of the four estimators.
pub fn estimate(method: Method, net: &NetworkConfig, r0: i64) -> Result<WaitTimeEstimate> {
    WaitContext::new(net)?.estimate(method, r0)
}
