use crate::distributions::quadrature::gauss_legendre_unit;
use crate::distributions::MomentPair;
use crate::error::{Error, Result};

use super::fill_rate::{FillRateCurve, OrderSizeDistribution};
use super::ltd::{select_ltd_distribution, CdfPrefix, LtdDistribution, LtdFamily};
use super::params::{LeadTime, NetworkConfig, SubbatchGrid, UnitMode, WarehouseParams};

pub const DEFAULT_QUADRATURE_NODES: usize = 256;

/// Per-node truncation: stop once `delta(k | l)` exceeds this.
const DELTA_CUTOFF: f64 = 1.0 - 1e-9;
/// The integrated `delta` must reach this, or the tail is unresolved.
const MASS_TOLERANCE: f64 = 1e-6;

/// `delta(k | l) = (1/Q) sum_{x=1}^{Q} P(D(l) <= kQ + x - 1)` for
/// `k = 0, 1, ...` until the cutoff. Demand and `Q` are in calculation units.
fn conditional_order_counts(demand: MomentPair, l: f64, q: i64) -> Vec<f64> {
    let ltd = select_ltd_distribution(MomentPair::raw(demand.mean * l, demand.variance * l));
    let prefix = CdfPrefix::new(&ltd);
    let mut out = Vec::new();
    for k in 0.. {
        let d = prefix.sum_between(k * q, k * q + q - 1) / q as f64;
        out.push(d);
        if d > DELTA_CUTOFF || k * q > ltd.upper_support() {
            break;
        }
    }
    out
}

/// Distribution `s(k)` of the number of orders of size `Q_i` a local
/// warehouse places during the central lead time.
///
/// `delta(k)` integrates the conditional counts over the lead-time law with
/// Gauss-Legendre nodes on its quantile scale. `unit` is the calculation
/// unit (1 or the subbatch size).
pub fn central_order_count_dist(
    local: &WarehouseParams,
    l0: &LeadTime,
    unit: u64,
    nodes: usize,
) -> Result<Vec<f64>> {
    let demand = local.daily_demand().in_units_of(unit as f64);
    let q = (local.order_quantity / unit) as i64;
    if !local.order_quantity.is_multiple_of(unit) || q < 1 {
        return Err(Error::Domain(format!(
            "order quantity {} is not a multiple of unit {unit}",
            local.order_quantity
        )));
    }
    let grid: Vec<(f64, f64)> = match l0 {
        LeadTime::Deterministic(c) => vec![(*c, 1.0)],
        LeadTime::Gamma(_) => {
            let (x, w) = gauss_legendre_unit(nodes);
            x.into_iter().zip(w).map(|(u, w)| (l0.quantile(u), w)).collect()
        }
    };
    let mut delta: Vec<f64> = Vec::new();
    let mut carried = 0.0;
    for (l, w) in grid {
        let cond = conditional_order_counts(demand, l, q);
        if cond.len() > delta.len() {
            // Earlier nodes had already reached one: extend with their weight.
            delta.resize(cond.len(), carried);
        }
        for (k, slot) in delta.iter_mut().enumerate() {
            *slot += w * cond.get(k).copied().unwrap_or(1.0);
        }
        carried += w;
    }
    let reached = delta.last().copied().unwrap_or(0.0);
    if !reached.is_finite() || (reached - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::QuadratureFailure(format!(
            "order-count distribution of warehouse {} integrates to {reached}",
            local.id
        )));
    }
    let mut s = Vec::with_capacity(delta.len());
    let mut prev = 0.0;
    for d in delta {
        s.push((d - prev).max(0.0));
        prev = d;
    }
    Ok(s)
}

/// `E[D_0] = sum_i mu_i E[L]` and
/// `Var[D_0] = sum_i sum_k (mu_i E[L] - k Q_i)^2 s_i(k)`, in calculation units.
pub fn central_ltd_moments(net: &NetworkConfig, per_local: &[Vec<f64>], horizon_mean: f64, unit: u64) -> MomentPair {
    let u = unit as f64;
    let mut mean = 0.0;
    let mut var = 0.0;
    for (w, s) in net.locals.iter().zip(per_local) {
        let m = w.daily_demand().mean / u * horizon_mean;
        let q = w.order_quantity as f64 / u;
        mean += m;
        var += s.iter().enumerate().map(|(k, p)| (m - k as f64 * q).powi(2) * p).sum::<f64>();
    }
    MomentPair::raw(mean, var)
}

/// Central demand during a given horizon in calculation units.
#[derive(Debug, Clone)]
pub struct CentralDemand {
    pub unit: u64,
    pub moments: MomentPair,
    pub order_counts: Vec<Vec<f64>>,
}

impl CentralDemand {
    pub fn compute(net: &NetworkConfig, horizon: &LeadTime, mode: UnitMode, nodes: usize) -> Result<Self> {
        let unit = net.unit(mode);
        let order_counts = net
            .locals
            .iter()
            .map(|w| central_order_count_dist(w, horizon, unit, nodes))
            .collect::<Result<Vec<_>>>()?;
        let moments = central_ltd_moments(net, &order_counts, horizon.moments().mean, unit);
        Ok(Self { unit, moments, order_counts })
    }

    pub fn distribution(&self) -> LtdDistribution {
        select_ltd_distribution(self.moments)
    }
}

/// Sizes of the orders arriving at the central warehouse: `Q_i / unit`,
/// weighted by the order rates `mu_i / Q_i`.
pub fn central_order_sizes(net: &NetworkConfig, unit: u64) -> Result<OrderSizeDistribution> {
    let atoms: Vec<(i64, f64)> = net
        .locals
        .iter()
        .filter(|w| w.daily_demand().mean > 0.0)
        .map(|w| ((w.order_quantity / unit) as i64, w.daily_demand().mean / w.order_quantity as f64))
        .collect();
    if atoms.is_empty() {
        return Ok(OrderSizeDistribution::unit());
    }
    OrderSizeDistribution::new(atoms)
}

/// Analytic model of the central warehouse: lead-time demand and fill rate
/// as a function of `R_0`.
#[derive(Debug, Clone)]
pub struct CentralModel {
    pub mode: UnitMode,
    pub grid: SubbatchGrid,
    pub demand: CentralDemand,
    pub family: LtdFamily,
    curve: FillRateCurve,
}

impl CentralModel {
    pub fn new(net: &NetworkConfig, mode: UnitMode) -> Result<Self> {
        Self::with_nodes(net, mode, DEFAULT_QUADRATURE_NODES)
    }

    pub fn with_nodes(net: &NetworkConfig, mode: UnitMode, nodes: usize) -> Result<Self> {
        let l0 = LeadTime::from_moments(net.central.lead)?;
        let demand = CentralDemand::compute(net, &l0, mode, nodes)?;
        let unit = demand.unit;
        let ltd = demand.distribution();
        let sizes = central_order_sizes(net, unit)?;
        let curve = FillRateCurve::new(net.central.order_quantity / unit, &ltd, sizes);
        Ok(Self { mode, grid: SubbatchGrid { q: unit }, family: ltd.family(), demand, curve })
    }

    /// Analytic central order fill rate at a reorder point given in pieces.
    pub fn fill_rate(&self, r0_units: i64) -> f64 {
        self.curve.at(self.grid.to_grid(r0_units))
    }

    /// Fill rate at a reorder point on the calculation grid.
    pub fn fill_rate_grid(&self, r_grid: i64) -> f64 {
        self.curve.at(r_grid)
    }

    /// Lead-time demand moments in pieces.
    pub fn ltd_units(&self) -> MomentPair {
        let u = self.demand.unit as f64;
        MomentPair::raw(self.demand.moments.mean * u, self.demand.moments.variance * u * u)
    }
}
