//! Analytic two-echelon inventory model: lead-time demand, inventory level,
//! order fill rate and the central lead-time demand built from the order
//! counts of the local warehouses.

mod central;
mod fill_rate;
mod ltd;
mod params;

pub use central::{
    central_ltd_moments, central_order_count_dist, central_order_sizes, CentralDemand, CentralModel,
    DEFAULT_QUADRATURE_NODES,
};
pub use fill_rate::{inventory_level_pmf, order_fill_rate, FillRateCurve, InventoryLevelPmf, OrderSizeDistribution};
pub use ltd::{lead_time_demand_local, select_ltd_distribution, CdfPrefix, LtdDistribution, LtdFamily};
pub use params::{EffectiveLeadTime, LeadTime, NetworkConfig, SubbatchGrid, UnitMode, WarehouseParams};
