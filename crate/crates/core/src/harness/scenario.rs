use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CentralModel, NetworkConfig, UnitMode};
use crate::planning::{central_reorder_point_with, min_satisfying};
use crate::sim::{run_experiment, DemandSource, SimConfig};

/// How a scenario fixes the central reorder point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentralRule {
    /// Minimal `R_0` with analytic central fill rate at least this.
    AnalyticTarget(f64),
    /// `R_0` given directly.
    Fixed(i64),
    /// Minimal `R_0` whose simulated central fill rate reaches this.
    SimulatedTarget(f64),
}

/// A named central stocking level. Exactly one of the three fields is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralScenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_target: Option<f64>,
    #[serde(default, rename = "central_R", skip_serializing_if = "Option::is_none")]
    pub central_r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulated_central_target: Option<f64>,
}

impl CentralScenario {
    pub fn analytic(name: &str, target: f64) -> Self {
        Self { name: name.into(), central_target: Some(target), central_r: None, simulated_central_target: None }
    }

    pub fn fixed(name: &str, r0: i64) -> Self {
        Self { name: name.into(), central_target: None, central_r: Some(r0), simulated_central_target: None }
    }

    pub fn simulated(name: &str, target: f64) -> Self {
        Self { name: name.into(), central_target: None, central_r: None, simulated_central_target: Some(target) }
    }

    pub fn rule(&self) -> Result<CentralRule> {
        match (self.central_target, self.central_r, self.simulated_central_target) {
            (Some(t), None, None) => Ok(CentralRule::AnalyticTarget(t)),
            (None, Some(r), None) => Ok(CentralRule::Fixed(r)),
            (None, None, Some(t)) => Ok(CentralRule::SimulatedTarget(t)),
            _ => Err(Error::Config(format!(
                "scenario `{}` needs exactly one of central_target, central_R, simulated_central_target",
                self.name
            ))),
        }
    }
}

/// Scenarios named after the central fill rates they produce in simulation:
/// analytic targets 20%, 40% and 95%, plus a level found by simulation.
pub fn default_scenarios() -> Vec<CentralScenario> {
    vec![
        CentralScenario::analytic("low", 0.2),
        CentralScenario::analytic("medium_low", 0.4),
        CentralScenario::analytic("medium_high", 0.95),
        CentralScenario::simulated("high", 0.95),
    ]
}

/// Mean simulated central fill rate at `r0`.
pub fn simulated_central_fill_rate(net: &NetworkConfig, r0: i64, cfg: &SimConfig) -> Result<f64> {
    let mut net = net.clone();
    net.central.reorder_point = r0;
    let sources = DemandSource::random_sources(&net)?;
    let out = run_experiment(&net, &sources, cfg)?;
    Ok(out.central.fill_rate.unwrap_or(1.0))
}

/// Central reorder point for `rule`; `search` configures the simulations of
/// [`CentralRule::SimulatedTarget`].
pub fn resolve_central(net: &NetworkConfig, rule: CentralRule, search: &SimConfig) -> Result<i64> {
    match rule {
        CentralRule::Fixed(r) => Ok(r),
        CentralRule::AnalyticTarget(t) => {
            let model = CentralModel::new(net, UnitMode::Subbatch)?;
            central_reorder_point_with(&model, net, t)
        }
        CentralRule::SimulatedTarget(t) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Domain(format!("simulated central target {t} outside (0,1]")));
            }
            let model = CentralModel::new(net, UnitMode::Subbatch)?;
            let grid = model.grid;
            let q0 = net.central.order_quantity as i64;
            let lo = grid.to_grid(-q0) + 1;
            let start = central_reorder_point_with(&model, net, t.min(0.999))?;
            let hi = grid.to_grid(start).max(lo + 1);
            // Common random numbers across evaluations keep the search stable.
            let eval = |r: i64| simulated_central_fill_rate(net, grid.to_units(r), search);
            let cache = std::sync::Mutex::new(std::collections::HashMap::new());
            let failure = std::sync::Mutex::new(None);
            let ok = |r: i64| {
                if let Some(&v) = cache.lock().expect("cache").get(&r) {
                    return v >= t;
                }
                match eval(r) {
                    Ok(v) => {
                        cache.lock().expect("cache").insert(r, v);
                        v >= t
                    }
                    Err(e) => {
                        *failure.lock().expect("failure") = Some(e);
                        true
                    }
                }
            };
            let r = min_satisfying(lo, hi, t, ok)?;
            if let Some(e) = failure.into_inner().expect("failure") {
                return Err(e);
            }
            Ok(grid.to_units(r))
        }
    }
}
