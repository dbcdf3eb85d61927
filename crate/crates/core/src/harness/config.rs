use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::MomentPair;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, WarehouseParams};
use crate::sim::SimConfig;

use super::grid::{default_variations, Variation};
use super::scenario::{default_scenarios, CentralScenario};

fn default_central_id() -> String {
    "0".into()
}

fn default_price() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralEntry {
    #[serde(default = "default_central_id")]
    pub id: String,
    pub order_quantity: u64,
    pub lead_mean: f64,
    pub lead_sd: f64,
    #[serde(default = "default_price")]
    pub price: f64,
    /// Fixed central reorder point used instead of a fill-rate target.
    #[serde(default, rename = "central_R_override", skip_serializing_if = "Option::is_none")]
    pub central_r_override: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalEntry {
    pub id: String,
    pub mean: f64,
    pub variance: f64,
    pub order_quantity: u64,
    pub fill_target: f64,
    pub lead_mean: f64,
    pub lead_sd: f64,
    #[serde(default = "default_price")]
    pub price: f64,
    #[serde(default)]
    pub reorder_point: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub horizon: u32,
    pub warmup: u32,
    pub replications: u32,
    pub seed: u64,
    /// Replications per evaluation when searching `R_0` by simulation.
    pub search_replications: u32,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self { horizon: d.horizon, warmup: d.warmup, replications: d.replications, seed: d.seed, search_replications: 20 }
    }
}

impl SimulationSection {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            warmup: self.warmup,
            replications: self.replications,
            seed: self.seed,
            ..SimConfig::default()
        }
    }
}

/// Scenario file: one `[central]` block, one `[[local]]` block per local
/// warehouse, optional `[[variation]]` and `[[scenario]]` lists and a
/// `[simulation]` section.
///
/// ```toml
/// [central]
/// order_quantity = 500
/// lead_mean = 60
/// lead_sd = 30
///
/// [[local]]
/// id = "1"
/// mean = 2
/// variance = 4
/// order_quantity = 50
/// fill_target = 0.9
/// lead_mean = 5
/// lead_sd = 3
///
/// [[variation]]
/// parameter = "q_central"
/// kind = "multiplicative"
/// values = [0.5, 2]
///
/// [[scenario]]
/// name = "low"
/// central_target = 0.2
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub simulation: SimulationSection,
    pub central: CentralEntry,
    #[serde(rename = "local")]
    pub locals: Vec<LocalEntry>,
    #[serde(default, rename = "variation", skip_serializing_if = "Vec::is_empty")]
    pub variations: Vec<Variation>,
    #[serde(default, rename = "scenario", skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<CentralScenario>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.network()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// The base network with the reorder points given in the file.
    pub fn network(&self) -> Result<NetworkConfig> {
        let c = &self.central;
        let central = WarehouseParams {
            id: c.id.clone(),
            reorder_point: c.central_r_override.unwrap_or(0),
            order_quantity: c.order_quantity,
            demand: None,
            fill_target: 0.0,
            lead: MomentPair::raw(c.lead_mean, c.lead_sd * c.lead_sd),
            price: c.price,
        };
        let locals = self
            .locals
            .iter()
            .map(|w| WarehouseParams {
                id: w.id.clone(),
                reorder_point: w.reorder_point,
                order_quantity: w.order_quantity,
                demand: Some(MomentPair::raw(w.mean, w.variance)),
                fill_target: w.fill_target,
                lead: MomentPair::raw(w.lead_mean, w.lead_sd * w.lead_sd),
                price: w.price,
            })
            .collect();
        NetworkConfig::new(central, locals)
    }

    /// Declared variations, or the standard 39 when none are given.
    pub fn variations_or_default(&self) -> Vec<Variation> {
        if self.variations.is_empty() {
            default_variations()
        } else {
            self.variations.clone()
        }
    }

    /// Declared scenarios, or the standard four when none are given.
    pub fn scenarios_or_default(&self) -> Vec<CentralScenario> {
        if self.scenarios.is_empty() {
            default_scenarios()
        } else {
            self.scenarios.clone()
        }
    }

    /// The base network of the experiments as a config file.
    pub fn reference() -> Self {
        let net = NetworkConfig::reference();
        Self::from_network(&net)
    }

    pub fn from_network(net: &NetworkConfig) -> Self {
        let c = &net.central;
        Self {
            simulation: SimulationSection::default(),
            central: CentralEntry {
                id: c.id.clone(),
                order_quantity: c.order_quantity,
                lead_mean: c.lead.mean,
                lead_sd: c.lead.sd(),
                price: c.price,
                central_r_override: None,
            },
            locals: net
                .locals
                .iter()
                .map(|w| LocalEntry {
                    id: w.id.clone(),
                    mean: w.daily_demand().mean,
                    variance: w.daily_demand().variance,
                    order_quantity: w.order_quantity,
                    fill_target: w.fill_target,
                    lead_mean: w.lead.mean,
                    lead_sd: w.lead.sd(),
                    price: w.price,
                    reorder_point: w.reorder_point,
                })
                .collect(),
            variations: Vec::new(),
            scenarios: Vec::new(),
        }
    }
}
