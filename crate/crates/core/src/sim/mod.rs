//! Daily discrete-time simulation of the two-echelon network.

mod demand;
mod engine;
mod stats;

use rayon::prelude::*;

pub use demand::{DemandSource, DemandTrace};
pub use engine::{
    run_replication, run_replication_observed, FulfillmentEvent, NoObserver, NodeSnapshot, Party, PolicySchedule,
    SimConfig, SimObserver, TransportModel,
};
pub use stats::{AggregateWarehouse, ExperimentOutcome, SampleStats, SimulationOutcome, WarehouseOutcome};

use crate::error::Result;
use crate::model::NetworkConfig;
use crate::rng::{replication_seed, rng_from_seed};

/// Runs `cfg.replications` independent replications in parallel.
///
/// Replication `r` draws from `replication_seed(cfg.seed, r)`, so results do
/// not depend on thread scheduling.
pub fn run_experiment(net: &NetworkConfig, sources: &[DemandSource], cfg: &SimConfig) -> Result<ExperimentOutcome> {
    run_experiment_scheduled(net, sources, cfg, None)
}

/// [`run_experiment`] with reorder points that change over time.
pub fn run_experiment_scheduled(
    net: &NetworkConfig,
    sources: &[DemandSource],
    cfg: &SimConfig,
    schedule: Option<&PolicySchedule>,
) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let reps = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(replication_seed(cfg.seed, r));
            run_replication_observed(net, sources, cfg, &mut rng, &mut NoObserver, schedule)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutcome::aggregate(reps))
}
