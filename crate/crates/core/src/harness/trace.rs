use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::planning::{local_reorder_points, CalibrationResult};
use crate::sim::{run_experiment_scheduled, DemandTrace, ExperimentOutcome, PolicySchedule, SimConfig};
use crate::wait_time::Method;

use super::scenario::{resolve_central, CentralRule};

/// Days of history used to re-estimate demand at each recalibration.
pub const DEFAULT_HISTORY_WINDOW: u32 = 365;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecalibrationOptions {
    pub method: Method,
    pub central: CentralRule,
    /// Days between recalibrations; `None` calibrates once on day 0.
    pub every: Option<u32>,
    pub history_window: u32,
}

/// Reorder points recomputed on one day.
#[derive(Debug, Clone)]
pub struct Recalibration {
    pub day: u32,
    pub net: NetworkConfig,
    pub calibration: CalibrationResult,
}

/// Demand moments observed in the trace before `day`; the configured
/// moments are kept on day 0 and for warehouses absent from the trace.
fn forecast(net: &NetworkConfig, trace: &DemandTrace, day: u32, window: u32) -> NetworkConfig {
    let mut out = net.clone();
    if day == 0 {
        return out;
    }
    let from = day.saturating_sub(window.max(1));
    let known: Vec<&str> = trace.warehouse_ids().collect();
    for w in out.locals.iter_mut() {
        if known.contains(&w.id.as_str()) {
            w.demand = Some(trace.daily_moments(&w.id, from, day));
        }
    }
    out
}

/// Calibrations on days `0, every, 2 every, ...` below `horizon`.
pub fn recalibration_plan(
    net: &NetworkConfig,
    trace: &DemandTrace,
    opts: &RecalibrationOptions,
    horizon: u32,
    search: &SimConfig,
) -> Result<Vec<Recalibration>> {
    if opts.every == Some(0) {
        return Err(Error::Config("recalibration interval must be at least one day".into()));
    }
    let step = opts.every.unwrap_or(horizon.max(1));
    let mut out = Vec::new();
    let mut day = 0;
    while day < horizon {
        let fc = forecast(net, trace, day, opts.history_window);
        let r0 = resolve_central(&fc, opts.central, search)?;
        let calibration = local_reorder_points(&fc, r0, opts.method)?;
        out.push(Recalibration { day, net: fc, calibration });
        day = day.saturating_add(step);
    }
    Ok(out)
}

/// Replays the trace with reorder points recomputed every
/// `opts.every` days from the demand seen so far.
pub fn run_trace_experiment(
    net: &NetworkConfig,
    trace: &DemandTrace,
    opts: &RecalibrationOptions,
    cfg: &SimConfig,
) -> Result<(ExperimentOutcome, Vec<Recalibration>)> {
    cfg.validate()?;
    if trace.days() < cfg.horizon {
        return Err(Error::TraceExhausted { available: trace.days(), horizon: cfg.horizon });
    }
    let plan = recalibration_plan(net, trace, opts, cfg.horizon, cfg)?;
    let first = plan.first().expect("at least day 0");
    let start = first.calibration.apply(net);
    let schedule = PolicySchedule {
        changes: plan
            .iter()
            .skip(1)
            .map(|p| {
                let mut rs = vec![p.calibration.r0];
                rs.extend(p.calibration.locals.iter().map(|l| l.reorder_point));
                (p.day, rs)
            })
            .collect(),
    };
    let sources = trace.sources(net);
    let out = run_experiment_scheduled(&start, &sources, cfg, Some(&schedule))?;
    Ok((out, plan))
}
