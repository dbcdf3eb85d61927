use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CentralModel, NetworkConfig, UnitMode};
use crate::planning::{local_reorder_points_for_wait, CalibrationResult};
use crate::rng::stream_seed;
use crate::sim::{run_experiment, DemandSource, ExperimentOutcome, SimConfig};
use crate::wait_time::{Method, WaitContext};

use super::grid::ScenarioSpec;
use super::metrics::heterogeneity;
use super::results::{metric, ResultRow};
use super::scenario::{resolve_central, CentralScenario};

/// Everything needed to run the scenario grid.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub grid: Vec<ScenarioSpec>,
    pub scenarios: Vec<CentralScenario>,
    pub methods: Vec<Method>,
    pub sim: SimConfig,
    /// Replications per evaluation in simulation-based `R_0` searches.
    pub search_replications: u32,
}

/// A failed unit of work; the rest of the experiment carries on.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFailure {
    pub scenario: String,
    pub case: String,
    pub method: Option<Method>,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResults {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CaseFailure>,
}

/// Rows describing a calibrated and simulated network.
pub fn outcome_rows(
    scenario: &str,
    case: &str,
    net: &NetworkConfig,
    central_fill_analytic: Option<f64>,
    cal: &CalibrationResult,
    sim: Option<&ExperimentOutcome>,
) -> Vec<ResultRow> {
    let method = cal.wait.method.tag();
    let mut rows = Vec::new();
    let mut push = |wh: &str, m: &str, v: f64| {
        if v.is_finite() {
            rows.push(ResultRow::new(scenario, case, method, wh, m, v));
        }
    };
    let cid = net.central.id.as_str();
    push(cid, metric::R0, cal.r0 as f64);
    if let Some(f) = central_fill_analytic {
        push(cid, metric::FILL_RATE_ANALYTIC, f);
    }
    if let Some(s) = sim {
        if let Some(f) = s.central.fill_rate {
            push(cid, metric::FILL_RATE_SIMULATED, f);
        }
        push(cid, metric::AVG_ON_HAND, s.central.avg_on_hand);
    }
    let mus: Vec<f64> = net.locals.iter().map(|w| w.daily_demand().mean).collect();
    let qs: Vec<f64> = net.locals.iter().map(|w| w.order_quantity as f64).collect();
    let (d_mu, d_q) = (heterogeneity(&mus), heterogeneity(&qs));
    for (i, (w, c)) in net.locals.iter().zip(&cal.locals).enumerate() {
        let id = w.id.as_str();
        push(id, metric::REORDER_POINT, c.reorder_point as f64);
        push(id, metric::FILL_TARGET, w.fill_target);
        push(id, metric::FILL_RATE_ANALYTIC, c.fill_rate);
        push(id, metric::Q_OVER_MU, qs[i] / mus[i]);
        push(id, metric::DELTA_MU, d_mu[i]);
        push(id, metric::DELTA_Q, d_q[i]);
        if let Some(wt) = cal.wait.get(id) {
            push(id, metric::WAIT_MEAN_COMPUTED, wt.mean());
            push(id, metric::WAIT_SD_COMPUTED, wt.sd());
            let f = &wt.flags;
            push(id, metric::FLAG_NEGATIVE_VARIANCE, f64::from(u8::from(f.negative_variance)));
            push(id, metric::FLAG_NEGATIVE_MEAN, f64::from(u8::from(f.negative_mean)));
            push(id, metric::FLAG_FALLBACK, f64::from(u8::from(f.fallback)));
            push(id, metric::FLAG_GAMMA_FALLBACK, f64::from(u8::from(f.gamma_fallback)));
            push(id, metric::FLAG_INCONSISTENT_MOMENTS, f64::from(u8::from(f.inconsistent_moments)));
        }
        if let Some(a) = sim.and_then(|s| s.locals.get(i)) {
            if let Some(f) = a.fill_rate {
                push(id, metric::FILL_RATE_SIMULATED, f);
            }
            if let (Some(m), Some(sd)) = (a.wait_mean, a.wait_sd) {
                push(id, metric::WAIT_MEAN_SIMULATED, m);
                push(id, metric::WAIT_SD_SIMULATED, sd);
            }
            push(id, metric::AVG_ON_HAND, a.avg_on_hand);
            push(id, metric::AVG_BACKORDERS, a.avg_backorders);
        }
    }
    rows
}

fn run_unit(plan: &ExperimentPlan, scenario: &CentralScenario, spec: &ScenarioSpec) -> ExperimentResults {
    let mut out = ExperimentResults::default();
    let fail = |method: Option<Method>, error: Error| CaseFailure {
        scenario: scenario.name.clone(),
        case: spec.case.clone(),
        method,
        error,
    };
    let label = format!("{}/{}", scenario.name, spec.case);
    let seed = stream_seed(plan.sim.seed, &label);
    let prepared = (|| {
        let rule = scenario.rule()?;
        let search =
            SimConfig { replications: plan.search_replications.max(1), seed: stream_seed(seed, "search"), ..plan.sim };
        let r0 = resolve_central(&spec.net, rule, &search)?;
        let central = CentralModel::new(&spec.net, UnitMode::Subbatch)?;
        let ctx = WaitContext::new(&spec.net)?;
        let sources = DemandSource::random_sources(&spec.net)?;
        Ok::<_, Error>((r0, central.fill_rate(r0), ctx, sources))
    })();
    let (r0, central_fill, ctx, sources) = match prepared {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{label}: {e}");
            out.failures.push(fail(None, e));
            return out;
        }
    };
    for &method in &plan.methods {
        let run = || -> Result<Vec<ResultRow>> {
            let wait = ctx.estimate(method, r0)?;
            let cal = local_reorder_points_for_wait(&spec.net, wait)?;
            let net = cal.apply(&spec.net);
            // Same seed for every method: the simulated waits coincide.
            let sim = run_experiment(&net, &sources, &SimConfig { seed, ..plan.sim })?;
            Ok(outcome_rows(&scenario.name, &spec.case, &net, Some(central_fill), &cal, Some(&sim)))
        };
        match run() {
            Ok(rows) => out.rows.extend(rows),
            Err(e) => {
                log::warn!("{label} {method}: {e}");
                out.failures.push(fail(Some(method), e));
            }
        }
    }
    out
}

/// Calibrates and simulates every scenario, test case and method.
///
/// Failures are collected per unit; rows come out in scenario, case and
/// method order regardless of scheduling.
pub fn run_grid_experiment(plan: &ExperimentPlan) -> Result<ExperimentResults> {
    plan.sim.validate()?;
    if plan.methods.is_empty() {
        return Err(Error::Config("no wait-time method selected".into()));
    }
    for s in &plan.scenarios {
        s.rule()?;
    }
    let units: Vec<(&CentralScenario, &ScenarioSpec)> =
        plan.scenarios.iter().flat_map(|s| plan.grid.iter().map(move |c| (s, c))).collect();
    let parts: Vec<ExperimentResults> = units.par_iter().map(|(s, c)| run_unit(plan, s, c)).collect();
    let mut all = ExperimentResults::default();
    for p in parts {
        all.rows.extend(p.rows);
        all.failures.extend(p.failures);
    }
    Ok(all)
}
