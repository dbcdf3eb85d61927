use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ExperimentOutcome;
use crate::wait_time::{Method, WaitTimeEstimate};

use super::results::{metric, InstanceKey, ResultTable};

/// Relative deviation of each value from the mean of all: `(x_i - x̄) / x̄`.
pub fn heterogeneity(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|x| (x - mean) / mean).collect()
}

/// Computed and simulated wait moments of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitComparison {
    pub key: InstanceKey,
    pub computed_mean: f64,
    pub computed_sd: f64,
    pub simulated_mean: f64,
    pub simulated_sd: f64,
    /// Other metrics of the instance, for grouping.
    pub attributes: BTreeMap<String, f64>,
}

impl WaitComparison {
    pub fn mean_error(&self) -> f64 {
        self.computed_mean - self.simulated_mean
    }

    pub fn sd_error(&self) -> f64 {
        self.computed_sd - self.simulated_sd
    }

    pub fn attribute(&self, name: &str) -> Option<f64> {
        self.attributes.get(name).copied()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    /// Mean signed error, computed minus simulated.
    pub error: f64,
    pub absolute_error: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n: usize,
    pub mean: ErrorPair,
    pub sd: ErrorPair,
}

/// Signed and absolute errors of the mean and sd over a set of instances.
pub fn error_metrics(items: &[WaitComparison]) -> ErrorReport {
    let n = items.len();
    if n == 0 {
        return ErrorReport::default();
    }
    let avg = |f: &dyn Fn(&WaitComparison) -> f64| items.iter().map(f).sum::<f64>() / n as f64;
    ErrorReport {
        n,
        mean: ErrorPair { error: avg(&|c| c.mean_error()), absolute_error: avg(&|c| c.mean_error().abs()) },
        sd: ErrorPair { error: avg(&|c| c.sd_error()), absolute_error: avg(&|c| c.sd_error().abs()) },
    }
}

/// Per-warehouse error reports.
pub fn error_metrics_by_warehouse(items: &[WaitComparison]) -> BTreeMap<String, ErrorReport> {
    let mut groups: BTreeMap<String, Vec<WaitComparison>> = BTreeMap::new();
    for c in items {
        groups.entry(c.key.warehouse.clone()).or_default().push(c.clone());
    }
    groups.into_iter().map(|(k, v)| (k, error_metrics(&v))).collect()
}

/// Pairs computed estimates with simulated outcomes of the same instance.
///
/// Each computed estimate must have a simulated counterpart with the same
/// scenario, case and warehouse ids, and vice versa.
pub fn compare_waits(
    computed: &[((String, String), WaitTimeEstimate)],
    simulated: &[((String, String), ExperimentOutcome)],
) -> Result<Vec<WaitComparison>> {
    let sims: BTreeMap<&(String, String), &ExperimentOutcome> = simulated.iter().map(|(k, v)| (k, v)).collect();
    if sims.len() != computed.len() {
        return Err(Error::KeyMismatch(format!(
            "{} computed estimates but {} simulated outcomes",
            computed.len(),
            sims.len()
        )));
    }
    let mut out = Vec::new();
    for (k, est) in computed {
        let sim = sims
            .get(k)
            .ok_or_else(|| Error::KeyMismatch(format!("no simulation for scenario `{}` case `{}`", k.0, k.1)))?;
        for w in &est.per_warehouse {
            let s = sim.local(&w.id).ok_or_else(|| {
                Error::KeyMismatch(format!("warehouse {} missing from simulation of `{}/{}`", w.id, k.0, k.1))
            })?;
            out.push(WaitComparison {
                key: InstanceKey { scenario: k.0.clone(), case: k.1.clone(), warehouse: w.id.clone() },
                computed_mean: w.mean(),
                computed_sd: w.sd(),
                simulated_mean: s.wait_mean.unwrap_or(0.0),
                simulated_sd: s.wait_sd.unwrap_or(0.0),
                attributes: BTreeMap::new(),
            });
        }
        if est.per_warehouse.len() != sim.locals.len() {
            return Err(Error::KeyMismatch(format!("warehouse sets differ for `{}/{}`", k.0, k.1)));
        }
    }
    Ok(out)
}

/// Wait comparisons of one method read back from a results table.
/// Instances without simulated waits are skipped.
pub fn comparisons_from_table(table: &ResultTable, method: &str) -> Vec<WaitComparison> {
    table
        .instances(method)
        .filter_map(|(k, m)| {
            Some(WaitComparison {
                key: k.clone(),
                computed_mean: *m.get(metric::WAIT_MEAN_COMPUTED)?,
                computed_sd: *m.get(metric::WAIT_SD_COMPUTED)?,
                simulated_mean: *m.get(metric::WAIT_MEAN_SIMULATED)?,
                simulated_sd: *m.get(metric::WAIT_SD_SIMULATED)?,
                attributes: m.clone(),
            })
        })
        .collect()
}

/// Fractions of instances where a method ranks first, at most second and
/// last by absolute error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RankFractions {
    pub best: f64,
    pub second_or_better: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub group: String,
    pub method: Method,
    pub n: usize,
    pub mean: RankFractions,
    pub sd: RankFractions,
    /// Fraction of instances where the method is best for mean and sd alike.
    pub combined_best: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub rows: Vec<RankingRow>,
    /// Groups that matched no instance.
    pub empty_groups: Vec<String>,
}

/// A named subset of instances.
pub struct Group<'a> {
    pub name: String,
    pub contains: Box<dyn Fn(&WaitComparison) -> bool + Sync + 'a>,
}

impl<'a> Group<'a> {
    pub fn new(name: &str, contains: impl Fn(&WaitComparison) -> bool + Sync + 'a) -> Self {
        Self { name: name.into(), contains: Box::new(contains) }
    }

    pub fn all() -> Self {
        Self::new("all", |_| true)
    }
}

/// Ranks of the methods for one instance; ties go to the method listed first.
fn ranks(errors: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..errors.len()).collect();
    order.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]).then(a.cmp(&b)));
    let mut rank = vec![0; errors.len()];
    for (r, &m) in order.iter().enumerate() {
        rank[m] = r;
    }
    rank
}

/// Ranks methods per instance by absolute error of mean and sd, then
/// reports per group how often each method is best, at most second and worst.
///
/// Only instances present for every method are ranked. Methods are ordered
/// as given; that order breaks ties.
pub fn ranking_report(per_method: &[(Method, Vec<WaitComparison>)], groups: &[Group<'_>]) -> Result<RankingReport> {
    if per_method.len() < 2 {
        return Err(Error::Domain("ranking needs at least two methods".into()));
    }
    let maps: Vec<BTreeMap<&InstanceKey, &WaitComparison>> =
        per_method.iter().map(|(_, v)| v.iter().map(|c| (&c.key, c)).collect()).collect();
    let common: BTreeSet<&InstanceKey> =
        maps[0].keys().copied().filter(|k| maps[1..].iter().all(|m| m.contains_key(k))).collect();
    let k = per_method.len();
    let mut report = RankingReport::default();
    for g in groups {
        let members: Vec<&InstanceKey> = common.iter().copied().filter(|key| (g.contains)(maps[0][key])).collect();
        if members.is_empty() {
            report.empty_groups.push(g.name.clone());
            continue;
        }
        let mut counts = vec![[0usize; 7]; k];
        for key in &members {
            let mean_err: Vec<f64> = maps.iter().map(|m| m[key].mean_error().abs()).collect();
            let sd_err: Vec<f64> = maps.iter().map(|m| m[key].sd_error().abs()).collect();
            let (rm, rs) = (ranks(&mean_err), ranks(&sd_err));
            for j in 0..k {
                let c = &mut counts[j];
                c[0] += usize::from(rm[j] == 0);
                c[1] += usize::from(rm[j] <= 1);
                c[2] += usize::from(rm[j] == k - 1);
                c[3] += usize::from(rs[j] == 0);
                c[4] += usize::from(rs[j] <= 1);
                c[5] += usize::from(rs[j] == k - 1);
                c[6] += usize::from(rm[j] == 0 && rs[j] == 0);
            }
        }
        let n = members.len();
        let frac = |x: usize| x as f64 / n as f64;
        for (j, (method, _)) in per_method.iter().enumerate() {
            let c = counts[j];
            report.rows.push(RankingRow {
                group: g.name.clone(),
                method: *method,
                n,
                mean: RankFractions { best: frac(c[0]), second_or_better: frac(c[1]), worst: frac(c[2]) },
                sd: RankFractions { best: frac(c[3]), second_or_better: frac(c[4]), worst: frac(c[5]) },
                combined_best: frac(c[6]),
            });
        }
    }
    Ok(report)
}

/// Average wait mean and sd of one source (the simulation or a method)
/// under one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitSummaryRow {
    pub scenario: String,
    pub source: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

pub const SIMULATION_SOURCE: &str = "simulation";

/// Averages of simulated and computed wait moments per scenario, over all
/// instances (test case and local warehouse) with a simulated wait.
///
/// Simulated values are taken once per instance from the first method that
/// has them; all methods share the simulation seed.
pub fn wait_summary(table: &ResultTable) -> Vec<WaitSummaryRow> {
    let methods = table.methods();
    let mut out = Vec::new();
    for scenario in table.scenarios() {
        let mut sim: BTreeMap<InstanceKey, (f64, f64)> = BTreeMap::new();
        let mut rows = Vec::new();
        for m in &methods {
            let items: Vec<WaitComparison> =
                comparisons_from_table(table, m).into_iter().filter(|c| c.key.scenario == scenario).collect();
            for c in &items {
                sim.entry(c.key.clone()).or_insert((c.simulated_mean, c.simulated_sd));
            }
            if !items.is_empty() {
                let n = items.len() as f64;
                rows.push(WaitSummaryRow {
                    scenario: scenario.clone(),
                    source: m.clone(),
                    n: items.len(),
                    mean: items.iter().map(|c| c.computed_mean).sum::<f64>() / n,
                    sd: items.iter().map(|c| c.computed_sd).sum::<f64>() / n,
                });
            }
        }
        if !sim.is_empty() {
            let n = sim.len() as f64;
            out.push(WaitSummaryRow {
                scenario: scenario.clone(),
                source: SIMULATION_SOURCE.into(),
                n: sim.len(),
                mean: sim.values().map(|v| v.0).sum::<f64>() / n,
                sd: sim.values().map(|v| v.1).sum::<f64>() / n,
            });
        }
        out.extend(rows);
    }
    out
}

/// Mean of simulated minus target local fill rate per scenario and method.
pub fn fill_rate_deviation(table: &ResultTable) -> Vec<(String, String, f64)> {
    let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for m in table.methods() {
        for (k, v) in table.instances(&m) {
            if let (Some(f), Some(t)) = (v.get(metric::FILL_RATE_SIMULATED), v.get(metric::FILL_TARGET)) {
                let e = acc.entry((k.scenario.clone(), m.clone())).or_default();
                e.0 += f - t;
                e.1 += 1;
            }
        }
    }
    acc.into_iter().map(|((s, m), (sum, n))| (s, m, sum / n as f64)).collect()
}

/// Mean simulated central fill rate per scenario, over test cases.
pub fn central_fill_summary(table: &ResultTable) -> Vec<(String, f64, usize)> {
    let mut acc: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for m in table.methods() {
        for (k, v) in table.instances(&m) {
            if v.contains_key(metric::R0) {
                if let Some(f) = v.get(metric::FILL_RATE_SIMULATED) {
                    acc.entry(k.scenario.clone()).or_default().entry(k.case.clone()).or_insert(*f);
                }
            }
        }
    }
    acc.into_iter()
        .map(|(s, cases)| {
            let n = cases.len();
            (s, cases.values().sum::<f64>() / n as f64, n)
        })
        .collect()
}
