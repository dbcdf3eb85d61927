use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RESULTS_HEADER: [&str; 6] = ["scenario", "case", "method", "warehouse", "metric", "value"];

/// Metric names used in result files.
pub mod metric {
    pub const R0: &str = "r0";
    pub const REORDER_POINT: &str = "reorder_point";
    pub const FILL_TARGET: &str = "fill_target";
    pub const FILL_RATE_ANALYTIC: &str = "fill_rate_analytic";
    pub const FILL_RATE_SIMULATED: &str = "fill_rate_simulated";
    pub const WAIT_MEAN_COMPUTED: &str = "wait_mean_computed";
    pub const WAIT_SD_COMPUTED: &str = "wait_sd_computed";
    pub const WAIT_MEAN_SIMULATED: &str = "wait_mean_simulated";
    pub const WAIT_SD_SIMULATED: &str = "wait_sd_simulated";
    pub const AVG_ON_HAND: &str = "avg_on_hand";
    pub const AVG_BACKORDERS: &str = "avg_backorders";
    pub const Q_OVER_MU: &str = "q_over_mu";
    pub const DELTA_MU: &str = "delta_mu";
    pub const DELTA_Q: &str = "delta_q";
    pub const FLAG_NEGATIVE_VARIANCE: &str = "flag_negative_variance";
    pub const FLAG_NEGATIVE_MEAN: &str = "flag_negative_mean";
    pub const FLAG_FALLBACK: &str = "flag_fallback";
    pub const FLAG_GAMMA_FALLBACK: &str = "flag_gamma_fallback";
    pub const FLAG_INCONSISTENT_MOMENTS: &str = "flag_inconsistent_moments";
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub case: String,
    pub method: String,
    pub warehouse: String,
    pub metric: String,
    pub value: f64,
}

impl ResultRow {
    pub fn new(scenario: &str, case: &str, method: &str, warehouse: &str, metric: &str, value: f64) -> Self {
        Self {
            scenario: scenario.into(),
            case: case.into(),
            method: method.into(),
            warehouse: warehouse.into(),
            metric: metric.into(),
            value,
        }
    }
}

pub fn write_results<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(RESULTS_HEADER)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(RESULTS_HEADER) {
        return Err(Error::Schema(format!(
            "results header must be `{}`, got `{}`",
            RESULTS_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::Schema(format!("results row {}: {e}", i + 2))))
        .collect()
}

pub fn write_results_file(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_results(rows, std::io::BufWriter::new(file))
}

pub fn read_results_file(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_results(std::io::BufReader::new(file))
}

/// Identifies one warehouse of one test case under one scenario.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceKey {
    pub scenario: String,
    pub case: String,
    pub warehouse: String,
}

/// Results indexed by method and instance.
#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    values: BTreeMap<(String, InstanceKey), BTreeMap<String, f64>>,
}

impl ResultTable {
    pub fn from_rows(rows: &[ResultRow]) -> Self {
        let mut values: BTreeMap<(String, InstanceKey), BTreeMap<String, f64>> = BTreeMap::new();
        for r in rows {
            let key = InstanceKey { scenario: r.scenario.clone(), case: r.case.clone(), warehouse: r.warehouse.clone() };
            values.entry((r.method.clone(), key)).or_default().insert(r.metric.clone(), r.value);
        }
        Self { values }
    }

    pub fn get(&self, method: &str, key: &InstanceKey, metric: &str) -> Option<f64> {
        self.values.get(&(method.to_string(), key.clone())).and_then(|m| m.get(metric).copied())
    }

    /// Methods present, sorted.
    pub fn methods(&self) -> Vec<String> {
        let mut m: Vec<String> = self.values.keys().map(|(m, _)| m.clone()).collect();
        m.dedup();
        m
    }

    /// Instances of `method` together with their metrics.
    pub fn instances<'a>(&'a self, method: &'a str) -> impl Iterator<Item = (&'a InstanceKey, &'a BTreeMap<String, f64>)> + 'a {
        self.values.iter().filter(move |((m, _), _)| m == method).map(|((_, k), v)| (k, v))
    }

    /// Scenario names, sorted.
    pub fn scenarios(&self) -> Vec<String> {
        let mut s: Vec<String> = self.values.keys().map(|(_, k)| k.scenario.clone()).collect();
        s.sort();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            ResultRow::new("low", "base", "kksl", "1", metric::WAIT_MEAN_COMPUTED, 0.1 + 0.2),
            ResultRow::new("low", "n_2", "nb", "0", metric::R0, -451.0),
            ResultRow::new("high", "mu_0.25", "axs", "2", metric::WAIT_SD_SIMULATED, 1e-300),
        ];
        let mut buf = Vec::new();
        write_results(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"scenario,case,method,warehouse,metric,value\n"));
        assert_eq!(read_results(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(read_results("a,b\n1,2\n".as_bytes()), Err(Error::Schema(_))));
    }
}
