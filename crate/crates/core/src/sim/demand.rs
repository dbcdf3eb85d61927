use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{fit_logarithmic_compound, CompoundPoissonLogarithmic, MomentPair, Poisson};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;

/// Customer demand of one local warehouse.
#[derive(Debug, Clone)]
pub enum DemandSource {
    /// No customers.
    Silent,
    /// Poisson number of customers, logarithmic order sizes.
    Compound(CompoundPoissonLogarithmic),
    /// Poisson number of customers ordering one piece each (used when the
    /// variance does not exceed the mean).
    PoissonUnits(Poisson),
    /// Recorded orders per day, replayed in the recorded order.
    Trace(Arc<Vec<Vec<u64>>>),
}

impl DemandSource {
    /// Random source reproducing the given daily moments.
    pub fn for_demand(m: MomentPair) -> Result<Self> {
        if m.mean <= 0.0 {
            return Ok(DemandSource::Silent);
        }
        match fit_logarithmic_compound(m) {
            Ok(c) => Ok(DemandSource::Compound(c)),
            Err(Error::VarianceNotAboveMean { .. }) => Ok(DemandSource::PoissonUnits(Poisson::new(m.mean)?)),
            Err(e) => Err(e),
        }
    }

    /// One random source per local warehouse.
    pub fn random_sources(net: &NetworkConfig) -> Result<Vec<DemandSource>> {
        net.locals.iter().map(|w| DemandSource::for_demand(w.daily_demand())).collect()
    }

    /// Number of days a trace covers (`None` for random sources).
    pub fn trace_days(&self) -> Option<usize> {
        match self {
            DemandSource::Trace(days) => Some(days.len()),
            _ => None,
        }
    }

    /// Appends the orders of `day` to `out`, in arrival order.
    #[inline]
    pub fn orders_for_day<R: Rng + ?Sized>(&self, day: usize, rng: &mut R, out: &mut Vec<u64>) {
        match self {
            DemandSource::Silent => {}
            DemandSource::Compound(c) => {
                let n = c.draw_customers(rng);
                for _ in 0..n {
                    out.push(c.draw_order_size(rng));
                }
            }
            DemandSource::PoissonUnits(p) => {
                let n = p.draw(rng);
                out.extend(std::iter::repeat_n(1, n as usize));
            }
            DemandSource::Trace(days) => {
                if let Some(orders) = days.get(day) {
                    out.extend_from_slice(orders);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TraceRow {
    day: u32,
    warehouse_id: String,
    quantity: u64,
}

/// Historical demand: per warehouse and day, the order quantities in the
/// order they occurred. CSV layout `day,warehouse_id,quantity`, day 0-based.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemandTrace {
    days: u32,
    orders: BTreeMap<String, Vec<Vec<u64>>>,
}

impl DemandTrace {
    pub fn new(days: u32) -> Self {
        Self { days, orders: BTreeMap::new() }
    }

    pub fn push(&mut self, day: u32, warehouse_id: &str, quantity: u64) {
        if day >= self.days {
            self.days = day + 1;
        }
        let per_day = self.orders.entry(warehouse_id.to_string()).or_default();
        if per_day.len() <= day as usize {
            per_day.resize(day as usize + 1, Vec::new());
        }
        per_day[day as usize].push(quantity);
    }

    pub fn days(&self) -> u32 {
        self.days
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["day", "warehouse_id", "quantity"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Schema(format!(
                "demand trace header must be `day,warehouse_id,quantity`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut trace = DemandTrace::default();
        for (line, row) in rdr.deserialize::<TraceRow>().enumerate() {
            let row = row.map_err(|e| Error::Schema(format!("demand trace row {}: {e}", line + 2)))?;
            trace.push(row.day, &row.warehouse_id, row.quantity);
        }
        Ok(trace)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["day", "warehouse_id", "quantity"])?;
        for day in 0..self.days as usize {
            for (id, per_day) in &self.orders {
                if let Some(orders) = per_day.get(day) {
                    for q in orders {
                        wtr.write_record([day.to_string(), id.clone(), q.to_string()])?;
                    }
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }

    /// Orders of one warehouse per day, padded with empty days.
    pub fn orders_of(&self, warehouse_id: &str) -> Vec<Vec<u64>> {
        let mut days = self.orders.get(warehouse_id).cloned().unwrap_or_default();
        days.resize(self.days as usize, Vec::new());
        days
    }

    /// Daily demand moments of one warehouse over `[from, to)`.
    pub fn daily_moments(&self, warehouse_id: &str, from: u32, to: u32) -> MomentPair {
        let per_day = self.orders.get(warehouse_id);
        let totals: Vec<f64> = (from..to.min(self.days))
            .map(|d| {
                per_day
                    .and_then(|p| p.get(d as usize))
                    .map_or(0.0, |o| o.iter().sum::<u64>() as f64)
            })
            .collect();
        if totals.is_empty() {
            return MomentPair::zero();
        }
        let n = totals.len() as f64;
        let mean = totals.iter().sum::<f64>() / n;
        let var = if totals.len() > 1 {
            totals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        MomentPair::raw(mean, var)
    }

    /// One trace source per local warehouse of `net`.
    pub fn sources(&self, net: &NetworkConfig) -> Vec<DemandSource> {
        net.locals.iter().map(|w| DemandSource::Trace(Arc::new(self.orders_of(&w.id)))).collect()
    }

    pub fn warehouse_ids(&self) -> impl Iterator<Item = &str> {
        self.orders.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = "day,warehouse_id,quantity\n0,1,3\n0,2,1\n0,1,2\n4,2,7\n";
        let t = DemandTrace::from_reader(text.as_bytes()).unwrap();
        assert_eq!(t.days(), 5);
        assert_eq!(t.orders_of("1")[0], vec![3, 2]);
        assert_eq!(t.orders_of("2")[4], vec![7]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let back = DemandTrace::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn bad_header_is_schema_error() {
        let text = "day,id,qty\n0,1,3\n";
        assert!(matches!(DemandTrace::from_reader(text.as_bytes()), Err(Error::Schema(_))));
    }

    #[test]
    fn daily_moments_include_empty_days() {
        let mut t = DemandTrace::new(4);
        t.push(0, "1", 4);
        t.push(2, "1", 4);
        let m = t.daily_moments("1", 0, 4);
        assert_eq!(m.mean, 2.0);
        assert!((m.variance - 16.0 / 3.0).abs() < 1e-12);
    }
}
