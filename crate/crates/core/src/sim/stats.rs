use serde::{Deserialize, Serialize};

/// Running count, mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl SampleStats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Sample variance (`n - 1` denominator); zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Pools two sets of samples.
    pub fn merge(&self, other: &SampleStats) -> SampleStats {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / n as f64;
        SampleStats { count: n, mean, m2 }
    }
}

/// Performance measures of one warehouse in one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarehouseOutcome {
    pub id: String,
    pub avg_on_hand: f64,
    pub avg_on_order: f64,
    pub avg_backorders: f64,
    /// Incoming orders after warm-up (customer orders for locals, local
    /// replenishment orders for the central warehouse).
    pub total_orders: u64,
    /// Of those, orders served completely on their arrival day.
    pub orders_fulfilled: u64,
    /// Time from placing a replenishment order until it was shipped.
    pub wait: SampleStats,
    /// Time from placing a replenishment order until it was received.
    pub replenishment_lead: SampleStats,
}

impl WarehouseOutcome {
    pub(crate) fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            avg_on_hand: 0.0,
            avg_on_order: 0.0,
            avg_backorders: 0.0,
            total_orders: 0,
            orders_fulfilled: 0,
            wait: SampleStats::default(),
            replenishment_lead: SampleStats::default(),
        }
    }

    /// `orders_fulfilled / total_orders`, undefined without orders.
    pub fn order_fill_rate(&self) -> Option<f64> {
        (self.total_orders > 0).then(|| self.orders_fulfilled as f64 / self.total_orders as f64)
    }
}

/// Result of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub central: WarehouseOutcome,
    pub locals: Vec<WarehouseOutcome>,
}

impl SimulationOutcome {
    pub fn local(&self, id: &str) -> Option<&WarehouseOutcome> {
        self.locals.iter().find(|w| w.id == id)
    }

    /// Unweighted mean of the local fill rates that are defined.
    pub fn mean_local_fill_rate(&self) -> Option<f64> {
        let rates: Vec<f64> = self.locals.iter().filter_map(|w| w.order_fill_rate()).collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

/// Replication averages of one warehouse's measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateWarehouse {
    pub id: String,
    pub avg_on_hand: f64,
    pub avg_on_order: f64,
    pub avg_backorders: f64,
    pub total_orders: f64,
    pub orders_fulfilled: f64,
    /// Mean of the per-replication fill rates (replications without orders skipped).
    pub fill_rate: Option<f64>,
    /// Mean of the per-replication mean waits.
    pub wait_mean: Option<f64>,
    /// Square root of the mean per-replication wait variance.
    pub wait_sd: Option<f64>,
    /// All wait samples pooled.
    pub wait_pooled: SampleStats,
}

impl AggregateWarehouse {
    pub fn from_replications(items: &[&WarehouseOutcome]) -> Self {
        let n = items.len().max(1) as f64;
        let avg = |f: fn(&WarehouseOutcome) -> f64| items.iter().map(|w| f(w)).sum::<f64>() / n;
        let mean_of = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        let with_waits: Vec<&&WarehouseOutcome> = items.iter().filter(|w| w.wait.count > 0).collect();
        Self {
            id: items.first().map(|w| w.id.clone()).unwrap_or_default(),
            avg_on_hand: avg(|w| w.avg_on_hand),
            avg_on_order: avg(|w| w.avg_on_order),
            avg_backorders: avg(|w| w.avg_backorders),
            total_orders: avg(|w| w.total_orders as f64),
            orders_fulfilled: avg(|w| w.orders_fulfilled as f64),
            fill_rate: mean_of(items.iter().filter_map(|w| w.order_fill_rate()).collect()),
            wait_mean: mean_of(with_waits.iter().map(|w| w.wait.mean).collect()),
            wait_sd: mean_of(with_waits.iter().map(|w| w.wait.variance()).collect()).map(f64::sqrt),
            wait_pooled: items.iter().fold(SampleStats::default(), |acc, w| acc.merge(&w.wait)),
        }
    }
}

/// Per-warehouse replication averages plus the replications themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub central: AggregateWarehouse,
    pub locals: Vec<AggregateWarehouse>,
    pub replications: Vec<SimulationOutcome>,
}

impl ExperimentOutcome {
    pub fn aggregate(replications: Vec<SimulationOutcome>) -> Self {
        let centrals: Vec<&WarehouseOutcome> = replications.iter().map(|r| &r.central).collect();
        let central = AggregateWarehouse::from_replications(&centrals);
        let n_locals = replications.first().map_or(0, |r| r.locals.len());
        let locals = (0..n_locals)
            .map(|i| {
                let items: Vec<&WarehouseOutcome> = replications.iter().map(|r| &r.locals[i]).collect();
                AggregateWarehouse::from_replications(&items)
            })
            .collect();
        Self { central, locals, replications }
    }

    pub fn local(&self, id: &str) -> Option<&AggregateWarehouse> {
        self.locals.iter().find(|w| w.id == id)
    }

    /// Mean over replications of the mean local fill rate.
    pub fn mean_local_fill_rate(&self) -> Option<f64> {
        let v: Vec<f64> = self.replications.iter().filter_map(|r| r.mean_local_fill_rate()).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}
