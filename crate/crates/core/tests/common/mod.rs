#![allow(dead_code)]

use echelon_core::distributions::quadrature::gauss_legendre;
use echelon_core::distributions::MomentPair;
use echelon_core::model::{NetworkConfig, WarehouseParams};
use echelon_core::sim::{FulfillmentEvent, NodeSnapshot, Party, SimObserver};
use rand::Rng;

/// Composite 32-point Gauss-Legendre rule on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(32);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            total += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
    }
    total * 0.5 * h
}

pub fn local(id: &str, mean: f64, variance: f64, q: u64, r: i64) -> WarehouseParams {
    WarehouseParams {
        id: id.into(),
        reorder_point: r,
        order_quantity: q,
        demand: Some(MomentPair::raw(mean, variance)),
        fill_target: 0.9,
        lead: MomentPair::raw(5.0, 9.0),
        price: 1.0,
    }
}

pub fn central(q: u64, r: i64, lead: MomentPair) -> WarehouseParams {
    WarehouseParams {
        id: "0".into(),
        reorder_point: r,
        order_quantity: q,
        demand: None,
        fill_target: 0.0,
        lead,
        price: 1.0,
    }
}

pub fn network(central: WarehouseParams, locals: Vec<WarehouseParams>) -> NetworkConfig {
    NetworkConfig::new(central, locals).expect("valid network")
}

/// Observer asserting the daily simulation invariants: inventory position in
/// `(R, R+Q]` after S4, on-hand balance, non-negative stock and strict FIFO
/// service per server.
pub struct InvariantChecker {
    last_on_hand: Vec<i64>,
    last_seq: Vec<Option<u64>>,
    pub days: u32,
    pub events: u64,
    pub violations: Vec<String>,
}

impl InvariantChecker {
    pub fn new(net: &NetworkConfig) -> Self {
        let initial = std::iter::once(&net.central).chain(&net.locals).map(|w| (w.reorder_point + 1).max(0)).collect();
        Self {
            last_on_hand: initial,
            last_seq: vec![None; net.locals.len() + 1],
            days: 0,
            events: 0,
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(msg);
        }
    }
}

impl SimObserver for InvariantChecker {
    fn on_fulfillment(&mut self, e: &FulfillmentEvent) {
        self.events += 1;
        let k = match e.server {
            Party::Central => 0,
            Party::Local(i) => i + 1,
        };
        if let Some(prev) = self.last_seq[k] {
            if e.seq <= prev {
                self.fail(format!("day {}: node {k} served seq {} after {prev}", e.day, e.seq));
            }
        }
        self.last_seq[k] = Some(e.seq);
        if e.placed > e.day {
            self.fail(format!("day {}: node {k} served an order placed on day {}", e.day, e.placed));
        }
    }

    fn on_day_end(&mut self, day: u32, nodes: &[NodeSnapshot]) {
        self.days += 1;
        for (k, s) in nodes.iter().enumerate() {
            let ip = s.inventory_position;
            if !(ip > s.reorder_point && ip <= s.reorder_point + s.order_quantity) {
                self.fail(format!("day {day}: node {k} position {ip} outside ({}, {}]", s.reorder_point, s.reorder_point + s.order_quantity));
            }
            if s.on_hand < 0 || s.backorders < 0 || s.on_order < 0 {
                self.fail(format!("day {day}: node {k} negative state {s:?}"));
            }
            let expect = self.last_on_hand[k] + s.received - s.issued;
            if s.on_hand != expect {
                self.fail(format!("day {day}: node {k} on hand {} but balance gives {expect}", s.on_hand));
            }
            if ip != s.on_hand + s.on_order - s.backorders {
                self.fail(format!("day {day}: node {k} position inconsistent"));
            }
            self.last_on_hand[k] = s.on_hand;
        }
    }

    fn wants_snapshots(&self) -> bool {
        true
    }
}

/// A random network with one to six locals and mixed demand regimes.
pub fn random_network<R: Rng>(rng: &mut R) -> NetworkConfig {
    let n = rng.random_range(1..=6);
    let base_q = [1u64, 2, 5, 10][rng.random_range(0..4)];
    let locals = (0..n)
        .map(|i| {
            let mean = rng.random_range(0.2..12.0);
            let ratio = if rng.random_bool(0.2) { 1.0 } else { rng.random_range(1.05..8.0) };
            let q = base_q * rng.random_range(1..=20);
            let r = rng.random_range(-1..(3.0 * mean * 6.0) as i64 + 2);
            let mut w = local(&(i + 1).to_string(), mean, mean * ratio, q, r);
            let lead_mean: f64 = rng.random_range(1.0..10.0);
            w.lead = MomentPair::raw(lead_mean, (rng.random_range(0.0..0.8) * lead_mean).powi(2));
            w
        })
        .collect::<Vec<_>>();
    let q0 = base_q * rng.random_range(5..=60);
    let lead_mean: f64 = rng.random_range(5.0..60.0);
    let lead = MomentPair::raw(lead_mean, (rng.random_range(0.0..0.7) * lead_mean).powi(2));
    let r0 = rng.random_range(-1..(q0 as i64 * 4));
    network(central(q0, r0, lead), locals)
}
