use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LeadTime, NetworkConfig};

use super::demand::DemandSource;
use super::stats::{SimulationOutcome, WarehouseOutcome};

/// How transport and supplier lead times are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportModel {
    /// Gamma with the configured moments, rounded to whole days (at least one).
    #[default]
    Gamma,
    /// Always the rounded mean.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: u32,
    pub warmup: u32,
    pub replications: u32,
    pub seed: u64,
    pub transport: TransportModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { horizon: 2000, warmup: 500, replications: 100, seed: 0, transport: TransportModel::Gamma }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.warmup >= self.horizon {
            return Err(Error::Config(format!(
                "warm-up ({}) must be shorter than the horizon ({})",
                self.warmup, self.horizon
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        Ok(())
    }
}

/// Reorder points that take effect at the start of given days.
///
/// Each entry lists `[R_0, R_1, ..., R_n]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicySchedule {
    pub changes: Vec<(u32, Vec<i64>)>,
}

/// Which warehouse an event concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Central,
    Local(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FulfillmentEvent {
    pub day: u32,
    /// Warehouse that served the order.
    pub server: Party,
    /// Per-server arrival sequence number of the order.
    pub seq: u64,
    pub quantity: u64,
    pub placed: u32,
}

/// End-of-day state of one warehouse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeSnapshot {
    pub on_hand: i64,
    pub on_order: i64,
    pub backorders: i64,
    pub inventory_position: i64,
    pub reorder_point: i64,
    pub order_quantity: i64,
    /// Units received in S1 of this day.
    pub received: i64,
    /// Units issued (shipped or handed to customers) this day.
    pub issued: i64,
}

/// Hooks for inspecting a running replication.
pub trait SimObserver {
    fn on_fulfillment(&mut self, _event: &FulfillmentEvent) {}
    /// Index 0 is the central warehouse, `i + 1` local `i`.
    fn on_day_end(&mut self, _day: u32, _nodes: &[NodeSnapshot]) {}
    fn wants_snapshots(&self) -> bool {
        false
    }
}

/// Observer that ignores everything.
pub struct NoObserver;

impl SimObserver for NoObserver {}

#[derive(Debug, Clone, Copy)]
struct Pending {
    seq: u64,
    qty: u64,
    placed: u32,
    origin: usize,
}

#[derive(Debug, Clone, Copy)]
struct Arrival {
    node: usize,
    qty: u64,
    placed: u32,
}

#[derive(Debug)]
struct Node {
    r: i64,
    q: u64,
    on_hand: i64,
    on_order: i64,
    backlog_qty: i64,
    backlog: VecDeque<Pending>,
    next_seq: u64,
    received: i64,
    issued: i64,
    sum_on_hand: f64,
    sum_on_order: f64,
    sum_backorders: f64,
    out: WarehouseOutcome,
}

impl Node {
    fn new(id: &str, r: i64, q: u64) -> Self {
        Self {
            r,
            q,
            on_hand: (r + 1).max(0),
            on_order: 0,
            backlog_qty: 0,
            backlog: VecDeque::new(),
            next_seq: 0,
            received: 0,
            issued: 0,
            sum_on_hand: 0.0,
            sum_on_order: 0.0,
            sum_backorders: 0.0,
            out: WarehouseOutcome::new(id),
        }
    }

    fn position(&self) -> i64 {
        self.on_hand + self.on_order - self.backlog_qty
    }

    fn snapshot(&self) -> NodeSnapshot {
        NodeSnapshot {
            on_hand: self.on_hand,
            on_order: self.on_order,
            backorders: self.backlog_qty,
            inventory_position: self.position(),
            reorder_point: self.r,
            order_quantity: self.q as i64,
            received: self.received,
            issued: self.issued,
        }
    }

    fn finish(mut self, days: u32) -> WarehouseOutcome {
        let d = days as f64;
        self.out.avg_on_hand = self.sum_on_hand / d;
        self.out.avg_on_order = self.sum_on_order / d;
        self.out.avg_backorders = self.sum_backorders / d;
        self.out
    }
}

struct Lead {
    law: LeadTime,
    fixed: u32,
    model: TransportModel,
}

impl Lead {
    fn new(m: crate::distributions::MomentPair, model: TransportModel) -> Result<Self> {
        let law = LeadTime::from_moments(m)?;
        Ok(Self { fixed: (m.mean.round().max(1.0)) as u32, law, model })
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self.model {
            TransportModel::Gamma => self.law.sample_days(rng),
            TransportModel::Deterministic => self.fixed,
        }
    }
}

/// Runs one replication without observation.
pub fn run_replication<R: Rng + ?Sized>(
    net: &NetworkConfig,
    sources: &[DemandSource],
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<SimulationOutcome> {
    run_replication_observed(net, sources, cfg, rng, &mut NoObserver, None)
}

/// Runs one replication of the daily S1-S4 loop.
///
/// Within a day: S1 receipts; S2 the central warehouse ships local
/// backorders first-come-first-serve, then locals serve customer backorders;
/// S3 locals serve the day's customers in arrival order; S4 locals place
/// orders of `Q_i` until their position exceeds `R_i` (filled at once if the
/// central warehouse has stock and no backlog), then the central warehouse
/// orders from the supplier. Deliveries are always complete.
pub fn run_replication_observed<R: Rng + ?Sized, O: SimObserver>(
    net: &NetworkConfig,
    sources: &[DemandSource],
    cfg: &SimConfig,
    rng: &mut R,
    observer: &mut O,
    schedule: Option<&PolicySchedule>,
) -> Result<SimulationOutcome> {
    cfg.validate()?;
    net.validate()?;
    let n = net.locals.len();
    if sources.len() != n {
        return Err(Error::Config(format!("{} demand sources for {n} local warehouses", sources.len())));
    }
    for s in sources {
        if let Some(days) = s.trace_days() {
            if days < cfg.horizon as usize {
                return Err(Error::TraceExhausted { available: days as u32, horizon: cfg.horizon });
            }
        }
    }
    if let Some(s) = schedule {
        if s.changes.iter().any(|(_, rs)| rs.len() != n + 1) {
            return Err(Error::Config(format!("policy schedule entries need {} reorder points", n + 1)));
        }
    }

    let supplier = Lead::new(net.central.lead, cfg.transport)?;
    let transport = net
        .locals
        .iter()
        .map(|w| Lead::new(w.lead, cfg.transport))
        .collect::<Result<Vec<_>>>()?;
    let mut nodes: Vec<Node> = std::iter::once(&net.central)
        .chain(&net.locals)
        .map(|w| Node::new(&w.id, w.reorder_point, w.order_quantity))
        .collect();

    let horizon = cfg.horizon;
    let warmup = cfg.warmup;
    let mut calendar: Vec<Vec<Arrival>> = vec![Vec::new(); horizon as usize];
    let mut schedule_iter = schedule.map(|s| s.changes.iter().peekable());
    let mut customers: Vec<u64> = Vec::new();
    let mut snaps: Vec<NodeSnapshot> = Vec::with_capacity(n + 1);
    let watch = observer.wants_snapshots();

    for t in 0..horizon {
        if let Some(it) = schedule_iter.as_mut() {
            while let Some((_, rs)) = it.next_if(|(day, _)| *day <= t) {
                for (node, &r) in nodes.iter_mut().zip(rs) {
                    node.r = r;
                }
            }
        }
        for node in nodes.iter_mut() {
            node.received = 0;
            node.issued = 0;
        }

        // S1: receipts.
        for a in std::mem::take(&mut calendar[t as usize]) {
            let node = &mut nodes[a.node];
            node.on_hand += a.qty as i64;
            node.on_order -= a.qty as i64;
            node.received += a.qty as i64;
            if a.placed >= warmup {
                node.out.replenishment_lead.push((t - a.placed) as f64);
            }
        }

        // S2: central ships backordered local orders, oldest first.
        loop {
            let Some(&head) = nodes[0].backlog.front() else { break };
            if nodes[0].on_hand < head.qty as i64 {
                break;
            }
            nodes[0].backlog.pop_front();
            nodes[0].backlog_qty -= head.qty as i64;
            ship(&mut nodes, &mut calendar, &transport, rng, observer, head, t, warmup);
        }
        // S2: locals serve customer backorders, oldest first.
        for (i, node) in nodes.iter_mut().enumerate().skip(1) {
            while let Some(&head) = node.backlog.front() {
                if node.on_hand < head.qty as i64 {
                    break;
                }
                node.backlog.pop_front();
                node.backlog_qty -= head.qty as i64;
                node.on_hand -= head.qty as i64;
                node.issued += head.qty as i64;
                observer.on_fulfillment(&FulfillmentEvent {
                    day: t,
                    server: Party::Local(i - 1),
                    seq: head.seq,
                    quantity: head.qty,
                    placed: head.placed,
                });
            }
        }

        // S3: today's customers.
        for (i, source) in sources.iter().enumerate() {
            customers.clear();
            source.orders_for_day(t as usize, rng, &mut customers);
            let node = &mut nodes[i + 1];
            for &qty in &customers {
                if qty == 0 {
                    continue;
                }
                let seq = node.next_seq;
                node.next_seq += 1;
                let counted = t >= warmup;
                if counted {
                    node.out.total_orders += 1;
                }
                if node.backlog.is_empty() && node.on_hand >= qty as i64 {
                    node.on_hand -= qty as i64;
                    node.issued += qty as i64;
                    if counted {
                        node.out.orders_fulfilled += 1;
                    }
                    observer.on_fulfillment(&FulfillmentEvent {
                        day: t,
                        server: Party::Local(i),
                        seq,
                        quantity: qty,
                        placed: t,
                    });
                } else {
                    node.backlog.push_back(Pending { seq, qty, placed: t, origin: i });
                    node.backlog_qty += qty as i64;
                }
            }
        }

        // S4: local replenishment orders.
        for i in 0..n {
            let q = nodes[i + 1].q;
            while nodes[i + 1].position() <= nodes[i + 1].r {
                nodes[i + 1].on_order += q as i64;
                let central = &mut nodes[0];
                let seq = central.next_seq;
                central.next_seq += 1;
                let counted = t >= warmup;
                if counted {
                    central.out.total_orders += 1;
                }
                let order = Pending { seq, qty: q, placed: t, origin: i };
                if central.backlog.is_empty() && central.on_hand >= q as i64 {
                    if counted {
                        central.out.orders_fulfilled += 1;
                    }
                    ship(&mut nodes, &mut calendar, &transport, rng, observer, order, t, warmup);
                } else {
                    central.backlog.push_back(order);
                    central.backlog_qty += q as i64;
                }
            }
        }
        // S4: central replenishment from the supplier, which never delays.
        {
            let central = &mut nodes[0];
            while central.position() <= central.r {
                central.on_order += central.q as i64;
                let lead = supplier.draw(rng);
                if t >= warmup {
                    central.out.wait.push(0.0);
                }
                let due = t as u64 + lead as u64;
                if due < horizon as u64 {
                    calendar[due as usize].push(Arrival { node: 0, qty: central.q, placed: t });
                }
            }
        }

        for node in nodes.iter_mut() {
            node.sum_on_hand += node.on_hand as f64;
            node.sum_on_order += node.on_order as f64;
            node.sum_backorders += node.backlog_qty as f64;
        }
        if watch {
            snaps.clear();
            snaps.extend(nodes.iter().map(Node::snapshot));
            observer.on_day_end(t, &snaps);
        }
    }

    let mut iter = nodes.into_iter();
    let central = iter.next().expect("central node").finish(horizon);
    let locals = iter.map(|node| node.finish(horizon)).collect();
    Ok(SimulationOutcome { central, locals })
}

/// Ships a local order from central stock on day `t`.
#[allow(clippy::too_many_arguments)]
#[inline]
fn ship<R: Rng + ?Sized, O: SimObserver>(
    nodes: &mut [Node],
    calendar: &mut [Vec<Arrival>],
    transport: &[Lead],
    rng: &mut R,
    observer: &mut O,
    order: Pending,
    t: u32,
    warmup: u32,
) {
    let central = &mut nodes[0];
    central.on_hand -= order.qty as i64;
    central.issued += order.qty as i64;
    observer.on_fulfillment(&FulfillmentEvent {
        day: t,
        server: Party::Central,
        seq: order.seq,
        quantity: order.qty,
        placed: order.placed,
    });
    let lead = transport[order.origin].draw(rng);
    if order.placed >= warmup {
        nodes[order.origin + 1].out.wait.push((t - order.placed) as f64);
    }
    let due = t as u64 + lead as u64;
    if due < calendar.len() as u64 {
        calendar[due as usize].push(Arrival { node: order.origin + 1, qty: order.qty, placed: order.placed });
    }
}
