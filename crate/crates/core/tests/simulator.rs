mod common;

use std::sync::Arc;

use echelon_core::distributions::MomentPair;
use echelon_core::model::{EffectiveLeadTime, NetworkConfig};
use echelon_core::planning::LocalFillModel;
use echelon_core::rng::{replication_seed, rng_from_seed};
use echelon_core::sim::*;
use echelon_core::Error;
use rand::Rng;

use common::{central, local, network, random_network, InvariantChecker};

fn cfg(horizon: u32, warmup: u32, replications: u32, seed: u64) -> SimConfig {
    SimConfig { horizon, warmup, replications, seed, ..Default::default() }
}

/// One local warehouse behind a central warehouse that never runs out.
fn ample(w: echelon_core::model::WarehouseParams) -> NetworkConfig {
    network(central(w.order_quantity, 10_000_000, MomentPair::raw(10.0, 0.0)), vec![w])
}

#[test]
fn invariants_hold_on_the_base_network() {
    let net = NetworkConfig::reference();
    let mut net = net.clone();
    net.central.reorder_point = 1999;
    for (w, r) in net.locals.iter_mut().zip([20, 30, 45, 55, 70, 80, 95, 110]) {
        w.reorder_point = r;
    }
    let sources = DemandSource::random_sources(&net).unwrap();
    let c = cfg(2000, 500, 1, 9);
    let mut check = InvariantChecker::new(&net);
    run_replication_observed(&net, &sources, &c, &mut rng_from_seed(9), &mut check, None).unwrap();
    assert_eq!(check.days, 2000);
    assert!(check.events > 10_000);
    assert!(check.violations.is_empty(), "{:#?}", check.violations);
}

#[test]
fn invariants_hold_on_random_networks() {
    let mut gen = rng_from_seed(2024);
    for k in 0..20 {
        let net = random_network(&mut gen);
        let sources = DemandSource::random_sources(&net).unwrap();
        let c = cfg(400, 100, 1, k);
        let mut check = InvariantChecker::new(&net);
        run_replication_observed(&net, &sources, &c, &mut rng_from_seed(k), &mut check, None).unwrap();
        assert!(check.violations.is_empty(), "network {k}: {:#?}", check.violations);
    }
}

#[test]
fn replay_is_deterministic() {
    let net = NetworkConfig::reference();
    let sources = DemandSource::random_sources(&net).unwrap();
    let c = cfg(600, 100, 4, 77);
    let a = run_experiment(&net, &sources, &c).unwrap();
    let b = run_experiment(&net, &sources, &c).unwrap();
    assert_eq!(a, b);
    let other = run_experiment(&net, &sources, &SimConfig { seed: 78, ..c }).unwrap();
    assert_ne!(a.central, other.central);
}

#[test]
fn single_replication_experiment_matches_run_replication() {
    let net = NetworkConfig::reference();
    let sources = DemandSource::random_sources(&net).unwrap();
    let c = cfg(500, 100, 1, 5);
    let exp = run_experiment(&net, &sources, &c).unwrap();
    let mut rng = rng_from_seed(replication_seed(5, 0));
    let one = run_replication(&net, &sources, &c, &mut rng).unwrap();
    assert_eq!(exp.replications, vec![one.clone()]);
    assert_eq!(exp.central.fill_rate, one.central.order_fill_rate());
    assert_eq!(exp.locals[3].avg_on_hand, one.locals[3].avg_on_hand);
}

#[test]
fn zero_demand_reports_no_orders() {
    let net = ample(local("1", 0.0, 0.0, 5, 3));
    let sources = DemandSource::random_sources(&net).unwrap();
    let out = run_experiment(&net, &sources, &cfg(100, 10, 3, 1)).unwrap();
    let w = &out.locals[0];
    assert_eq!(w.total_orders, 0.0);
    assert_eq!(w.fill_rate, None);
    assert_eq!(w.wait_mean, None);
    assert_eq!(w.avg_on_hand, 4.0);
}

#[test]
fn deterministic_unit_demand_never_waits() {
    let net = ample(local("1", 1.0, 0.0, 1, 50));
    let trace = DemandSource::Trace(Arc::new(vec![vec![1]; 1000]));
    let out = run_replication(&net, &[trace], &cfg(1000, 200, 1, 0), &mut rng_from_seed(0)).unwrap();
    let w = &out.locals[0];
    assert_eq!(w.total_orders, 800);
    assert_eq!(w.order_fill_rate(), Some(1.0));
    assert_eq!(w.wait.count, 800);
    assert_eq!(w.wait.mean, 0.0);
}

/// Central replenishment orders never wait; their lead times are recorded
/// separately.
#[test]
fn central_orders_never_wait() {
    let net = NetworkConfig::reference();
    let mut net = net.clone();
    net.central.reorder_point = 999;
    let sources = DemandSource::random_sources(&net).unwrap();
    let out = run_experiment(&net, &sources, &cfg(2000, 500, 5, 3)).unwrap();
    assert!(out.central.wait_pooled.count > 50);
    assert_eq!(out.central.wait_pooled.mean, 0.0);
    let leads = out.replications.iter().fold(SampleStats::default(), |acc, r| acc.merge(&r.central.replenishment_lead));
    assert!((leads.mean - 60.0).abs() < 6.0, "{}", leads.mean);
}

/// A local warehouse with zero wait behaves like a single-echelon (R,Q)
/// system: the analytic order fill rate is the oracle.
#[test]
fn single_echelon_fill_rate_matches_analytic() {
    let w = NetworkConfig::reference().locals[0].clone();
    let model = LocalFillModel::new(&w, &EffectiveLeadTime::without_wait(w.lead)).unwrap();
    let r = model.reorder_point(w.order_quantity, 0.9).unwrap();
    let mut w = w;
    w.reorder_point = r;
    let net = ample(w);
    let sources = DemandSource::random_sources(&net).unwrap();
    let out = run_experiment(&net, &sources, &cfg(2000, 500, 100, 11)).unwrap();
    let sim = out.locals[0].fill_rate.unwrap();
    assert!((sim - model.fill_rate(r)).abs() <= 0.02, "R={r}: simulated {sim}, analytic {}", model.fill_rate(r));
    assert_eq!(out.locals[0].wait_pooled.mean, 0.0);
}

/// At stationarity the inventory position is close to uniform on (R, R+Q].
#[test]
fn inventory_position_is_uniform() {
    struct Counter {
        warmup: u32,
        r: i64,
        counts: Vec<u64>,
    }
    impl SimObserver for Counter {
        fn on_day_end(&mut self, day: u32, nodes: &[NodeSnapshot]) {
            if day >= self.warmup {
                self.counts[(nodes[1].inventory_position - self.r - 1) as usize] += 1;
            }
        }
        fn wants_snapshots(&self) -> bool {
            true
        }
    }
    let q = 12;
    let net = ample(local("1", 3.0, 9.0, q, 7));
    let sources = DemandSource::random_sources(&net).unwrap();
    let c = cfg(200_000, 1000, 1, 21);
    let mut counter = Counter { warmup: 1000, r: 7, counts: vec![0; q as usize] };
    run_replication_observed(&net, &sources, &c, &mut rng_from_seed(21), &mut counter, None).unwrap();
    let total: u64 = counter.counts.iter().sum();
    let expected = total as f64 / q as f64;
    // Chi-square distance per observation; days are correlated, so this is
    // compared against a fixed threshold rather than a chi-square quantile.
    let dist: f64 = counter.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>() / total as f64;
    assert!(dist < 1e-3, "distance {dist}: {:?}", counter.counts);
}

#[test]
fn trace_orders_replay_in_recorded_order() {
    struct Log(Vec<u64>);
    impl SimObserver for Log {
        fn on_fulfillment(&mut self, e: &FulfillmentEvent) {
            if e.server == Party::Local(0) {
                self.0.push(e.quantity);
            }
        }
    }
    let mut rng = rng_from_seed(4);
    let days: Vec<Vec<u64>> =
        (0..300).map(|_| (0..rng.random_range(0..4)).map(|_| rng.random_range(1..6)).collect()).collect();
    let flat: Vec<u64> = days.iter().flatten().copied().collect();
    let net = ample(local("1", 2.0, 4.0, 5, 500));
    let mut log = Log(Vec::new());
    let src = DemandSource::Trace(Arc::new(days));
    run_replication_observed(&net, &[src], &cfg(300, 10, 1, 0), &mut rng_from_seed(0), &mut log, None).unwrap();
    assert_eq!(log.0, flat);
}

#[test]
fn trace_file_round_trip_and_exhaustion() {
    let mut trace = DemandTrace::new(0);
    trace.push(0, "1", 3);
    trace.push(0, "1", 1);
    trace.push(2, "2", 4);
    trace.push(9, "1", 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    trace.write(std::fs::File::create(&path).unwrap()).unwrap();
    let back = DemandTrace::from_path(&path).unwrap();
    assert_eq!(back, trace);
    assert_eq!(back.days(), 10);
    assert_eq!(back.orders_of("2")[2], vec![4]);

    let net = network(central(10, 50, MomentPair::raw(5.0, 0.0)), vec![local("1", 1.0, 2.0, 5, 2), local("2", 1.0, 2.0, 5, 2)]);
    let err = run_replication(&net, &back.sources(&net), &cfg(20, 5, 1, 0), &mut rng_from_seed(0)).unwrap_err();
    assert_eq!(err, Error::TraceExhausted { available: 10, horizon: 20 });

    let bad = "day,warehouse,quantity\n0,1,1\n";
    assert!(matches!(DemandTrace::from_reader(bad.as_bytes()), Err(Error::Schema(_))));
    let bad = "day,warehouse_id,quantity\n-1,1,1\n";
    assert!(matches!(DemandTrace::from_reader(bad.as_bytes()), Err(Error::Schema(_))));
}

#[test]
fn invalid_configurations_are_rejected() {
    let net = NetworkConfig::reference();
    let sources = DemandSource::random_sources(&net).unwrap();
    for c in [cfg(100, 100, 1, 0), cfg(0, 0, 1, 0), cfg(100, 10, 0, 0)] {
        assert!(matches!(run_experiment(&net, &sources, &c), Err(Error::Config(_))));
    }
    assert!(matches!(run_experiment(&net, &sources[..3], &cfg(100, 10, 1, 0)), Err(Error::Config(_))));
    let schedule = PolicySchedule { changes: vec![(10, vec![1, 2])] };
    let r = run_experiment_scheduled(&net, &sources, &cfg(100, 10, 1, 0), Some(&schedule));
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn policy_schedule_switches_reorder_points() {
    struct Rs(Vec<i64>);
    impl SimObserver for Rs {
        fn on_day_end(&mut self, _day: u32, nodes: &[NodeSnapshot]) {
            self.0.push(nodes[1].reorder_point);
        }
        fn wants_snapshots(&self) -> bool {
            true
        }
    }
    let net = ample(local("1", 2.0, 4.0, 5, 10));
    let schedule = PolicySchedule { changes: vec![(50, vec![10_000_000, 20])] };
    let sources = DemandSource::random_sources(&net).unwrap();
    let mut rs = Rs(Vec::new());
    run_replication_observed(&net, &sources, &cfg(100, 10, 1, 0), &mut rng_from_seed(0), &mut rs, Some(&schedule))
        .unwrap();
    assert!(rs.0[..50].iter().all(|&r| r == 10));
    assert!(rs.0[50..].iter().all(|&r| r == 20));
}

#[test]
fn fill_rates_are_fractions() {
    let mut gen = rng_from_seed(99);
    for k in 0..5 {
        let net = random_network(&mut gen);
        let sources = DemandSource::random_sources(&net).unwrap();
        let out = run_experiment(&net, &sources, &cfg(300, 50, 3, k)).unwrap();
        for w in out.locals.iter().chain(std::iter::once(&out.central)) {
            if let Some(f) = w.fill_rate {
                assert!((0.0..=1.0).contains(&f));
            }
            if let Some(sd) = w.wait_sd {
                assert!(sd >= 0.0);
            }
            assert!(w.orders_fulfilled <= w.total_orders);
        }
    }
}
