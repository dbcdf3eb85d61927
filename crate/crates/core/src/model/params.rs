use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{gamma_from_moments, ContinuousDistribution, Gamma, MomentPair, RawMoments};
use crate::error::{Error, Result};

/// Policy and demand data of one warehouse.
///
/// `demand` is per day and absent for the central warehouse. `lead` is the
/// transport time in days (supplier lead time for the central warehouse).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarehouseParams {
    pub id: String,
    pub reorder_point: i64,
    pub order_quantity: u64,
    pub demand: Option<MomentPair>,
    pub fill_target: f64,
    pub lead: MomentPair,
    pub price: f64,
}

impl WarehouseParams {
    pub fn validate(&self) -> Result<()> {
        if self.order_quantity < 1 {
            return Err(Error::Config(format!("warehouse {}: order quantity must be >= 1", self.id)));
        }
        if !(0.0..=1.0).contains(&self.fill_target) {
            return Err(Error::Config(format!(
                "warehouse {}: fill target {} outside [0,1]",
                self.id, self.fill_target
            )));
        }
        if !(self.lead.mean > 0.0) || self.lead.variance < 0.0 {
            return Err(Error::Config(format!("warehouse {}: lead time mean must be > 0", self.id)));
        }
        if let Some(d) = self.demand {
            if d.mean < 0.0 || d.variance < 0.0 || !d.mean.is_finite() || !d.variance.is_finite() {
                return Err(Error::Config(format!("warehouse {}: invalid demand moments", self.id)));
            }
        }
        Ok(())
    }

    /// Daily demand moments (zero for a warehouse without customer demand).
    pub fn daily_demand(&self) -> MomentPair {
        self.demand.unwrap_or(MomentPair::zero())
    }
}

/// A two-echelon network: one central warehouse and its local warehouses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub central: WarehouseParams,
    pub locals: Vec<WarehouseParams>,
    /// `gcd(Q_0, ..., Q_n)`.
    pub subbatch: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl NetworkConfig {
    /// Builds a network and derives the common subbatch size.
    pub fn new(central: WarehouseParams, locals: Vec<WarehouseParams>) -> Result<Self> {
        let subbatch = locals.iter().fold(central.order_quantity, |g, w| gcd(g, w.order_quantity));
        let net = Self { central, locals, subbatch };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.locals.is_empty() {
            return Err(Error::Config("network needs at least one local warehouse".into()));
        }
        self.central.validate()?;
        for w in &self.locals {
            w.validate()?;
            if w.demand.is_none() {
                return Err(Error::Config(format!("local warehouse {} has no demand", w.id)));
            }
        }
        let q = self.locals.iter().fold(self.central.order_quantity, |g, w| gcd(g, w.order_quantity));
        if q != self.subbatch {
            return Err(Error::Config(format!("subbatch {} differs from gcd {q}", self.subbatch)));
        }
        let mut ids: Vec<&str> = self.locals.iter().map(|w| w.id.as_str()).collect();
        ids.push(&self.central.id);
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("warehouse ids must be unique".into()));
        }
        Ok(())
    }

    /// Recomputes the subbatch after order quantities were edited.
    pub fn refresh_subbatch(&mut self) {
        self.subbatch = self.locals.iter().fold(self.central.order_quantity, |g, w| gcd(g, w.order_quantity));
    }

    /// `sum_i mu_i`.
    pub fn total_daily_demand(&self) -> f64 {
        self.locals.iter().map(|w| w.daily_demand().mean).sum()
    }

    /// Size of one calculation unit for the central echelon.
    pub fn unit(&self, mode: UnitMode) -> u64 {
        match mode {
            UnitMode::Subbatch => self.subbatch,
            UnitMode::Unit => 1,
        }
    }

    /// The base network used throughout the experiments: a
    /// central warehouse with Q=500 and 60 +- 30 day supplier lead time, and
    /// eight locals with mu = 2..9, sigma^2 = 2 mu, Q in {50,...,200}.
    pub fn reference() -> Self {
        let central = WarehouseParams {
            id: "0".into(),
            reorder_point: 0,
            order_quantity: 500,
            demand: None,
            fill_target: 0.0,
            lead: MomentPair::raw(60.0, 900.0),
            price: 0.5,
        };
        let q = [50, 50, 100, 100, 150, 150, 200, 200];
        let locals = (0..8)
            .map(|i| {
                let mu = (i + 2) as f64;
                WarehouseParams {
                    id: (i + 1).to_string(),
                    reorder_point: 0,
                    order_quantity: q[i],
                    demand: Some(MomentPair::raw(mu, 2.0 * mu)),
                    fill_target: 0.9,
                    lead: MomentPair::raw(5.0, 9.0),
                    price: 1.0,
                }
            })
            .collect();
        Self::new(central, locals).expect("reference network is valid")
    }
}

/// Unit in which central-echelon calculations are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UnitMode {
    /// Units of the common subbatch `q`.
    #[default]
    Subbatch,
    /// Single pieces.
    Unit,
}

/// Maps a unit reorder point onto the subbatch grid and back.
///
/// With initial stock `R + 1` and all flows multiples of `q`, the inventory
/// position only visits values congruent to `R + 1 (mod q)`. A unit reorder
/// point `R` therefore acts like the subbatch reorder point
/// `floor((R + 1) / q) - 1`, and the smallest unit value realising subbatch
/// point `r` is `q r + q - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubbatchGrid {
    pub q: u64,
}

impl SubbatchGrid {
    pub fn to_grid(&self, r_units: i64) -> i64 {
        let q = self.q as i64;
        (r_units + 1).div_euclid(q) - 1
    }

    pub fn to_units(&self, r_grid: i64) -> i64 {
        let q = self.q as i64;
        q * r_grid + q - 1
    }

    /// Reorder point in pieces that the continuous formulas should see.
    ///
    /// The reachable positions `q(r+1), ..., q(r + Q/q)` are exactly the
    /// grid points of the continuous uniform on `(q r, q r + Q]`.
    pub fn effective_units(&self, r_units: i64) -> f64 {
        (self.q as i64 * self.to_grid(r_units)) as f64
    }
}

/// A random transport/lead time: deterministic or gamma distributed.
#[derive(Debug, Clone)]
pub enum LeadTime {
    Deterministic(f64),
    Gamma(Gamma),
}

impl LeadTime {
    pub fn from_moments(m: MomentPair) -> Result<Self> {
        if !(m.mean > 0.0) {
            return Err(Error::Domain(format!("lead time mean must be > 0, got {}", m.mean)));
        }
        if m.variance == 0.0 {
            Ok(LeadTime::Deterministic(m.mean))
        } else {
            Ok(LeadTime::Gamma(gamma_from_moments(m)?))
        }
    }

    pub fn moments(&self) -> MomentPair {
        match self {
            LeadTime::Deterministic(c) => MomentPair::raw(*c, 0.0),
            LeadTime::Gamma(g) => MomentPair::raw(g.mean(), g.variance()),
        }
    }

    pub fn raw_moments(&self) -> RawMoments {
        match self {
            LeadTime::Deterministic(c) => RawMoments::deterministic(*c),
            LeadTime::Gamma(g) => RawMoments {
                m1: g.raw_moment(1),
                m2: g.raw_moment(2),
                m3: g.raw_moment(3),
                m4: g.raw_moment(4),
            },
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            LeadTime::Deterministic(c) => *c,
            LeadTime::Gamma(g) => g.quantile(u),
        }
    }

    /// Whole days: the draw rounded to the nearest integer, at least one.
    #[inline]
    pub fn sample_days<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let x = match self {
            LeadTime::Deterministic(c) => *c,
            LeadTime::Gamma(g) => g.draw(rng),
        };
        (x.round().max(1.0)).min(u32::MAX as f64 / 4.0) as u32
    }
}

/// Transport time plus wait time, assumed independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLeadTime {
    pub base: MomentPair,
    pub wait: MomentPair,
    pub effective: MomentPair,
}

impl EffectiveLeadTime {
    pub fn new(base: MomentPair, wait: MomentPair) -> Self {
        Self { base, wait, effective: base.plus_independent(&wait) }
    }

    pub fn without_wait(base: MomentPair) -> Self {
        Self::new(base, MomentPair::zero())
    }
}
