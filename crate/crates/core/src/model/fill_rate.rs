use crate::distributions::{fit_logarithmic_compound, DiscreteDistribution, MomentPair};
use crate::error::{Error, Result};

use super::ltd::{CdfPrefix, LtdDistribution};

/// A finite order-size distribution on the positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSizeDistribution {
    /// `(size, probability)` pairs, sizes strictly increasing.
    atoms: Vec<(i64, f64)>,
}

impl OrderSizeDistribution {
    pub fn new(mut atoms: Vec<(i64, f64)>) -> Result<Self> {
        atoms.retain(|&(_, p)| p > 0.0);
        if atoms.is_empty() || atoms.iter().any(|&(k, p)| k < 1 || !p.is_finite()) {
            return Err(Error::Domain("order sizes must be >= 1 with positive mass".into()));
        }
        atoms.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(i64, f64)> = Vec::with_capacity(atoms.len());
        for (k, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 += p,
                _ => merged.push((k, p)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        for a in &mut merged {
            a.1 /= total;
        }
        Ok(Self { atoms: merged })
    }

    pub fn unit() -> Self {
        Self { atoms: vec![(1, 1.0)] }
    }

    pub fn point(size: i64) -> Result<Self> {
        Self::new(vec![(size, 1.0)])
    }

    /// Tabulates a discrete distribution over `1..=max`.
    pub fn from_discrete<D: DiscreteDistribution + ?Sized>(d: &D, max: i64) -> Result<Self> {
        Self::new((1..=max).map(|k| (k, d.pmf(k))).collect())
    }

    /// Customer order sizes implied by daily demand moments: logarithmic
    /// when `sigma^2 > mu`, otherwise single units.
    pub fn for_demand(demand: MomentPair) -> Result<Self> {
        match fit_logarithmic_compound(demand) {
            Ok(c) => Self::from_discrete(c.order_size(), c.order_size().truncation_point()),
            Err(Error::VarianceNotAboveMean { .. }) => Ok(Self::unit()),
            Err(e) => Err(e),
        }
    }

    pub fn atoms(&self) -> &[(i64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(k, p)| k as f64 * p).sum()
    }
}

/// Distribution of the inventory level `I = IP - D` on `j <= R + Q`.
#[derive(Debug, Clone)]
pub struct InventoryLevelPmf {
    /// Level of `probs[0]`.
    pub lowest: i64,
    pub probs: Vec<f64>,
}

impl InventoryLevelPmf {
    pub fn pmf(&self, j: i64) -> f64 {
        if j < self.lowest {
            return 0.0;
        }
        self.probs.get((j - self.lowest) as usize).copied().unwrap_or(0.0)
    }

    pub fn highest(&self) -> i64 {
        self.lowest + self.probs.len() as i64 - 1
    }
}

/// `P(I = j) = (1/Q) sum_{l=R+1}^{R+Q} P(D = l - j)`, with the lead-time
/// demand truncated at its upper support.
pub fn inventory_level_pmf(reorder_point: i64, order_quantity: u64, ltd: &LtdDistribution) -> InventoryLevelPmf {
    let q = order_quantity as i64;
    let top = reorder_point + q;
    let lowest = reorder_point + 1 - ltd.upper_support();
    let pd = |x: i64| if x < 0 { 0.0 } else { ltd.cdf(x) - ltd.cdf(x - 1) };
    let probs = (lowest..=top)
        .map(|j| ((reorder_point + 1)..=top).map(|l| pd(l - j)).sum::<f64>() / q as f64)
        .collect();
    InventoryLevelPmf { lowest, probs }
}

/// Order fill rate `sum_k P(K = k) P(I >= k)` for one warehouse.
///
/// `P(I >= k) = (1/Q) sum_{l=R+1}^{R+Q} P(D <= l - k)`, which reduces to a
/// difference of cdf prefix sums.
pub fn order_fill_rate(
    reorder_point: i64,
    order_quantity: u64,
    ltd: &LtdDistribution,
    order_size: &OrderSizeDistribution,
) -> f64 {
    FillRateCurve::new(order_quantity, ltd, order_size.clone()).at(reorder_point)
}

/// Fill rate as a function of the reorder point, for fixed `Q`, lead-time
/// demand and order sizes.
#[derive(Debug, Clone)]
pub struct FillRateCurve {
    q: i64,
    prefix: CdfPrefix,
    order_size: OrderSizeDistribution,
}

impl FillRateCurve {
    pub fn new(order_quantity: u64, ltd: &LtdDistribution, order_size: OrderSizeDistribution) -> Self {
        Self { q: order_quantity as i64, prefix: CdfPrefix::new(ltd), order_size }
    }

    /// `P(I >= k)`.
    pub fn level_at_least(&self, r: i64, k: i64) -> f64 {
        self.prefix.sum_between(r + 1 - k, r + self.q - k) / self.q as f64
    }

    pub fn at(&self, r: i64) -> f64 {
        let top = r + self.q;
        let beta: f64 = self
            .order_size
            .atoms()
            .iter()
            .take_while(|&&(k, _)| k <= top)
            .map(|&(k, p)| p * self.level_at_least(r, k))
            .sum();
        beta.clamp(0.0, 1.0)
    }
}
