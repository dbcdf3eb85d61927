use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NetworkConfig;

/// Network parameter a test case varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    /// Mean daily demand of every local warehouse.
    Mu,
    /// Daily demand variance of every local warehouse.
    Sigma2,
    /// Order quantity of every local warehouse.
    QLocal,
    /// Central order quantity.
    QCentral,
    /// Local fill-rate targets.
    FillTarget,
    /// Supplier lead time (mean and standard deviation scale together).
    CentralLead,
    /// Central unit price.
    CentralPrice,
    /// Number of local warehouses, all copies of the first one.
    NetworkSize,
}

impl Parameter {
    pub fn tag(&self) -> &'static str {
        match self {
            Parameter::Mu => "mu",
            Parameter::Sigma2 => "sigma2",
            Parameter::QLocal => "q_local",
            Parameter::QCentral => "q_central",
            Parameter::FillTarget => "fill_target",
            Parameter::CentralLead => "central_lead",
            Parameter::CentralPrice => "central_price",
            Parameter::NetworkSize => "n",
        }
    }

    /// Whether the parameter enters any wait-time or fill-rate formula.
    pub fn affects_accuracy(&self) -> bool {
        !matches!(self, Parameter::CentralPrice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationKind {
    Multiplicative,
    Absolute,
    NetworkSize,
}

/// One row of the variation table: a parameter and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variation {
    pub parameter: Parameter,
    pub kind: VariationKind,
    pub values: Vec<f64>,
}

/// One test case: the base network with at most one parameter changed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub case: String,
    pub parameter: Option<Parameter>,
    pub kind: Option<VariationKind>,
    pub value: Option<f64>,
    pub net: NetworkConfig,
}

impl ScenarioSpec {
    pub fn base(net: &NetworkConfig) -> Self {
        Self { case: "base".into(), parameter: None, kind: None, value: None, net: net.clone() }
    }
}

/// The standard 39 variations (plus the base case: 40 test cases).
pub fn default_variations() -> Vec<Variation> {
    use Parameter::*;
    use VariationKind::{Absolute, Multiplicative};
    let v = |parameter, kind, values: &[f64]| Variation { parameter, kind, values: values.to_vec() };
    vec![
        v(Mu, Multiplicative, &[0.25, 0.5]),
        v(Sigma2, Multiplicative, &[2.0, 4.0, 8.0, 16.0]),
        v(QLocal, Multiplicative, &[0.25, 0.5, 2.0, 4.0, 8.0]),
        v(QCentral, Multiplicative, &[0.25, 0.5, 2.0, 4.0, 8.0]),
        v(FillTarget, Absolute, &[0.25, 0.5, 0.8, 0.95]),
        v(CentralLead, Multiplicative, &[0.0625, 0.125, 0.25, 0.5, 2.0]),
        v(CentralPrice, Multiplicative, &[2.0, 4.0, 8.0]),
        v(NetworkSize, VariationKind::NetworkSize, &[2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 15.0, 20.0]),
    ]
}

fn case_label(p: Parameter, value: f64) -> String {
    format!("{}_{}", p.tag(), value)
}

fn scale_quantity(q: u64, factor: f64) -> Result<u64> {
    let scaled = (q as f64 * factor).round();
    if scaled < 1.0 {
        return Err(Error::Schema(format!("order quantity {q} x {factor} rounds below 1")));
    }
    Ok(scaled as u64)
}

/// Applies one variation value to `base`.
pub fn apply_variation(base: &NetworkConfig, p: Parameter, kind: VariationKind, value: f64) -> Result<NetworkConfig> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Schema(format!("variation value {value} for {} must be positive", p.tag())));
    }
    let expected = match p {
        Parameter::FillTarget => VariationKind::Absolute,
        Parameter::NetworkSize => VariationKind::NetworkSize,
        _ => VariationKind::Multiplicative,
    };
    // Absolute replacement of a multiplicative parameter is allowed too.
    let compatible = kind == expected || (kind == VariationKind::Absolute && expected == VariationKind::Multiplicative);
    if !compatible {
        return Err(Error::Schema(format!("{} cannot be varied as {kind:?}", p.tag())));
    }
    let apply = |x: f64| if kind == VariationKind::Absolute { value } else { x * value };
    let mut net = base.clone();
    match p {
        Parameter::Mu | Parameter::Sigma2 => {
            for w in net.locals.iter_mut() {
                let mut d = w.daily_demand();
                if p == Parameter::Mu {
                    d.mean = apply(d.mean);
                } else {
                    d.variance = apply(d.variance);
                }
                w.demand = Some(d);
            }
        }
        Parameter::QLocal => {
            for w in net.locals.iter_mut() {
                w.order_quantity = match kind {
                    VariationKind::Absolute => scale_quantity(1, value)?,
                    _ => scale_quantity(w.order_quantity, value)?,
                };
            }
        }
        Parameter::QCentral => {
            net.central.order_quantity = match kind {
                VariationKind::Absolute => scale_quantity(1, value)?,
                _ => scale_quantity(net.central.order_quantity, value)?,
            };
        }
        Parameter::FillTarget => {
            if value >= 1.0 {
                return Err(Error::Schema(format!("fill target {value} must be below 1")));
            }
            for w in net.locals.iter_mut() {
                w.fill_target = value;
            }
        }
        Parameter::CentralLead => {
            let l = net.central.lead;
            let (mean, sd) = match kind {
                VariationKind::Absolute => (value, l.sd() * value / l.mean),
                _ => (l.mean * value, l.sd() * value),
            };
            net.central.lead = crate::distributions::MomentPair::raw(mean, sd * sd);
        }
        Parameter::CentralPrice => net.central.price = apply(net.central.price),
        Parameter::NetworkSize => {
            if value.fract() != 0.0 {
                return Err(Error::Schema(format!("network size {value} is not an integer")));
            }
            let first = base
                .locals
                .first()
                .ok_or_else(|| Error::Schema("base network has no local warehouse".into()))?;
            net.locals = (1..=value as usize)
                .map(|i| {
                    let mut w = first.clone();
                    w.id = i.to_string();
                    w
                })
                .collect();
        }
    }
    net.refresh_subbatch();
    net.validate().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(net)
}

/// The base case followed by one case per variation value, in table order.
pub fn generate_grid(base: &NetworkConfig, variations: &[Variation]) -> Result<Vec<ScenarioSpec>> {
    base.validate().map_err(|e| Error::Schema(e.to_string()))?;
    let mut grid = vec![ScenarioSpec::base(base)];
    for v in variations {
        for &value in &v.values {
            grid.push(ScenarioSpec {
                case: case_label(v.parameter, value),
                parameter: Some(v.parameter),
                kind: Some(v.kind),
                value: Some(value),
                net: apply_variation(base, v.parameter, v.kind, value)?,
            });
        }
    }
    let mut seen = std::collections::HashSet::new();
    for s in &grid {
        if !seen.insert(s.case.as_str()) {
            return Err(Error::Schema(format!("duplicate test case `{}`", s.case)));
        }
    }
    Ok(grid)
}
