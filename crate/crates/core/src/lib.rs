//! Two-echelon (R,Q) inventory toolkit.
//!
//! A central warehouse replenished from an unlimited supplier feeds a set
//! of local warehouses that face compound Poisson customer demand. Every
//! warehouse runs a continuous-review (R,Q) policy with complete deliveries.
//!
//! * [`distributions`]: distribution families, two-moment fits, loss
//!   functions and residual-lifetime moments.
//! * [`model`]: lead-time demand, inventory level, order fill rate and the
//!   central lead-time demand built from local order counts.
//! * [`wait_time`]: four estimators of the wait local orders suffer at the
//!   central warehouse (AXS, KKSL, BF, NB).
//! * [`sim`]: the discrete-time simulator used as ground truth.
//! * [`planning`]: reorder-point calibration from fill-rate targets.
//! * [`harness`]: scenario grids, experiment orchestration, error metrics,
//!   rankings and CSV/config I/O.

pub mod distributions;
pub mod error;
pub mod harness;
pub mod model;
pub mod planning;
pub mod rng;
pub mod sim;
pub mod wait_time;

pub use error::{Error, Result};
