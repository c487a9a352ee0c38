//! Conserved charges along runs and end-to-end covariance tests of the
//! Schrödinger–Newton group action.

mod covariance;
mod monitor;
mod record;

pub use covariance::{covariance_test, CovarianceReport, Scenario};
pub use monitor::{drift_stats, monitor, write_csv, DriftStats, MonitorReport, CSV_HEADER};
pub use record::{charges_of, compute_charges, ChargeRecord};
