//! Deterministic simulation of in-band downlink coexistence between two LEO
//! satellite constellations.
//!
//! A *primary* (incumbent) constellation serves a ground user `u` and a
//! *secondary* constellation serves a nearby ground user `v` on the same
//! carrier. The crate models both constellations as Walker-Delta shells on
//! circular orbits, every satellite and user terminal as a uniform planar
//! phased array with matched-filter steering, and links with free-space path
//! loss. On top of that it evaluates the interference the secondary system
//! inflicts on the primary user and a family of satellite-selection
//! strategies that keep that interference under a protection threshold,
//! including a worst-case variant for when the primary serving satellite is
//! only known to lie within an angular cone.
//!
//! Module map:
//!
//! - [`constellation`]: shell tables, propagation, visibility.
//! - [`phased_array`]: array gain and array-frame geometry.
//! - [`link_budget`]: path loss, noise, transmit power, SNR/INR/SINR.
//! - [`selection`]: scene snapshots, INR bounds, greedy and protective selection.
//! - [`uncertainty`]: candidate primary sets and max-guaranteed-SINR selection.
//! - [`scenario`]: configuration, the time sweep, aggregation and output.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellation;
pub mod error;
pub mod link_budget;
pub mod phased_array;
pub mod scenario;
pub mod selection;
pub mod uncertainty;
pub mod units;

pub use constellation::{ConstellationSpec, GroundUser, LinkGeometry, SatelliteState, ShellSpec, SystemRole};
pub use error::{Error, Result};
pub use link_budget::{LinkMetrics, ProtectionThreshold, RadioConfig};
pub use phased_array::{ArrayFrame, ArraySpec, Boresight};
pub use scenario::{EmpiricalCdf, ScenarioConfig, ScenarioResults};
pub use selection::{Outage, SceneSnapshot, SelectionOutcome, Strategy};
pub use uncertainty::{RobustConstraint, RobustOutcome, UncertaintyModel};

/// Cartesian 3-vector in metres (or unitless for directions).
pub type Vec3 = nalgebra::Vector3<f64>;

#[cfg(test)]
pub(crate) mod test_support;
