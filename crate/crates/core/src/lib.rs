//! Two-phase optimizer for industrial production and transport systems.
//!
//! Phase I assigns production units to the parts of a bill of materials with
//! an evolutionary search over priority lists. Phase II builds the transport
//! network of that assignment, sizes batches per transport mean and picks
//! links with a greedy top-down walk under one or several transport
//! objectives.
//!
//! Every numeric model quantity is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix it to one of the two.

pub mod batching;
pub mod constraints;
pub mod dataset;
pub mod drago;
pub mod kpi;
pub mod model;
pub mod network;
pub mod oracles;
pub mod phase1;
pub mod pipeline;
pub mod scalar;
pub mod value_added;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use scalar::Scalar;

pub type Dataset64 = dataset::Dataset<f64>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type Assignment64 = model::ProductionAssignment<f64>;
pub type Assignment32 = model::ProductionAssignment<f32>;
pub type Network64 = network::TransportNetwork<f64>;
pub type Network32 = network::TransportNetwork<f32>;
pub type Plan64 = drago::Plan<f64>;
pub type Plan32 = drago::Plan<f32>;
