//! Phase II transport network: flows between producing units, candidate
//! routes through nearby warehouses, demand propagation and fit pruning.

mod build;
mod demand;
mod prune;
mod routes;

pub use build::{
    build_network, build_network_with, EdgeAlt, EdgeRef, Flow, Hop, NetworkError, NodeInfo, PartInfo, Route,
    TransportNetwork,
};
pub use demand::{ceil_count, propagate_demand, DemandSchedule, NodeDemand};
pub use prune::prune_infeasible;
pub use routes::{candidate_routes, DEFAULT_MAX_WAREHOUSES};
