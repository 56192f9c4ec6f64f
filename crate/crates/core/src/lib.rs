//! Matching engine for first-mile and last-mile ridesharing feeders to
//! public transit.
//!
//! Drivers and riders are matched through a weighted hypergraph whose edges
//! are feasible (driver, rider-set) matches. Two objectives are supported:
//! total incurred driving distance ([`Problem::MinDist`]) and the number of
//! designated drivers used ([`Problem::MinNum`]).

pub mod clustering;
pub mod feasibility;
pub mod gen;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod routing;
pub mod solvers;

pub use model::Problem;
