//! Simulation toolkit for distributed spanner lower bounds under the KT₁
//! assumption.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: plain undirected graphs with node identifiers, plus an
//!   Erdős–Rényi fixture generator.
//! * [`graph_model`]: the colored lower-bound distribution (blue regions,
//!   red random edges, random ID permutation) and its degree statistics.
//! * [`traversal`]: critical edges, traversal sequences and the exact
//!   exponent calculus for B-maximal sequences.
//! * [`simulator`]: lock-step message passing with bit-exact ledgers in
//!   four communication models.
//! * [`spanners`]: greedy oracle and the cluster-based 3-spanner in
//!   centralized, two-party and distributed form.
//! * [`time_encoding`]: graph enumeration codec and the silent-round
//!   convergecast.
//! * [`infocost`]: entropy toolkit, plug-in local information cost and
//!   bound curves.
//! * [`verify`]: stretch, size, critical inclusion and sparse-set checks.
//!
//! Data-parallel loops go through [`par::Execution`]; with the `parallel`
//! feature disabled every policy runs sequentially.

pub mod graph;
pub mod graph_model;
pub mod infocost;
pub mod par;
pub mod seed;
pub mod simulator;
pub mod spanners;
pub mod time_encoding;
pub mod traversal;
pub mod verify;

mod exact;

pub use graph::{Edge, Graph, GraphError, NodeId};
pub use graph_model::{ColoredGraph, LowerBoundParams, ModelError};
pub use par::Execution;
