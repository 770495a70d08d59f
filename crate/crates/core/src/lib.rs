//! Shortest paths with negative edge weights, without Bellman-Ford's
//! round count: the solver repeatedly reweights the graph and inserts
//! shortcut edges until two negative hops suffice for every shortest path.

pub mod graph;
pub mod hop;
pub mod stats;
pub mod preprocess;
pub mod betweenness;
pub mod negsearch;
pub mod shortcut;
pub mod driver;
pub mod io;
pub mod gen;
