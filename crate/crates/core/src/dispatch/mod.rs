//! Dispatching blocks of requests to vehicles through k disjoint shortest
//! paths.

pub mod assemble;
pub mod block;
pub mod graph;
pub mod kdsp;

pub use assemble::{assemble, AssembleError};
pub use block::{blocks_from_matching, blocks_from_solution, Block, StartPolicy};
pub use graph::{build_graph, Arc, ArcRule, ConnectionLimits, DispatchGraph, GraphParams, SINK, SOURCE};
pub use kdsp::{kdspp, KdspError, PathSet};
