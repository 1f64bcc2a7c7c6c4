//! Pooling, dispatching and ruin-and-recreate search for large ride-hailing
//! pickup and delivery problems with time windows.

pub mod eval;
pub mod io;
pub mod model;
pub mod pooling;
pub mod dispatch;
pub mod bs;
pub mod rnr;
pub mod ils;
pub mod fleetmin;
pub mod solver;
pub mod stats;

#[cfg(test)]
mod proptests;
