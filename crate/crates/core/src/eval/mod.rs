//! Constant-time sequence evaluation and incremental route bookkeeping.

pub mod index;
pub mod insertion;
pub mod seq;
pub mod state;

pub use index::RouteIndex;
pub use insertion::{best_insertion, scan_insertions, Insertion};
pub use seq::{CapEval, CostEval, SeqEval, TimeEval};
pub use state::{Snapshot, State};
