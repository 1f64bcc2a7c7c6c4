//! Turning a path set into routes.

use thiserror::Error;

use crate::dispatch::block::Block;
use crate::dispatch::graph::DispatchGraph;
use crate::dispatch::kdsp::PathSet;
use crate::eval::SeqEval;
use crate::model::{Instance, Route, Solution, VehicleId};

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("assembled route of vehicle {0} is infeasible")]
    Infeasible(VehicleId),
    #[error("block {0} is used by more than one path")]
    SharedBlock(usize),
}

/// Routes for the graph's vehicles built by concatenating the blocks along
/// each path. Other vehicles get empty routes; requests of blocks on no
/// path are unassigned.
pub fn assemble(
    inst: &Instance,
    graph: &DispatchGraph,
    blocks: &[Block],
    paths: &PathSet,
) -> Result<Solution, AssembleError> {
    let mut sol = Solution::empty(inst);
    sol.unassigned.clear();
    let mut used = vec![false; blocks.len()];
    for path in &paths.paths {
        let Some(vi) = graph.vehicle_of(path[0]) else { continue };
        let v = graph.vehicles[vi];
        let mut visits = vec![inst.vehicle(v).start];
        for &u in &path[1..] {
            let b = graph.block_of(u).expect("paths hold blocks after the vehicle");
            if std::mem::replace(&mut used[b], true) {
                return Err(AssembleError::SharedBlock(b));
            }
            visits.extend_from_slice(&blocks[b].seq);
        }
        let route = Route { vehicle: v, visits };
        let eval = SeqEval::of_sequence(inst, &route.full_sequence(inst)).expect("non-empty");
        if !eval.is_feasible(inst.capacity()) {
            return Err(AssembleError::Infeasible(v));
        }
        sol.routes[v] = route;
    }
    for (b, blk) in blocks.iter().enumerate() {
        if !used[b] {
            sol.unassigned.extend(blk.seq.iter().filter(|&&i| inst.is_pickup(i)).filter_map(|&i| inst.request_of(i)));
        }
    }
    Ok(sol)
}
