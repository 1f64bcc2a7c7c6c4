//! Rebuilding a solution from the blocks of its routes.

use crate::dispatch::{assemble, blocks_from_solution, build_graph, kdspp, ArcRule, ConnectionLimits, GraphParams};
use crate::model::{Instance, Solution, VehicleId};

/// Graph settings used for recombination.
pub fn recombine_params(limits: Option<ConnectionLimits>) -> GraphParams {
    GraphParams { rule: ArcRule::Windows, limits, keep_origin_arcs: true }
}

/// Splits all routes into zero-load blocks and redistributes them over the
/// fleet with one k-disjoint shortest path run. Returns `None` when the
/// graph admits no feasible assembly.
pub fn recombine(sol: &Solution, inst: &Instance, params: GraphParams) -> Option<Solution> {
    let vehicles: Vec<VehicleId> = (0..inst.num_vehicles()).collect();
    let blocks = blocks_from_solution(sol, &vehicles, inst);
    let graph = build_graph(inst, &blocks, &vehicles, params);
    let paths = kdspp(&graph, vehicles.len()).ok()?;
    let mut out = assemble(inst, &graph, &blocks, &paths).ok()?;
    out.unassigned.extend(sol.unassigned.iter().copied());
    Some(out)
}
