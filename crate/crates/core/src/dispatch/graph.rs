//! Dispatching graph: source, one vertex per vehicle, one per block, sink.

use std::fmt::Write;

use rayon::prelude::*;

use crate::dispatch::block::Block;
use crate::model::{Instance, VehicleId};

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

/// How block-to-block and vehicle-to-block feasibility is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcRule {
    /// Blocks begin exactly at their fixed start.
    FixedStart,
    /// Blocks may begin anywhere up to their latest start; an arc exists
    /// when even the latest completion of the tail block reaches the head
    /// block in time.
    Windows,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionLimits {
    /// Maximum connection cost between two blocks.
    pub distance: i64,
    /// Maximum idle time between two blocks.
    pub time: i64,
}

impl Default for ConnectionLimits {
    fn default() -> Self {
        ConnectionLimits { distance: 4000, time: 1800 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphParams {
    pub rule: ArcRule,
    pub limits: Option<ConnectionLimits>,
    /// Always connect consecutive blocks of the same originating route and a
    /// vehicle to its own first block, regardless of limits.
    pub keep_origin_arcs: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    /// Connection cost without the profit shift.
    pub cost: i64,
    pub weight: i64,
}

/// Vertex 0 is the source, 1 the sink, `2..2+k` the vehicles and the rest
/// the blocks in input order.
#[derive(Clone, Debug)]
pub struct DispatchGraph {
    pub vehicles: Vec<VehicleId>,
    pub num_blocks: usize,
    pub arcs: Vec<Arc>,
    /// Per-request profit shift.
    pub xi: i64,
    /// Blocks sorted so that every block arc goes forward; used as a
    /// topological order.
    pub block_order: Vec<usize>,
}

impl DispatchGraph {
    pub fn num_vertices(&self) -> usize {
        2 + self.vehicles.len() + self.num_blocks
    }

    pub fn vehicle_vertex(&self, i: usize) -> usize {
        2 + i
    }

    pub fn block_vertex(&self, b: usize) -> usize {
        2 + self.vehicles.len() + b
    }

    /// Block index of a vertex, if it is a block vertex.
    pub fn block_of(&self, u: usize) -> Option<usize> {
        u.checked_sub(2 + self.vehicles.len()).filter(|&b| b < self.num_blocks)
    }

    /// Vehicle position of a vertex, if it is a vehicle vertex.
    pub fn vehicle_of(&self, u: usize) -> Option<usize> {
        u.checked_sub(2).filter(|&i| i < self.vehicles.len())
    }

    /// Vertices in a topological order.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order = vec![SOURCE];
        order.extend((0..self.vehicles.len()).map(|i| self.vehicle_vertex(i)));
        order.extend(self.block_order.iter().map(|&b| self.block_vertex(b)));
        order.push(SINK);
        order
    }

    /// Builds a graph from raw arcs (used by tests and tools). Block arcs
    /// must respect `block_order`.
    pub fn from_arcs(vehicles: usize, num_blocks: usize, arcs: Vec<Arc>, xi: i64) -> Self {
        DispatchGraph {
            vehicles: (0..vehicles).collect(),
            num_blocks,
            arcs,
            xi,
            block_order: (0..num_blocks).collect(),
        }
    }

    /// Plain adjacency dump: one `from to cost weight` line per arc.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vehicles {} blocks {} xi {}", self.vehicles.len(), self.num_blocks, self.xi);
        for a in &self.arcs {
            let _ = writeln!(s, "{} {} {} {}", a.from, a.to, a.cost, a.weight);
        }
        s
    }
}

fn order_key(b: &Block, rule: ArcRule) -> i64 {
    match rule {
        ArcRule::FixedStart => b.start,
        ArcRule::Windows => b.latest,
    }
}

/// Whether `a` can be followed by `b`, and the idle time in between.
fn block_link(inst: &Instance, a: &Block, b: &Block, rule: ArcRule) -> Option<i64> {
    let travel = inst.travel(a.last(), b.first());
    match rule {
        ArcRule::FixedStart => {
            let arrive = a.start + a.dur + travel;
            (arrive <= b.start).then_some(b.start - arrive)
        }
        ArcRule::Windows => {
            let arrive = a.worst_completion() + travel;
            (arrive <= b.latest).then(|| (b.earliest - (a.start + a.dur + travel)).max(0))
        }
    }
}

fn vehicle_reaches(inst: &Instance, v: VehicleId, b: &Block, rule: ArcRule) -> bool {
    let start = inst.vehicle(v).start;
    let arrive = inst.node(start).ready + inst.travel(start, b.first());
    match rule {
        ArcRule::FixedStart => arrive <= b.start,
        ArcRule::Windows => arrive <= b.latest,
    }
}

/// Whether a route may end after the block, given the vehicles' end nodes.
fn block_may_end(inst: &Instance, vehicles: &[VehicleId], b: &Block, rule: ArcRule) -> bool {
    let done = match rule {
        ArcRule::FixedStart => b.start + b.dur,
        ArcRule::Windows => b.worst_completion(),
    };
    vehicles.iter().all(|&v| match inst.vehicle(v).end {
        Some(e) => done + inst.travel(b.last(), e) <= inst.node(e).due,
        None => true,
    })
}

pub fn build_graph(inst: &Instance, blocks: &[Block], vehicles: &[VehicleId], params: GraphParams) -> DispatchGraph {
    let k = vehicles.len();
    let nb = blocks.len();
    let mut block_order: Vec<usize> = (0..nb).collect();
    block_order.sort_by_key(|&b| (order_key(&blocks[b], params.rule), b));
    let mut rank = vec![0; nb];
    for (i, &b) in block_order.iter().enumerate() {
        rank[b] = i;
    }
    let vv = |i: usize| 2 + i;
    let bv = |b: usize| 2 + k + b;
    let same_origin_next = |a: &Block, b: &Block| match (a.origin, b.origin) {
        (Some((va, ia)), Some((vb, ib))) => va == vb && ia + 1 == ib,
        _ => false,
    };

    // (from, to, cost, served requests at head)
    let mut raw: Vec<(usize, usize, i64, usize)> = Vec::new();
    for i in 0..k {
        raw.push((SOURCE, vv(i), 0, 0));
        raw.push((vv(i), SINK, 0, 0));
    }
    for (i, &v) in vehicles.iter().enumerate() {
        for (b, blk) in blocks.iter().enumerate() {
            if vehicle_reaches(inst, v, blk, params.rule) {
                raw.push((vv(i), bv(b), inst.cost(inst.vehicle(v).start, blk.first()), blk.n_req));
            }
        }
    }
    let block_arcs: Vec<Vec<(usize, usize, i64, usize)>> = (0..nb)
        .into_par_iter()
        .map(|a| {
            let ba = &blocks[a];
            let mut out = Vec::new();
            for &b in &block_order[rank[a] + 1..] {
                let bb = &blocks[b];
                let Some(gap) = block_link(inst, ba, bb, params.rule) else { continue };
                let cost = inst.cost(ba.last(), bb.first());
                let within = params.limits.is_none_or(|l| cost <= l.distance && gap <= l.time);
                if within || (params.keep_origin_arcs && same_origin_next(ba, bb)) {
                    out.push((bv(a), bv(b), cost, bb.n_req));
                }
            }
            out
        })
        .collect();
    raw.extend(block_arcs.into_iter().flatten());
    for (b, blk) in blocks.iter().enumerate() {
        if block_may_end(inst, vehicles, blk, params.rule) {
            raw.push((bv(b), SINK, 0, 0));
        }
    }
    let max_cost = raw.iter().map(|a| a.2).max().unwrap_or(0);
    let xi = (max_cost + 1) * (inst.num_requests() as i64 + 1);
    let arcs = raw
        .into_iter()
        .map(|(from, to, cost, n)| Arc { from, to, cost, weight: cost - xi * n as i64 })
        .collect();
    DispatchGraph { vehicles: vehicles.to_vec(), num_blocks: nb, arcs, xi, block_order }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::block::{blocks_from_matching, StartPolicy};
    use crate::model::tests::line_instance;
    use crate::pooling::{Hyperedge, Matching};

    fn blocks(inst: &Instance) -> Vec<Block> {
        let edges: Vec<Hyperedge> = (0..inst.num_requests()).map(|r| Hyperedge::singleton(inst, r)).collect();
        let m = Matching { edges: (0..edges.len()).collect() };
        blocks_from_matching(&m, &edges, inst, StartPolicy::Earliest)
    }

    #[test]
    fn overlapping_blocks_do_not_connect() {
        let inst = line_instance(&[0, 1, 5], &[(1, 2, (0, 0), (4, 4)), (1, 2, (2, 2), (6, 6))], &[0], 1);
        let b = blocks(&inst);
        let params = GraphParams { rule: ArcRule::FixedStart, limits: None, keep_origin_arcs: false };
        let g = build_graph(&inst, &b, &[0], params);
        let bb = |a: &Arc| g.block_of(a.from).is_some() && g.block_of(a.to).is_some();
        assert!(!g.arcs.iter().any(bb));
    }

    #[test]
    fn chained_blocks_connect_forward_only() {
        let inst = line_instance(&[0, 1, 5], &[(1, 2, (0, 0), (4, 4)), (1, 2, (8, 8), (12, 12))], &[0], 1);
        let b = blocks(&inst);
        for rule in [ArcRule::FixedStart, ArcRule::Windows] {
            let g = build_graph(&inst, &b, &[0], GraphParams { rule, limits: None, keep_origin_arcs: false });
            let pairs: Vec<(usize, usize)> = g
                .arcs
                .iter()
                .filter_map(|a| Some((g.block_of(a.from)?, g.block_of(a.to)?)))
                .collect();
            assert_eq!(pairs, vec![(0, 1)]);
            let arc = g.arcs.iter().find(|a| g.block_of(a.from) == Some(0) && g.block_of(a.to) == Some(1)).unwrap();
            assert_eq!(arc.cost, 4);
            assert_eq!(arc.weight, 4 - g.xi);
        }
    }

    #[test]
    fn limits_prune_long_connections() {
        let inst = line_instance(&[0, 1, 5], &[(1, 2, (0, 0), (4, 4)), (1, 2, (5000, 5000), (5004, 5004))], &[0], 1);
        let b = blocks(&inst);
        let params = GraphParams { rule: ArcRule::FixedStart, limits: Some(ConnectionLimits::default()), keep_origin_arcs: false };
        let g = build_graph(&inst, &b, &[0], params);
        assert!(!g.arcs.iter().any(|a| g.block_of(a.from).is_some() && g.block_of(a.to).is_some()));
    }
}
