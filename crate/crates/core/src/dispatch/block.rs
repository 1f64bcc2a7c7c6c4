//! Zero-sum blocks: visit sequences that start and end with an empty vehicle.

use crate::eval::SeqEval;
use crate::model::{Instance, NodeId, Solution, VehicleId};
use crate::pooling::{Hyperedge, Matching};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StartPolicy {
    #[default]
    Earliest,
    Average,
    Latest,
}

impl StartPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "earliest" => Some(StartPolicy::Earliest),
            "average" => Some(StartPolicy::Average),
            "latest" => Some(StartPolicy::Latest),
            _ => None,
        }
    }

    pub fn pick(self, earliest: i64, latest: i64) -> i64 {
        match self {
            StartPolicy::Earliest => earliest,
            StartPolicy::Average => (earliest + latest).div_euclid(2),
            StartPolicy::Latest => latest,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub seq: Vec<NodeId>,
    /// Stand-alone summary of `seq`.
    pub eval: SeqEval,
    pub n_req: usize,
    /// Earliest begin of service at the first visit.
    pub earliest: i64,
    /// Latest begin of service at the first visit.
    pub latest: i64,
    /// Fixed begin of service used with fixed-start arcs.
    pub start: i64,
    /// Time from `start` to the begin of service at the last visit,
    /// including waiting.
    pub dur: i64,
    /// Vehicle and position of the block in the solution it came from.
    pub origin: Option<(VehicleId, usize)>,
}

impl Block {
    fn new(inst: &Instance, seq: Vec<NodeId>, earliest: i64, latest: i64, start: i64) -> Self {
        let eval = SeqEval::of_sequence(inst, &seq).expect("blocks are non-empty");
        let n_req = seq.len() / 2;
        let dur = completion(&eval, start) - start;
        Block { seq, eval, n_req, earliest, latest, start, dur, origin: None }
    }

    pub fn first(&self) -> NodeId {
        self.seq[0]
    }

    pub fn last(&self) -> NodeId {
        *self.seq.last().expect("non-empty")
    }

    /// Internal travel cost.
    pub fn dist(&self) -> i64 {
        self.eval.cost.c
    }

    /// Begin of service at the last visit when service at the first visit
    /// begins no earlier than `start` (and no later than the latest start).
    pub fn completion_from(&self, start: i64) -> i64 {
        completion(&self.eval, start)
    }

    /// Completion when starting as late as allowed.
    pub fn worst_completion(&self) -> i64 {
        completion(&self.eval, self.latest)
    }
}

fn completion(eval: &SeqEval, start: i64) -> i64 {
    (start + eval.time.tt).max(eval.time.ec)
}

/// One block per matched edge, with start fixed by `policy` inside the
/// edge's start window.
pub fn blocks_from_matching(
    matching: &Matching,
    edges: &[Hyperedge],
    inst: &Instance,
    policy: StartPolicy,
) -> Vec<Block> {
    matching
        .edges
        .iter()
        .map(|&e| {
            let edge = &edges[e];
            let earliest = inst.node(edge.seq[0]).ready;
            let latest = edge.eval.time.ls.max(earliest);
            Block::new(inst, edge.seq.clone(), earliest, latest, policy.pick(earliest, latest))
        })
        .collect()
}

/// Splits the routes of `vehicles` at every point where the vehicle is
/// empty. The start window of a block is taken from its route: the earliest
/// begin of service under the route's forward schedule and the latest begin
/// that keeps the rest of the route feasible.
pub fn blocks_from_solution(sol: &Solution, vehicles: &[VehicleId], inst: &Instance) -> Vec<Block> {
    let mut out = Vec::new();
    for &v in vehicles {
        let route = &sol.routes[v];
        debug_assert_eq!(route.vehicle, v);
        let seq = route.full_sequence(inst);
        if seq.len() <= 1 || route.is_empty() {
            continue;
        }
        // Backward suffix summaries.
        let mut suffix: Vec<Option<SeqEval>> = vec![None; seq.len() + 1];
        for i in (0..seq.len()).rev() {
            let own = SeqEval::node(inst, seq[i]);
            suffix[i] = Some(match suffix[i + 1] {
                Some(s) => SeqEval::concat(inst, &own, &s),
                None => own,
            });
        }
        let stops = route.visits.len();
        let mut begin = inst.node(seq[0]).ready;
        let mut load = 0;
        let mut block_start = 1;
        let mut block_begin = 0;
        let mut idx = 0;
        for i in 1..stops {
            let prev = seq[i - 1];
            let arrival = begin + inst.travel(prev, seq[i]);
            begin = arrival.max(inst.node(seq[i]).ready);
            if load == 0 {
                block_start = i;
                block_begin = begin;
            }
            load += inst.node(seq[i]).demand;
            if load == 0 {
                let ls = suffix[block_start].expect("filled").time.ls;
                let mut b = Block::new(
                    inst,
                    seq[block_start..=i].to_vec(),
                    block_begin,
                    ls.max(block_begin),
                    block_begin,
                );
                b.origin = Some((v, idx));
                idx += 1;
                out.push(b);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::line_instance;
    use crate::model::Route;

    fn inst() -> Instance {
        line_instance(&[0, 2, 5, 7, 9], &[(1, 2, (0, 30), (0, 60)), (3, 4, (0, 30), (0, 60))], &[0], 2)
    }

    #[test]
    fn splits_at_zero_load() {
        let inst = inst();
        let s = inst.vehicle(0).start;
        let mut sol = Solution::empty(&inst);
        sol.unassigned.clear();
        sol.routes[0] = Route { vehicle: 0, visits: vec![s, 0, 2, 1, 3] };
        assert_eq!(blocks_from_solution(&sol, &[0], &inst).len(), 2);
        sol.routes[0] = Route { vehicle: 0, visits: vec![s, 0, 1, 2, 3] };
        let blocks = blocks_from_solution(&sol, &[0], &inst);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].n_req, 2);
        assert_eq!(blocks[0].origin, Some((0, 0)));
    }

    #[test]
    fn singleton_window_and_policies() {
        let inst = line_instance(&[0, 2, 5], &[(1, 2, (10, 30), (13, 33))], &[0], 1);
        let edges = vec![Hyperedge::singleton(&inst, 0)];
        let m = Matching { edges: vec![0] };
        let b = &blocks_from_matching(&m, &edges, &inst, StartPolicy::Earliest)[0];
        assert_eq!((b.earliest, b.latest, b.start, b.dur), (10, 30, 10, 3));
        let b = &blocks_from_matching(&m, &edges, &inst, StartPolicy::Average)[0];
        assert_eq!(b.start, 20);
        let b = &blocks_from_matching(&m, &edges, &inst, StartPolicy::Latest)[0];
        assert_eq!(b.start, 30);
    }
}
