//! Candidate pooled rides: request subsets with a cheapest feasible shared
//! visit sequence.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::eval::SeqEval;
use crate::model::{Instance, NodeId, RequestId};

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    /// Request ids in ascending order.
    pub requests: Vec<RequestId>,
    /// Cheapest feasible visit sequence.
    pub seq: Vec<NodeId>,
    pub seq_cost: i64,
    /// Summary of `seq`, started at the window opening of its first visit.
    pub eval: SeqEval,
}

impl Hyperedge {
    /// The single-request edge: pickup followed by delivery.
    pub fn singleton(inst: &Instance, r: RequestId) -> Self {
        let req = inst.request(r);
        let seq = vec![req.pickup, req.delivery];
        let eval = SeqEval::of_sequence(inst, &seq).expect("non-empty");
        Hyperedge { requests: vec![r], seq, seq_cost: eval.cost.c, eval }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Hypergraph {
    /// Requests sorted by earliest pickup time, ties by id.
    pub order: Vec<RequestId>,
    /// Edges with at least two requests.
    pub edges: Vec<Hyperedge>,
    pub rank: usize,
}

impl Hypergraph {
    /// Pooled edges followed by one singleton per request.
    pub fn with_singletons(&self, inst: &Instance) -> Vec<Hyperedge> {
        let mut all = self.edges.clone();
        all.extend((0..inst.num_requests()).map(|r| Hyperedge::singleton(inst, r)));
        all
    }
}

/// Requests sorted ascending by earliest pickup, ties by id.
pub fn vertex_order(inst: &Instance) -> Vec<RequestId> {
    let mut order: Vec<RequestId> = (0..inst.num_requests()).collect();
    order.sort_by_key(|&r| (inst.request(r).earliest, r));
    order
}

/// Requests after `r` in the vertex order whose earliest pickup lies in
/// `[e_r, l_r + δ]`.
pub fn neighbors(inst: &Instance, order: &[RequestId], rank_of: &[usize], r: RequestId) -> Vec<RequestId> {
    let limit = inst.request(r).latest + inst.buffer();
    order[rank_of[r] + 1..]
        .iter()
        .copied()
        .take_while(|&s| inst.request(s).earliest <= limit)
        .collect()
}

/// Cheapest interleaving of the requests' pickups and deliveries that keeps
/// precedence, capacity and time windows, starting at the first visit's
/// window opening. With `single_block`, the vehicle may only become empty
/// at the very end, so the sequence is one shared ride.
pub fn best_sequence(inst: &Instance, reqs: &[RequestId], single_block: bool) -> Option<(Vec<NodeId>, SeqEval)> {
    struct Search<'a> {
        inst: &'a Instance,
        reqs: &'a [RequestId],
        single_block: bool,
        seq: Vec<NodeId>,
        best: Option<(Vec<NodeId>, SeqEval)>,
    }
    impl Search<'_> {
        fn go(&mut self, cur: Option<SeqEval>, picked: u32, dropped: u32) {
            let m = self.reqs.len();
            let full = (1u32 << m) - 1;
            if dropped == full {
                let cur = cur.expect("non-empty");
                if self.best.as_ref().is_none_or(|(_, b)| cur.cost.c < b.cost.c) {
                    self.best = Some((self.seq.clone(), cur));
                }
                return;
            }
            for (j, &r) in self.reqs.iter().enumerate() {
                let bit = 1u32 << j;
                let node = if picked & bit == 0 {
                    self.inst.request(r).pickup
                } else if dropped & bit == 0 {
                    self.inst.request(r).delivery
                } else {
                    continue;
                };
                let next = match &cur {
                    None => SeqEval::node(self.inst, node),
                    Some(c) => c.push(self.inst, node),
                };
                if !next.is_feasible(self.inst.capacity()) {
                    continue;
                }
                if self.best.as_ref().is_some_and(|(_, b)| next.cost.c >= b.cost.c) {
                    continue;
                }
                let (np, nd) = if picked & bit == 0 { (picked | bit, dropped) } else { (picked, dropped | bit) };
                if self.single_block && nd != full && next.cap.q_sum == 0 {
                    continue;
                }
                self.seq.push(node);
                self.go(Some(next), np, nd);
                self.seq.pop();
            }
        }
    }
    let mut s = Search { inst, reqs, single_block, seq: Vec::with_capacity(2 * reqs.len()), best: None };
    s.go(None, 0, 0);
    s.best
}

/// All feasible pooled rides of 2..=`rank` requests. A subset is generated
/// from its first request in vertex order and grown only through feasible
/// subsets.
pub fn enumerate_hyperedges(inst: &Instance, rank: usize) -> Hypergraph {
    let order = vertex_order(inst);
    let mut rank_of = vec![0; inst.num_requests()];
    for (i, &r) in order.iter().enumerate() {
        rank_of[r] = i;
    }
    let per_request: Vec<Vec<Hyperedge>> = order
        .par_iter()
        .map(|&r| {
            let mut out = Vec::new();
            if rank < 2 {
                return out;
            }
            let cands: Vec<RequestId> = neighbors(inst, &order, &rank_of, r)
                .into_iter()
                .filter(|&s| best_sequence(inst, &[r, s], true).is_some())
                .collect();
            let mut members = vec![r];
            grow(inst, rank, &cands, 0, &mut members, &mut out);
            out
        })
        .collect();
    let mut seen = HashSet::new();
    let edges = per_request
        .into_iter()
        .flatten()
        .filter(|e| seen.insert(e.requests.clone()))
        .collect();
    Hypergraph { order, edges, rank }
}

fn grow(
    inst: &Instance,
    rank: usize,
    cands: &[RequestId],
    from: usize,
    members: &mut Vec<RequestId>,
    out: &mut Vec<Hyperedge>,
) {
    if members.len() == rank {
        return;
    }
    for i in from..cands.len() {
        members.push(cands[i]);
        if let Some((seq, eval)) = best_sequence(inst, members, true) {
            let mut requests = members.clone();
            requests.sort_unstable();
            out.push(Hyperedge { requests, seq, seq_cost: eval.cost.c, eval });
            grow(inst, rank, cands, i + 1, members, out);
        }
        members.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::line_instance;

    #[test]
    fn equal_earliest_listed_once() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (5, 10), (0, 50)), (1, 2, (5, 10), (0, 50))], &[0], 2);
        let order = vertex_order(&inst);
        let rank_of = [0, 1];
        assert_eq!(order, vec![0, 1]);
        assert_eq!(neighbors(&inst, &order, &rank_of, 0), vec![1]);
        assert!(neighbors(&inst, &order, &rank_of, 1).is_empty());
    }

    #[test]
    fn neighbor_boundary_is_inclusive() {
        // l_0 = 20 and buffer 0, so e = 20 is in and e = 21 is out.
        let inst = line_instance(
            &[0, 1, 2],
            &[(1, 2, (0, 5), (0, 20)), (1, 2, (20, 25), (0, 50)), (1, 2, (21, 25), (0, 50))],
            &[0],
            2,
        );
        let order = vertex_order(&inst);
        let rank_of = [0, 1, 2];
        assert_eq!(neighbors(&inst, &order, &rank_of, 0), vec![1]);
    }

    #[test]
    fn far_apart_windows_give_no_edge() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (0, 1), (0, 3)), (1, 2, (100, 101), (0, 103))], &[0], 2);
        let g = enumerate_hyperedges(&inst, 4);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn colocated_requests_pool_fully() {
        let reqs = [(1, 2, (0, 10), (0, 40)); 3];
        let inst = line_instance(&[0, 1, 9], &reqs, &[0], 3);
        let g = enumerate_hyperedges(&inst, 4);
        let sizes: Vec<usize> = g.edges.iter().map(|e| e.len()).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 2).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 3).count(), 1);
        let triple = g.edges.iter().find(|e| e.len() == 3).unwrap();
        assert_eq!(triple.seq_cost, 8);
    }
}
