//! Node-indexed route bookkeeping with forward and backward sequence summaries.

use crate::eval::seq::SeqEval;
use crate::model::{Instance, NodeId, VehicleId};

/// Marker for a missing predecessor or successor.
pub const NONE: NodeId = usize::MAX;

#[derive(Clone, Debug)]
pub struct RouteIndex {
    pred: Vec<NodeId>,
    succ: Vec<NodeId>,
    vehicle_of: Vec<VehicleId>,
    pos: Vec<usize>,
    fw: Vec<SeqEval>,
    bw: Vec<SeqEval>,
    last: Vec<NodeId>,
    tail: Vec<Option<SeqEval>>,
    unassigned: VehicleId,
}

impl RouteIndex {
    /// Index with every vehicle on an empty route and every request node
    /// detached.
    pub fn new(inst: &Instance) -> Self {
        let nn = inst.num_nodes();
        let k = inst.num_vehicles();
        let single: Vec<SeqEval> = (0..nn).map(|i| SeqEval::node(inst, i)).collect();
        let tail: Vec<Option<SeqEval>> = inst
            .vehicles()
            .iter()
            .map(|v| v.end.map(|e| SeqEval::node(inst, e)))
            .collect();
        let mut idx = RouteIndex {
            pred: vec![NONE; nn],
            succ: vec![NONE; nn],
            vehicle_of: vec![k; nn],
            pos: vec![0; nn],
            fw: single.clone(),
            bw: single,
            last: inst.vehicles().iter().map(|v| v.start).collect(),
            tail,
            unassigned: k,
        };
        for v in inst.vehicles() {
            idx.rebuild(inst, v.id, &[v.start]);
        }
        idx
    }

    /// Recomputes links and summaries for one route in linear time.
    pub fn rebuild(&mut self, inst: &Instance, v: VehicleId, visits: &[NodeId]) {
        debug_assert_eq!(visits.first(), Some(&inst.vehicle(v).start));
        let mut prev = NONE;
        for (p, &i) in visits.iter().enumerate() {
            self.pred[i] = prev;
            self.succ[i] = NONE;
            if prev != NONE {
                self.succ[prev] = i;
            }
            self.vehicle_of[i] = v;
            self.pos[i] = p;
            self.fw[i] = if prev == NONE {
                SeqEval::node(inst, i)
            } else {
                self.fw[prev].push(inst, i)
            };
            prev = i;
        }
        self.last[v] = prev;
        let mut next: Option<SeqEval> = self.tail[v];
        for &i in visits.iter().rev() {
            let own = SeqEval::node(inst, i);
            self.bw[i] = match next {
                Some(n) => SeqEval::concat(inst, &own, &n),
                None => own,
            };
            next = Some(self.bw[i]);
        }
    }

    /// Marks nodes as not belonging to any route.
    pub fn detach(&mut self, inst: &Instance, nodes: impl IntoIterator<Item = NodeId>) {
        for i in nodes {
            self.pred[i] = NONE;
            self.succ[i] = NONE;
            self.vehicle_of[i] = self.unassigned;
            self.pos[i] = 0;
            self.fw[i] = SeqEval::node(inst, i);
            self.bw[i] = self.fw[i];
        }
    }

    #[inline]
    pub fn pred(&self, i: NodeId) -> NodeId {
        self.pred[i]
    }

    #[inline]
    pub fn succ(&self, i: NodeId) -> NodeId {
        self.succ[i]
    }

    /// Vehicle serving the node; [`RouteIndex::unassigned_id`] if none.
    #[inline]
    pub fn vehicle_of(&self, i: NodeId) -> VehicleId {
        self.vehicle_of[i]
    }

    pub fn unassigned_id(&self) -> VehicleId {
        self.unassigned
    }

    #[inline]
    pub fn position(&self, i: NodeId) -> usize {
        self.pos[i]
    }

    /// Summary of the prefix from the vehicle start up to and including `i`.
    #[inline]
    pub fn fw(&self, i: NodeId) -> &SeqEval {
        &self.fw[i]
    }

    /// Summary of the suffix from `i` to the end of the route, including the
    /// end node of closed routes.
    #[inline]
    pub fn bw(&self, i: NodeId) -> &SeqEval {
        &self.bw[i]
    }

    #[inline]
    pub fn last(&self, v: VehicleId) -> NodeId {
        self.last[v]
    }

    /// Summary of the implicit end node of a closed route.
    #[inline]
    pub fn tail(&self, v: VehicleId) -> Option<&SeqEval> {
        self.tail[v].as_ref()
    }

    /// Summary of everything after `i` in its route, if anything.
    #[inline]
    pub fn after(&self, i: NodeId) -> Option<&SeqEval> {
        match self.succ[i] {
            NONE => self.tail[self.vehicle_of[i]].as_ref(),
            s => Some(&self.bw[s]),
        }
    }

    /// Summary of a whole route.
    #[inline]
    pub fn route_eval(&self, inst: &Instance, v: VehicleId) -> &SeqEval {
        &self.bw[inst.vehicle(v).start]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::line_instance;
    use crate::model::{propagate_schedule, Route};

    #[test]
    fn empty_route_is_single_node() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (0, 100), (0, 100))], &[0], 1);
        let idx = RouteIndex::new(&inst);
        let s = inst.vehicle(0).start;
        assert_eq!(*idx.fw(s), SeqEval::node(&inst, s));
        assert_eq!(*idx.bw(s), SeqEval::node(&inst, s));
    }

    #[test]
    fn rebuild_matches_schedule() {
        let inst = line_instance(
            &[0, 4, 9, 3],
            &[(1, 2, (10, 20), (0, 40)), (3, 2, (0, 8), (0, 40))],
            &[0],
            2,
        );
        let s = inst.vehicle(0).start;
        for visits in [vec![s, 0, 2, 1, 3], vec![s, 2, 0, 3, 1], vec![s, 2, 0, 1, 3]] {
            let mut idx = RouteIndex::new(&inst);
            idx.rebuild(&inst, 0, &visits);
            let last = *visits.last().unwrap();
            let route = Route { vehicle: 0, visits: visits.clone() };
            let sched = propagate_schedule(&route, &inst);
            assert_eq!(idx.fw(last).time.feasible, sched.is_feasible(), "{visits:?}");
            assert_eq!(idx.fw(last).cost.c, route.cost(&inst));
            assert_eq!(idx.fw(last), idx.route_eval(&inst, 0));
            assert_eq!(idx.vehicle_of(visits[2]), 0);
            assert_eq!(idx.position(visits[2]), 2);
        }
    }
}
