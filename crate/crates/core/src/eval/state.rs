//! Mutable search state: per-vehicle visit sequences kept in sync with a
//! [`RouteIndex`], with checkpoint and rollback for trial moves.

use std::collections::BTreeSet;

use crate::eval::index::RouteIndex;
use crate::eval::insertion::Insertion;
use crate::eval::seq::SeqEval;
use crate::model::{Instance, NodeId, ObjectiveValue, RequestId, Route, Solution, VehicleId};

/// Saved active routes and unassigned set of a [`State`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub routes: Vec<(VehicleId, Vec<NodeId>)>,
    pub unassigned: BTreeSet<RequestId>,
}

#[derive(Clone, Debug, Default)]
struct Journal {
    routes: Vec<(VehicleId, Vec<NodeId>)>,
    unassigned: BTreeSet<RequestId>,
}

/// Working solution over a set of active vehicles and requests. A full
/// solve uses every vehicle and request; decomposition builds states over a
/// subset.
#[derive(Clone, Debug)]
pub struct State<'a> {
    inst: &'a Instance,
    vehicles: Vec<VehicleId>,
    active: Vec<bool>,
    member: Vec<bool>,
    routes: Vec<Vec<NodeId>>,
    route_cost: Vec<i64>,
    cost: i64,
    index: RouteIndex,
    unassigned: BTreeSet<RequestId>,
    journal: Option<Journal>,
    saved: Vec<u32>,
    generation: u32,
}

impl<'a> State<'a> {
    /// State over the whole solution.
    pub fn new(inst: &'a Instance, sol: &Solution) -> Self {
        let vehicles: Vec<VehicleId> = (0..inst.num_vehicles()).collect();
        Self::subproblem(inst, sol, &vehicles, sol.unassigned.iter().copied())
    }

    /// State over the routes of `vehicles` plus the given unassigned
    /// requests. Requests served by other vehicles are out of scope.
    pub fn subproblem(
        inst: &'a Instance,
        sol: &Solution,
        vehicles: &[VehicleId],
        unassigned: impl IntoIterator<Item = RequestId>,
    ) -> Self {
        let k = inst.num_vehicles();
        let mut st = State {
            inst,
            vehicles: vehicles.to_vec(),
            active: vec![false; k],
            member: vec![false; inst.num_requests()],
            routes: inst.vehicles().iter().map(|v| vec![v.start]).collect(),
            route_cost: vec![0; k],
            cost: 0,
            index: RouteIndex::new(inst),
            unassigned: unassigned.into_iter().collect(),
            journal: None,
            saved: vec![0; k],
            generation: 1,
        };
        for &r in &st.unassigned {
            st.member[r] = true;
        }
        let by_vehicle: Vec<Option<&Route>> = {
            let mut m = vec![None; k];
            for r in &sol.routes {
                m[r.vehicle] = Some(r);
            }
            m
        };
        for &v in vehicles {
            st.active[v] = true;
            if let Some(route) = by_vehicle[v] {
                for &i in route.stops() {
                    if let Some(r) = inst.request_of(i) {
                        st.member[r] = true;
                    }
                }
                st.install(v, route.visits.clone());
            }
        }
        st
    }

    pub fn inst(&self) -> &'a Instance {
        self.inst
    }

    /// Active vehicles in ascending id order.
    pub fn vehicles(&self) -> &[VehicleId] {
        &self.vehicles
    }

    pub fn is_active(&self, v: VehicleId) -> bool {
        self.active[v]
    }

    /// Whether the request belongs to this state.
    pub fn is_member(&self, r: RequestId) -> bool {
        self.member[r]
    }

    pub fn members(&self) -> impl Iterator<Item = RequestId> + '_ {
        self.member.iter().enumerate().filter(|(_, &m)| m).map(|(r, _)| r)
    }

    pub fn num_members(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn index(&self) -> &RouteIndex {
        &self.index
    }

    /// Visits of a vehicle, starting with its start node.
    pub fn route(&self, v: VehicleId) -> &[NodeId] {
        &self.routes[v]
    }

    pub fn route_cost(&self, v: VehicleId) -> i64 {
        self.route_cost[v]
    }

    pub fn route_eval(&self, v: VehicleId) -> &SeqEval {
        self.index.route_eval(self.inst, v)
    }

    pub fn route_len(&self, v: VehicleId) -> usize {
        self.routes[v].len() - 1
    }

    pub fn is_route_empty(&self, v: VehicleId) -> bool {
        self.routes[v].len() <= 1
    }

    pub fn used_vehicles(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.vehicles.iter().copied().filter(|&v| !self.is_route_empty(v))
    }

    pub fn num_used(&self) -> usize {
        self.used_vehicles().count()
    }

    /// Requests served by a route, in pickup order.
    pub fn requests_of(&self, v: VehicleId) -> Vec<RequestId> {
        self.routes[v][1..]
            .iter()
            .filter(|&&i| self.inst.is_pickup(i))
            .filter_map(|&i| self.inst.request_of(i))
            .collect()
    }

    pub fn vehicle_of_request(&self, r: RequestId) -> Option<VehicleId> {
        let v = self.index.vehicle_of(self.inst.request(r).pickup);
        (v != self.index.unassigned_id()).then_some(v)
    }

    pub fn unassigned(&self) -> &BTreeSet<RequestId> {
        &self.unassigned
    }

    pub fn cost(&self) -> i64 {
        self.cost
    }

    pub fn objective(&self) -> ObjectiveValue {
        ObjectiveValue { unassigned: self.unassigned.len(), cost: self.cost }
    }

    fn install(&mut self, v: VehicleId, visits: Vec<NodeId>) {
        self.index.rebuild(self.inst, v, &visits);
        self.routes[v] = visits;
        let c = self.index.route_eval(self.inst, v).cost.c;
        self.cost += c - self.route_cost[v];
        self.route_cost[v] = c;
    }

    fn touch(&mut self, v: VehicleId) {
        if let Some(j) = self.journal.as_mut() {
            if self.saved[v] != self.generation {
                self.saved[v] = self.generation;
                j.routes.push((v, self.routes[v].clone()));
            }
        }
    }

    /// Replaces a route. Nodes dropped from it must be accounted for by the
    /// caller (unassigned or moved elsewhere).
    pub fn set_route(&mut self, v: VehicleId, visits: Vec<NodeId>) {
        debug_assert!(self.active[v]);
        self.touch(v);
        let old = std::mem::take(&mut self.routes[v]);
        self.index.detach(self.inst, old[1..].iter().copied());
        self.install(v, visits);
    }

    /// Removes a served request from its route and marks it unassigned.
    pub fn remove_request(&mut self, r: RequestId) {
        let Some(v) = self.vehicle_of_request(r) else { return };
        let req = self.inst.request(r);
        let (p, d) = (req.pickup, req.delivery);
        let visits: Vec<NodeId> = self.routes[v].iter().copied().filter(|&i| i != p && i != d).collect();
        self.set_route(v, visits);
        self.unassigned.insert(r);
    }

    /// Removes a whole route's requests.
    pub fn clear_route(&mut self, v: VehicleId) -> Vec<RequestId> {
        let reqs = self.requests_of(v);
        let start = self.routes[v][0];
        self.set_route(v, vec![start]);
        self.unassigned.extend(reqs.iter().copied());
        reqs
    }

    /// Applies an insertion computed against the current state.
    pub fn apply(&mut self, ins: &Insertion) {
        let req = self.inst.request(ins.request);
        let (p, d) = (req.pickup, req.delivery);
        let old = &self.routes[ins.vehicle];
        let mut visits = Vec::with_capacity(old.len() + 2);
        for &i in old {
            visits.push(i);
            if i == ins.pickup_after {
                visits.push(p);
                if ins.delivery_after == p {
                    visits.push(d);
                }
            }
            if i == ins.delivery_after {
                visits.push(d);
            }
        }
        self.set_route(ins.vehicle, visits);
        self.unassigned.remove(&ins.request);
    }

    /// Starts recording changes; a later [`State::rollback`] restores the
    /// state as of this call.
    pub fn checkpoint(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.saved.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.journal = Some(Journal { routes: Vec::new(), unassigned: self.unassigned.clone() });
    }

    /// Keeps all changes since the last checkpoint.
    pub fn commit(&mut self) {
        self.journal = None;
    }

    pub fn rollback(&mut self) {
        let Some(j) = self.journal.take() else { return };
        for (v, _) in &j.routes {
            let old = std::mem::take(&mut self.routes[*v]);
            self.index.detach(self.inst, old[1..].iter().copied());
            self.routes[*v] = vec![old[0]];
        }
        for (v, visits) in j.routes {
            self.install(v, visits);
        }
        self.unassigned = j.unassigned;
    }

    /// Vehicles whose routes changed since the last checkpoint.
    pub fn touched(&self) -> Vec<VehicleId> {
        self.journal.as_ref().map_or_else(Vec::new, |j| j.routes.iter().map(|(v, _)| *v).collect())
    }

    /// Copy of the active routes and the unassigned set.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            routes: self.vehicles.iter().map(|&v| (v, self.routes[v].clone())).collect(),
            unassigned: self.unassigned.clone(),
        }
    }

    /// Restores a snapshot taken from this state.
    pub fn restore(&mut self, snap: &Snapshot) {
        let changed: Vec<&(VehicleId, Vec<NodeId>)> =
            snap.routes.iter().filter(|(v, visits)| self.routes[*v] != *visits).collect();
        for (v, _) in &changed {
            self.touch(*v);
            let old = std::mem::take(&mut self.routes[*v]);
            self.index.detach(self.inst, old[1..].iter().copied());
            self.routes[*v] = vec![old[0]];
        }
        for (v, visits) in changed {
            self.install(*v, visits.clone());
        }
        self.unassigned.clone_from(&snap.unassigned);
    }

    /// Routes of the active vehicles as a full solution; inactive vehicles
    /// get empty routes and out-of-scope requests are not listed anywhere.
    pub fn to_solution(&self) -> Solution {
        Solution {
            routes: (0..self.inst.num_vehicles())
                .map(|v| Route { vehicle: v, visits: self.routes[v].clone() })
                .collect(),
            unassigned: self.unassigned.clone(),
        }
    }

    /// Writes the active routes and the member requests' assignment status
    /// back into a full solution.
    pub fn write_into(&self, sol: &mut Solution) {
        for r in sol.routes.iter_mut() {
            if self.active[r.vehicle] {
                r.visits.clone_from(&self.routes[r.vehicle]);
            }
        }
        for r in self.members() {
            if self.unassigned.contains(&r) {
                sol.unassigned.insert(r);
            } else {
                sol.unassigned.remove(&r);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::insertion::best_insertion;
    use crate::model::tests::line_instance;
    use crate::model::validate;

    fn inst() -> Instance {
        line_instance(
            &[0, 2, 6, 3, 9],
            &[(1, 2, (0, 100), (0, 100)), (3, 4, (0, 100), (0, 100)), (1, 4, (0, 100), (0, 100))],
            &[0, 0],
            2,
        )
    }

    #[test]
    fn insert_remove_and_rollback() {
        let inst = inst();
        let mut st = State::new(&inst, &Solution::empty(&inst));
        for r in 0..3 {
            let ins = best_insertion(&st, r, 0).unwrap();
            st.apply(&ins);
            assert!(validate(&st.to_solution(), &inst).is_empty());
        }
        let before = st.to_solution();
        let obj = st.objective();
        st.checkpoint();
        st.remove_request(1);
        st.remove_request(0);
        let ins = best_insertion(&st, 0, 1).unwrap();
        st.apply(&ins);
        assert!(validate(&st.to_solution(), &inst).is_empty());
        st.rollback();
        assert_eq!(st.to_solution(), before);
        assert_eq!(st.objective(), obj);
        assert_eq!(st.cost(), before.objective(&inst).cost);
    }

    #[test]
    fn subproblem_writes_back() {
        let inst = inst();
        let mut st = State::new(&inst, &Solution::empty(&inst));
        st.apply(&best_insertion(&st, 0, 0).unwrap());
        st.apply(&best_insertion(&st, 1, 1).unwrap());
        let mut sol = st.to_solution();
        let mut sub = State::subproblem(&inst, &sol, &[1], [2]);
        assert!(sub.is_member(1) && sub.is_member(2) && !sub.is_member(0));
        sub.apply(&best_insertion(&sub, 2, 1).unwrap());
        sub.write_into(&mut sol);
        assert!(validate(&sol, &inst).is_empty());
        assert!(sol.unassigned.is_empty());
    }
}
