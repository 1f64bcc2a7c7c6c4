//! Parallel insertion construction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::{best_insertion, Insertion, State};
use crate::model::{Instance, RequestId, Solution};

/// Cheapest feasible insertion of `r` over all active routes; ties go to
/// the lower vehicle id.
pub fn cheapest_insertion(st: &State<'_>, r: RequestId) -> Option<Insertion> {
    let mut best: Option<Insertion> = None;
    for &v in st.vehicles() {
        if let Some(c) = best_insertion(st, r, v) {
            if best.map_or(true, |b| c.delta < b.delta) {
                best = Some(c);
            }
        }
    }
    best
}

/// Seeds every vehicle with one random request where feasible, then inserts
/// the rest in random order at their cheapest position.
pub fn construct<R: Rng>(inst: &Instance, rng: &mut R) -> Solution {
    let mut st = State::new(inst, &Solution::empty(inst));
    let mut order: Vec<RequestId> = (0..inst.num_requests()).collect();
    order.shuffle(rng);
    let mut rest = Vec::with_capacity(order.len());
    let mut it = order.into_iter();
    for v in 0..inst.num_vehicles() {
        let Some(r) = it.next() else { break };
        match best_insertion(&st, r, v) {
            Some(ins) => st.apply(&ins),
            None => rest.push(r),
        }
    }
    rest.extend(it);
    for r in rest {
        if let Some(ins) = cheapest_insertion(&st, r) {
            st.apply(&ins);
        }
    }
    st.to_solution()
}
