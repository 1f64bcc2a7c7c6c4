//! Cheapest feasible insertion of a request into a route.

use crate::eval::seq::SeqEval;
use crate::eval::state::State;
use crate::model::{NodeId, RequestId, VehicleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub request: RequestId,
    pub vehicle: VehicleId,
    /// Node after which the pickup goes.
    pub pickup_after: NodeId,
    /// Node after which the delivery goes; the pickup itself when the
    /// delivery follows immediately.
    pub delivery_after: NodeId,
    pub delta: i64,
}

/// Minimum cost-delta feasible insertion of `r` into the route of `v`.
pub fn best_insertion(st: &State<'_>, r: RequestId, v: VehicleId) -> Option<Insertion> {
    scan_insertions(st, r, v, || true)
}

/// Like [`best_insertion`], but a position pair is only considered when
/// `consider` returns true; it is called once per feasible candidate in
/// lexicographic (pickup, delivery) order. Used for blinks.
pub fn scan_insertions(
    st: &State<'_>,
    r: RequestId,
    v: VehicleId,
    mut consider: impl FnMut() -> bool,
) -> Option<Insertion> {
    let inst = st.inst();
    let idx = st.index();
    let q = inst.capacity();
    let req = inst.request(r);
    let (p, d) = (req.pickup, req.delivery);
    let p_eval = SeqEval::node(inst, p);
    let d_eval = SeqEval::node(inst, d);
    let route = st.route(v);
    let old_cost = st.route_cost(v);
    let mut best: Option<Insertion> = None;

    let finish = |head: &SeqEval, after: NodeId| -> SeqEval {
        let with_d = SeqEval::concat(inst, head, &d_eval);
        match idx.after(after) {
            Some(rest) => SeqEval::concat(inst, &with_d, rest),
            None => with_d,
        }
    };

    for (i, &a) in route.iter().enumerate() {
        let prefix = idx.fw(a);
        if !prefix.is_feasible(q) {
            break;
        }
        let head = SeqEval::concat(inst, prefix, &p_eval);
        if !head.is_feasible(q) {
            continue;
        }
        let mut offer = |cand: SeqEval, delivery_after: NodeId, best: &mut Option<Insertion>| {
            if !cand.is_feasible(q) || !consider() {
                return;
            }
            let delta = cand.cost.c - old_cost;
            if best.map_or(true, |b| delta < b.delta) {
                *best = Some(Insertion { request: r, vehicle: v, pickup_after: a, delivery_after, delta });
            }
        };
        offer(finish(&head, a), p, &mut best);
        let mut seg = head;
        for &x in &route[i + 1..] {
            seg = seg.push(inst, x);
            if !seg.is_feasible(q) {
                break;
            }
            offer(finish(&seg, x), x, &mut best);
        }
    }
    best
}
