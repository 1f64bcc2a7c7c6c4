//! Greedy insertion with blinks.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::{scan_insertions, Insertion, State};
use crate::model::{Instance, RequestId, VehicleId};
use crate::rnr::RnrParams;

/// Request orderings used by recreate, in roulette-weight order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortCriterion {
    Random,
    Far,
    Close,
    TwLength,
    TwStart,
    TwEnd,
}

impl SortCriterion {
    pub const ALL: [SortCriterion; 6] = [
        SortCriterion::Random,
        SortCriterion::Far,
        SortCriterion::Close,
        SortCriterion::TwLength,
        SortCriterion::TwStart,
        SortCriterion::TwEnd,
    ];
}

/// Per-instance data shared by recreate calls.
#[derive(Clone, Debug)]
pub struct RecreateContext {
    /// Cost from each request's pickup to the closest vehicle start.
    closest_start: Vec<i64>,
}

impl RecreateContext {
    pub fn new(inst: &Instance, vehicles: &[VehicleId]) -> Self {
        let closest_start = inst
            .requests()
            .iter()
            .map(|r| vehicles.iter().map(|&v| inst.cost(inst.vehicle(v).start, r.pickup)).min().unwrap_or(0))
            .collect();
        RecreateContext { closest_start }
    }
}

/// Orders `pool` by a criterion; ties go to the lower request id.
pub fn sort_pool<R: Rng>(inst: &Instance, ctx: &RecreateContext, pool: &mut [RequestId], c: SortCriterion, rng: &mut R) {
    let pickup = |r: RequestId| inst.node(inst.request(r).pickup);
    match c {
        SortCriterion::Random => pool.shuffle(rng),
        SortCriterion::Far => pool.sort_by_key(|&r| (std::cmp::Reverse(ctx.closest_start[r]), r)),
        SortCriterion::Close => pool.sort_by_key(|&r| (ctx.closest_start[r], r)),
        SortCriterion::TwLength => pool.sort_by_key(|&r| (pickup(r).due.saturating_sub(pickup(r).ready), r)),
        SortCriterion::TwStart => pool.sort_by_key(|&r| (pickup(r).ready, r)),
        SortCriterion::TwEnd => pool.sort_by_key(|&r| (std::cmp::Reverse(pickup(r).due), r)),
    }
}

/// Cheapest insertion of `r` over non-empty routes with blinks, falling back
/// to the cheapest empty route.
pub fn place<R: Rng>(st: &State<'_>, r: RequestId, blink: f64, allow_empty: bool, rng: &mut R) -> Option<Insertion> {
    let mut best: Option<Insertion> = None;
    for &v in st.vehicles() {
        if st.is_route_empty(v) {
            continue;
        }
        let cand = scan_insertions(st, r, v, || blink <= 0.0 || rng.gen::<f64>() >= blink);
        if let Some(c) = cand {
            if best.map_or(true, |b| c.delta < b.delta) {
                best = Some(c);
            }
        }
    }
    if best.is_none() && allow_empty {
        for &v in st.vehicles() {
            if !st.is_route_empty(v) {
                continue;
            }
            if let Some(c) = scan_insertions(st, r, v, || true) {
                if best.map_or(true, |b| c.delta < b.delta) {
                    best = Some(c);
                }
            }
        }
    }
    best
}

/// Reinserts up to `insert_limit` unassigned requests. Returns how many were
/// placed.
pub fn recreate<R: Rng>(st: &mut State<'_>, params: &RnrParams, ctx: &RecreateContext, rng: &mut R) -> usize {
    if st.unassigned().is_empty() {
        return 0;
    }
    let mut pool: Vec<RequestId> = st.unassigned().iter().copied().collect();
    let dist = WeightedIndex::new(params.sort_weights).expect("sort weights are positive");
    let criterion = SortCriterion::ALL[dist.sample(rng)];
    sort_pool(st.inst(), ctx, &mut pool, criterion, rng);
    pool.truncate(params.insert_limit);
    let mut placed = 0;
    for r in pool {
        if let Some(ins) = place(st, r, params.blink, params.allow_empty_routes, rng) {
            st.apply(&ins);
            placed += 1;
        }
    }
    placed
}
