//! Route elimination by guided ejection search with decaying penalties.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{best_insertion, Insertion, State};
use crate::ils::{self, perturb, IlsOutcome, IlsParams, Progress};
use crate::model::{Instance, RequestId, Solution, VehicleId};
use crate::rnr::{place, RnrParams};

/// Failed-insertion counters per request.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyTable {
    pub rho: Vec<u64>,
}

impl PenaltyTable {
    pub fn new(num_requests: usize) -> Self {
        PenaltyTable { rho: vec![1; num_requests] }
    }

    /// `rho <- max(1, floor(lambda * rho))`.
    pub fn decay(&mut self, lambda: f64) {
        for p in &mut self.rho {
            *p = ((*p as f64 * lambda).floor() as u64).max(1);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgesParams {
    pub lambda: f64,
    /// Perturbations allowed per route elimination attempt.
    pub max_perturbations: u64,
    /// Moves per perturbation.
    pub perturb_moves: usize,
    pub relocate_share: f64,
}

impl Default for AgesParams {
    fn default() -> Self {
        AgesParams { lambda: 0.9, max_perturbations: 10_000, perturb_moves: 20, relocate_share: 0.5 }
    }
}

impl AgesParams {
    pub fn check(&self) -> Result<(), String> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(format!("lambda must lie in (0, 1], got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.relocate_share) {
            return Err(format!("relocate share must lie in [0, 1], got {}", self.relocate_share));
        }
        Ok(())
    }
}

/// Cheapest insertion of `r` over the non-empty routes.
fn insert_used(st: &State<'_>, r: RequestId) -> Option<Insertion> {
    st.used_vehicles()
        .filter_map(|v| best_insertion(st, r, v))
        .min_by_key(|ins| (ins.delta, ins.vehicle))
}

/// Ejection of one or two requests from a route that makes room for `r`.
#[derive(Clone, Debug)]
struct Ejection {
    out: Vec<RequestId>,
    penalty: u64,
}

/// Minimum-penalty ejection over all single and same-route pair ejections;
/// equal-penalty candidates are sampled uniformly by reservoir sampling.
fn find_ejection<R: Rng>(st: &mut State<'_>, r: RequestId, rho: &[u64], rng: &mut R) -> Option<Ejection> {
    let mut best: Option<Ejection> = None;
    let mut ties = 0u64;
    let mut offer = |cand: Ejection, best: &mut Option<Ejection>, rng: &mut R| match best {
        Some(b) if cand.penalty > b.penalty => {}
        Some(b) if cand.penalty == b.penalty => {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                *best = Some(cand);
            }
        }
        _ => {
            ties = 1;
            *best = Some(cand);
        }
    };
    let used: Vec<VehicleId> = st.used_vehicles().collect();
    for &w in &used {
        let reqs = st.requests_of(w);
        for &e in &reqs {
            if best.as_ref().is_some_and(|b| rho[e] > b.penalty) {
                continue;
            }
            st.checkpoint();
            st.remove_request(e);
            let fits = best_insertion(st, r, w).is_some();
            st.rollback();
            if fits {
                offer(Ejection { out: vec![e], penalty: rho[e] }, &mut best, rng);
            }
        }
    }
    for &w in &used {
        let reqs = st.requests_of(w);
        let mut pairs: Vec<(u64, RequestId, RequestId)> = Vec::new();
        for (i, &a) in reqs.iter().enumerate() {
            for &b in &reqs[i + 1..] {
                pairs.push((rho[a] + rho[b], a, b));
            }
        }
        pairs.sort_unstable();
        for (pen, a, b) in pairs {
            if best.as_ref().is_some_and(|x| pen > x.penalty) {
                break;
            }
            st.checkpoint();
            st.remove_request(a);
            st.remove_request(b);
            let fits = best_insertion(st, r, w).is_some();
            st.rollback();
            if fits {
                offer(Ejection { out: vec![a, b], penalty: pen }, &mut best, rng);
            }
        }
    }
    best
}

/// Tries to empty one route. On success the state has one route fewer; on
/// failure it is left unchanged.
pub fn eliminate_route<R: Rng>(
    st: &mut State<'_>,
    params: &AgesParams,
    rho: &mut PenaltyTable,
    rng: &mut R,
    deadline: Option<Instant>,
) -> bool {
    let used: Vec<VehicleId> = st.used_vehicles().collect();
    if used.len() <= 1 {
        return false;
    }
    let fewest = used.iter().map(|&v| st.requests_of(v).len()).min().unwrap_or(0);
    let ties: Vec<VehicleId> = used.iter().copied().filter(|&v| st.requests_of(v).len() == fewest).collect();
    let v = *ties.choose(rng).expect("non-empty");
    let saved = st.snapshot();
    let mut stack = st.clear_route(v);
    stack.shuffle(rng);
    let mut min_stack = stack.len();
    let mut budget = params.max_perturbations;
    while let Some(r) = stack.pop() {
        if let Some(ins) = insert_used(st, r) {
            st.apply(&ins);
            continue;
        }
        rho.rho[r] += 1;
        match find_ejection(st, r, &rho.rho, rng) {
            Some(ej) => {
                for &e in &ej.out {
                    st.remove_request(e);
                }
                let ins = insert_used(st, r).expect("ejection made room");
                st.apply(&ins);
                stack.extend(ej.out);
            }
            None => stack.insert(0, r),
        }
        perturb(st, params.perturb_moves, params.relocate_share, false, rng);
        if stack.len() < min_stack {
            min_stack = stack.len();
            budget = params.max_perturbations;
        }
        budget = budget.saturating_sub(1);
        if budget == 0 || deadline.is_some_and(|d| Instant::now() >= d) {
            st.restore(&saved);
            return false;
        }
    }
    true
}

/// Removes routes until an elimination attempt fails. `solution` must serve
/// every request; the result does too and never uses more routes.
pub fn ages<R: Rng>(
    inst: &Instance,
    sol: &Solution,
    params: &AgesParams,
    rho: &mut PenaltyTable,
    rng: &mut R,
    deadline: Option<Instant>,
) -> Solution {
    rho.decay(params.lambda);
    if params.max_perturbations == 0 || !sol.unassigned.is_empty() {
        return sol.clone();
    }
    let mut st = State::new(inst, sol);
    while eliminate_route(&mut st, params, rho, rng, deadline) {}
    st.to_solution()
}

/// Sequential insertion: each request goes to its cheapest position in a
/// used route, opening a new route only when none fits.
pub fn construct_sequential<R: Rng>(inst: &Instance, rng: &mut R) -> Solution {
    let mut st = State::new(inst, &Solution::empty(inst));
    let mut order: Vec<RequestId> = (0..inst.num_requests()).collect();
    order.shuffle(rng);
    for r in order {
        if let Some(ins) = place(&st, r, 0.0, true, rng) {
            st.apply(&ins);
        }
    }
    st.to_solution()
}

/// Iterated local search minimizing routes first and cost second, with a
/// route elimination phase ahead of every iteration.
pub fn hierarchical_run<R: Rng>(
    inst: &Instance,
    params: &IlsParams,
    ages_params: &AgesParams,
    warm: Option<Solution>,
    rng: &mut R,
    progress: &mut dyn FnMut(&Progress),
) -> IlsOutcome {
    let params = IlsParams {
        fleet_first: true,
        rnr: RnrParams { allow_empty_routes: false, ..params.rnr.clone() },
        ..params.clone()
    };
    let start = warm.unwrap_or_else(|| construct_sequential(inst, rng));
    let mut rho = PenaltyTable::new(inst.num_requests());
    let mut ages_rng = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut hook = |sol: &mut Solution, deadline: Instant| {
        let out = ages(inst, sol, ages_params, &mut rho, &mut ages_rng, Some(deadline));
        if out.routes_used() < sol.routes_used() {
            log::debug!("fleet reduced to {} routes", out.routes_used());
            *sol = out;
        }
    };
    ils::run(inst, &params, Some(start), rng, Some(&mut hook), progress)
}
