//! Iterated local search: decomposition into route groups, concurrent
//! ruin-and-recreate, block recombination and perturbation.

pub mod construct;
pub mod history;
pub mod partition;
pub mod perturb;
pub mod recombine;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bs::BsGraph;
use crate::dispatch::ConnectionLimits;
use crate::eval::State;
use crate::model::{Instance, ObjectiveValue, Solution};
use crate::rnr::{self, Intensify, RecordToRecord, RnrParams};

pub use construct::{cheapest_insertion, construct};
pub use history::History;
pub use partition::{partition, Part};
pub use perturb::{exchange, perturb, random_insertion, relocate};
pub use recombine::{recombine, recombine_params};

#[derive(Clone, Debug, PartialEq)]
pub struct IlsParams {
    pub time_limit: Duration,
    /// Stop after this many iterations regardless of time.
    pub max_iterations: Option<u64>,
    /// Stop once this many ruin-recreate iterations ran in total.
    pub rnr_budget: Option<u64>,
    /// Planned number of iterations; sets the threshold decrement.
    pub planned_iterations: u64,
    pub rnr: RnrParams,
    /// Average route nodes per subproblem.
    pub chi: usize,
    /// Perturbation moves; `None` means `ceil(1.66 |R|)`.
    pub perturb_moves: Option<usize>,
    pub relocate_share: f64,
    pub t_init: f64,
    pub bs_k: Option<usize>,
    pub bs_thickness: Option<usize>,
    pub limits: Option<ConnectionLimits>,
    /// Worker threads; 0 uses the available parallelism.
    pub workers: usize,
    /// Compare solutions by routes used before cost.
    pub fleet_first: bool,
}

impl Default for IlsParams {
    fn default() -> Self {
        IlsParams {
            time_limit: Duration::from_secs(60),
            max_iterations: None,
            rnr_budget: None,
            planned_iterations: 5000,
            rnr: RnrParams::default(),
            chi: 500,
            perturb_moves: None,
            relocate_share: 0.5,
            t_init: 0.333,
            bs_k: Some(4),
            bs_thickness: Some(4),
            limits: Some(ConnectionLimits::default()),
            workers: 0,
            fleet_first: false,
        }
    }
}

impl IlsParams {
    pub fn perturb_moves(&self, inst: &Instance) -> usize {
        self.perturb_moves.unwrap_or_else(|| (1.66 * inst.num_requests() as f64).ceil() as usize)
    }

    pub fn check(&self) -> Result<(), String> {
        self.rnr.check()?;
        if !(0.0..=1.0).contains(&self.relocate_share) {
            return Err(format!("relocate share must lie in [0, 1], got {}", self.relocate_share));
        }
        if self.chi == 0 || self.planned_iterations == 0 || self.t_init < 0.0 {
            return Err("chi and planned iterations must be positive, t_init non-negative".into());
        }
        if let Some(k) = self.bs_k {
            if !(1..=16).contains(&k) {
                return Err(format!("BS k must lie in 1..=16, got {k}"));
            }
        }
        Ok(())
    }
}

/// Lexicographic comparison key of a solution.
pub fn solution_key(sol: &Solution, inst: &Instance, fleet_first: bool) -> (usize, usize, i64) {
    let obj = sol.objective(inst);
    (obj.unassigned, if fleet_first { sol.routes_used() } else { 0 }, obj.cost)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Progress {
    pub iteration: u64,
    pub best: ObjectiveValue,
    pub routes_used: usize,
    pub elapsed: Duration,
    pub rnr_iterations: u64,
}

#[derive(Clone, Debug)]
pub struct IlsOutcome {
    pub solution: Solution,
    pub iterations: u64,
    pub rnr_iterations: u64,
}

/// Keeps a new best; otherwise returns to the best with probability
/// `i_last / i_ils`. Returns true when reverting.
pub fn outer_revert<R: Rng>(i_ils: u64, i_last: u64, rng: &mut R) -> bool {
    let p = i_last as f64 / i_ils.max(1) as f64;
    p >= 1.0 || rng.gen::<f64>() < p
}

/// Per-iteration hook run before decomposition, e.g. fleet minimization.
pub type IterationHook<'h> = &'h mut dyn FnMut(&mut Solution, Instant);

/// Runs the search from `warm` or a constructed solution until the time
/// limit or iteration cap is hit and returns the best solution.
pub fn run<R: Rng>(
    inst: &Instance,
    params: &IlsParams,
    warm: Option<Solution>,
    rng: &mut R,
    mut hook: Option<IterationHook<'_>>,
    progress: &mut dyn FnMut(&Progress),
) -> IlsOutcome {
    let started = Instant::now();
    let deadline = started + params.time_limit;
    let key = |s: &Solution| solution_key(s, inst, params.fleet_first);
    let mut working = warm.unwrap_or_else(|| construct(inst, rng));
    let mut best = working.clone();
    let mut history = History::new(inst.num_requests());
    history.record(&working, inst);
    let m_s = params.rnr.iterations.max(1);
    let mut acc = RecordToRecord::new(params.t_init, params.planned_iterations.saturating_mul(m_s));
    let intensify = params.bs_k.map(|k| Intensify { graph: BsGraph::new(k), thickness: params.bs_thickness });
    let graph_params = recombine_params(params.limits);
    let z_a = params.perturb_moves(inst);
    let workers = if params.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        params.workers
    };
    let pool = (workers > 1).then(|| rayon::ThreadPoolBuilder::new().num_threads(workers).build().ok()).flatten();

    let (mut i_ils, mut i_last, mut rnr_iterations) = (0u64, 0u64, 0u64);
    progress(&Progress {
        iteration: 0,
        best: best.objective(inst),
        routes_used: best.routes_used(),
        elapsed: started.elapsed(),
        rnr_iterations,
    });
    while Instant::now() < deadline
        && params.max_iterations.map_or(true, |m| i_ils < m)
        && params.rnr_budget.map_or(true, |b| rnr_iterations < b)
    {
        i_ils += 1;
        if let Some(h) = hook.as_mut() {
            h(&mut working, deadline);
            if key(&working) < key(&best) {
                best = working.clone();
                i_last = 0;
            }
        }
        let parts = partition(&working, inst, params.chi, &history, rng);
        let seeds: Vec<u64> = parts.iter().map(|_| rng.gen()).collect();
        let solve_part = |(part, seed): (&Part, u64)| {
            let mut st = State::subproblem(inst, &working, &part.vehicles, part.unassigned.iter().copied());
            let mut part_acc = acc.clone();
            let mut part_rng = ChaCha8Rng::seed_from_u64(seed);
            let out = rnr::run(&mut st, &params.rnr, &mut part_acc, intensify.as_ref(), &mut part_rng, Some(deadline));
            (st, out.iterations)
        };
        let jobs: Vec<(&Part, u64)> = parts.iter().zip(seeds).collect();
        let results: Vec<(State<'_>, u64)> = match (&pool, jobs.len() > 1) {
            (Some(pool), true) => pool.install(|| jobs.into_par_iter().map(solve_part).collect()),
            _ => jobs.into_iter().map(solve_part).collect(),
        };
        let mut merged = working.clone();
        for (st, iters) in &results {
            st.write_into(&mut merged);
            rnr_iterations += iters;
        }
        drop(results);
        acc.advance(m_s);

        let mut cand = merged;
        if let Some(rec) = recombine(&cand, inst, graph_params) {
            if key(&rec) <= key(&cand) {
                cand = rec;
            }
        }
        let (co, bo) = (cand.objective(inst), best.objective(inst));
        let fleet_ok = !params.fleet_first || cand.routes_used() <= best.routes_used();
        if key(&cand) < key(&best) || (fleet_ok && acc.admits(co, bo)) {
            working = cand;
            history.record(&working, inst);
        }
        if key(&working) < key(&best) {
            best = working.clone();
            i_last = 0;
        } else {
            i_last += 1;
            if outer_revert(i_ils, i_last, rng) {
                working = best.clone();
            }
        }
        let mut st = State::new(inst, &working);
        perturb(&mut st, z_a, params.relocate_share, params.rnr.allow_empty_routes, rng);
        working = st.to_solution();
        progress(&Progress {
            iteration: i_ils,
            best: best.objective(inst),
            routes_used: best.routes_used(),
            elapsed: started.elapsed(),
            rnr_iterations,
        });
    }
    IlsOutcome { solution: best, iterations: i_ils, rnr_iterations }
}
