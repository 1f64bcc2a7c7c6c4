//! Solve modes: pooling then dispatching, the iterated local search, their
//! combination, and fleet-first search for classic instances.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dispatch::{
    assemble, blocks_from_matching, build_graph, kdspp, ArcRule, AssembleError, ConnectionLimits, GraphParams,
    KdspError, StartPolicy,
};
use crate::fleetmin::{hierarchical_run, AgesParams};
use crate::ils::{self, IlsParams, Progress};
use crate::model::{validate, Instance, Solution, VehicleId};
use crate::pooling::{enumerate_hyperedges, run_matching, weight, MatchingError, MatchingMethod, WeightFn};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Dispatch(#[from] KdspError),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("warm start is infeasible: {0}")]
    WarmStart(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Sequential,
    #[default]
    Integrated,
    Hybrid,
    ClassicFleetmin,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sequential" => Some(Mode::Sequential),
            "integrated" => Some(Mode::Integrated),
            "hybrid" => Some(Mode::Hybrid),
            "classic-fleetmin" | "classic" => Some(Mode::ClassicFleetmin),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sequential => "sequential",
            Mode::Integrated => "integrated",
            Mode::Hybrid => "hybrid",
            Mode::ClassicFleetmin => "classic-fleetmin",
        }
    }
}

/// Settings of the pooling and dispatching pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct MatheuristicParams {
    pub rank: usize,
    pub weight: WeightFn,
    pub matching: MatchingMethod,
    pub start_policy: StartPolicy,
    pub limits: Option<ConnectionLimits>,
}

impl Default for MatheuristicParams {
    fn default() -> Self {
        MatheuristicParams {
            rank: 4,
            weight: WeightFn::default(),
            matching: MatchingMethod::default(),
            start_policy: StartPolicy::Earliest,
            limits: Some(ConnectionLimits::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub seed: u64,
    pub matheuristic: MatheuristicParams,
    pub ils: IlsParams,
    pub ages: AgesParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::default(),
            seed: 0,
            matheuristic: MatheuristicParams::default(),
            ils: IlsParams::default(),
            ages: AgesParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub ils_iterations: u64,
    pub rnr_iterations: u64,
    pub wall_time: Duration,
}

/// Pools requests into rides by matching, then dispatches the rides with
/// one k-disjoint shortest path run over all vehicles.
pub fn sequential(inst: &Instance, params: &MatheuristicParams, rng: &mut ChaCha8Rng) -> Result<Solution, SolveError> {
    if params.rank < 1 {
        return Err(SolveError::Params("pooling rank must be at least 1".into()));
    }
    let hg = enumerate_hyperedges(inst, params.rank.max(1));
    let edges = hg.with_singletons(inst);
    let weights: Vec<f64> = edges.iter().map(|e| weight(e, params.weight, params.rank, inst)).collect();
    let matching = run_matching(params.matching, &edges, &weights, inst, rng)?;
    let blocks = blocks_from_matching(&matching, &edges, inst, params.start_policy);
    let vehicles: Vec<VehicleId> = (0..inst.num_vehicles()).collect();
    let graph = build_graph(
        inst,
        &blocks,
        &vehicles,
        GraphParams { rule: ArcRule::FixedStart, limits: params.limits, keep_origin_arcs: false },
    );
    let paths = kdspp(&graph, vehicles.len())?;
    Ok(assemble(inst, &graph, &blocks, &paths)?)
}

/// Runs the configured mode. `warm` seeds the search modes.
pub fn solve(
    inst: &Instance,
    cfg: &SolverConfig,
    warm: Option<Solution>,
    progress: &mut dyn FnMut(&Progress),
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    cfg.ils.check().map_err(SolveError::Params)?;
    cfg.ages.check().map_err(SolveError::Params)?;
    if let Some(w) = &warm {
        let v = validate(w, inst);
        if !v.is_empty() {
            return Err(SolveError::WarmStart(v[0].to_string()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (solution, ils_iterations, rnr_iterations) = match cfg.mode {
        Mode::Sequential => (sequential(inst, &cfg.matheuristic, &mut rng)?, 0, 0),
        Mode::Integrated => {
            let out = ils::run(inst, &cfg.ils, warm, &mut rng, None, progress);
            (out.solution, out.iterations, out.rnr_iterations)
        }
        Mode::Hybrid => {
            let seq = sequential(inst, &cfg.matheuristic, &mut rng)?;
            let start = match warm {
                Some(w) if w.objective(inst) < seq.objective(inst) => w,
                _ => seq,
            };
            let out = ils::run(inst, &cfg.ils, Some(start), &mut rng, None, progress);
            (out.solution, out.iterations, out.rnr_iterations)
        }
        Mode::ClassicFleetmin => {
            let out = hierarchical_run(inst, &cfg.ils, &cfg.ages, warm, &mut rng, progress);
            (out.solution, out.iterations, out.rnr_iterations)
        }
    };
    Ok(SolveOutcome { solution, ils_iterations, rnr_iterations, wall_time: started.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{generate, GeneratorConfig};
    use crate::rnr::RnrParams;

    fn config(mode: Mode) -> SolverConfig {
        SolverConfig {
            mode,
            seed: 5,
            ils: IlsParams {
                max_iterations: Some(3),
                rnr: RnrParams { iterations: 200, ..RnrParams::default() },
                workers: 1,
                ..IlsParams::default()
            },
            ..SolverConfig::default()
        }
    }

    #[test]
    fn modes_produce_feasible_solutions() {
        let inst = generate(&GeneratorConfig { requests: 60, vehicles: 8, seed: 2, ..GeneratorConfig::default() }).unwrap();
        let seq = solve(&inst, &config(Mode::Sequential), None, &mut |_| {}).unwrap();
        assert!(validate(&seq.solution, &inst).is_empty());
        let hyb = solve(&inst, &config(Mode::Hybrid), None, &mut |_| {}).unwrap();
        assert!(validate(&hyb.solution, &inst).is_empty());
        assert!(hyb.solution.objective(&inst) <= seq.solution.objective(&inst));
        let int = solve(&inst, &config(Mode::Integrated), None, &mut |_| {}).unwrap();
        assert!(validate(&int.solution, &inst).is_empty());
        assert_eq!(int.ils_iterations, 3);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [Mode::Sequential, Mode::Integrated, Mode::Hybrid, Mode::ClassicFleetmin] {
            assert_eq!(Mode::parse(m.name()), Some(m));
        }
        assert_eq!(Mode::parse("fast"), None);
    }
}
