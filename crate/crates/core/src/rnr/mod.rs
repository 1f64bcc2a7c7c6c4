//! Ruin and recreate: string removal, greedy reinsertion with blinks and
//! record-to-record acceptance, with optional BS(k) polishing of new bests.

pub mod accept;
pub mod recreate;
pub mod ruin;

use std::time::Instant;

use rand::Rng;

use crate::bs::{improve_route, BsGraph};
use crate::eval::State;
use crate::model::ObjectiveValue;

pub use accept::RecordToRecord;
pub use recreate::{place, recreate, sort_pool, RecreateContext, SortCriterion};
pub use ruin::{ruin, RuinStats, StringRemoval};

#[derive(Clone, Debug, PartialEq)]
pub struct RnrParams {
    /// Average number of removed nodes.
    pub avg_removed: f64,
    pub max_string_len: f64,
    pub split_prob: f64,
    pub substring_prob: f64,
    pub blink: f64,
    /// Roulette weights of [`SortCriterion::ALL`].
    pub sort_weights: [f64; 6],
    pub insert_limit: usize,
    pub iterations: u64,
    pub allow_empty_routes: bool,
}

impl Default for RnrParams {
    fn default() -> Self {
        RnrParams {
            avg_removed: 15.0,
            max_string_len: 10.0,
            split_prob: 0.75,
            substring_prob: 0.10,
            blink: 0.05,
            sort_weights: [6.0, 2.0, 1.0, 4.0, 2.0, 2.0],
            insert_limit: 40,
            iterations: 2500,
            allow_empty_routes: true,
        }
    }
}

impl RnrParams {
    pub fn check(&self) -> Result<(), String> {
        let probs = [("split_prob", self.split_prob), ("substring_prob", self.substring_prob), ("blink", self.blink)];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.avg_removed < 1.0 || self.max_string_len < 1.0 || self.insert_limit == 0 {
            return Err("removal sizes and insert limit must be at least 1".into());
        }
        if self.sort_weights.iter().any(|&w| !(w >= 0.0)) || self.sort_weights.iter().sum::<f64>() <= 0.0 {
            return Err("sort weights must be non-negative with a positive sum".into());
        }
        Ok(())
    }
}

/// BS(k) intensification settings.
#[derive(Clone, Debug)]
pub struct Intensify {
    pub graph: BsGraph,
    pub thickness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnrOutcome {
    pub iterations: u64,
    pub start: ObjectiveValue,
    pub best: ObjectiveValue,
}

impl RnrOutcome {
    pub fn improved(&self) -> bool {
        self.best < self.start
    }
}

/// Runs `params.iterations` ruin-recreate steps on `st` and leaves it at the
/// best state found.
pub fn run<R: Rng>(
    st: &mut State<'_>,
    params: &RnrParams,
    acc: &mut RecordToRecord,
    intensify: Option<&Intensify>,
    rng: &mut R,
    deadline: Option<Instant>,
) -> RnrOutcome {
    let ctx = RecreateContext::new(st.inst(), st.vehicles());
    let start = st.objective();
    let mut best = start;
    let mut best_snap = st.snapshot();
    let mut current = start;
    let mut iterations = 0;
    while iterations < params.iterations {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        iterations += 1;
        st.checkpoint();
        if st.num_used() > 0 {
            ruin(st, params, rng);
        }
        recreate(st, params, &ctx, rng);
        let cand = st.objective();
        if cand == current && st.touched().is_empty() {
            st.commit();
            acc.accept(cand, best);
            continue;
        }
        if !acc.accept(cand, best) {
            st.rollback();
            continue;
        }
        let touched = st.touched();
        st.commit();
        current = cand;
        if cand < best {
            if let Some(bs) = intensify {
                for v in touched {
                    if !st.is_route_empty(v) {
                        improve_route(st, v, &bs.graph, bs.thickness);
                    }
                }
                current = st.objective();
            }
            best = current;
            best_snap = st.snapshot();
        }
    }
    st.commit();
    if st.objective() != best {
        st.restore(&best_snap);
    }
    RnrOutcome { iterations, start, best }
}
