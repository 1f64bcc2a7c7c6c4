//! Linear record-to-record acceptance.

use crate::model::ObjectiveValue;

#[derive(Clone, Debug, PartialEq)]
pub struct RecordToRecord {
    pub t_init: f64,
    pub t: f64,
    pub t_dec: f64,
}

impl RecordToRecord {
    /// Threshold falling linearly from `t_init` to zero over `iterations`
    /// calls.
    pub fn new(t_init: f64, iterations: u64) -> Self {
        RecordToRecord { t_init, t: t_init, t_dec: t_init / iterations.max(1) as f64 }
    }

    pub fn reset(&mut self) {
        self.t = self.t_init;
    }

    /// Relative gap of `candidate` to `best`; infinite when it leaves more
    /// requests unassigned, negative-or-zero when it is at least as good.
    pub fn gap(candidate: ObjectiveValue, best: ObjectiveValue) -> f64 {
        use std::cmp::Ordering::*;
        match candidate.unassigned.cmp(&best.unassigned) {
            Less => f64::NEG_INFINITY,
            Greater => f64::INFINITY,
            Equal => {
                if best.cost == 0 {
                    if candidate.cost <= 0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (candidate.cost - best.cost) as f64 / best.cost as f64
                }
            }
        }
    }

    /// Whether `candidate` passes the current threshold, without lowering it.
    pub fn admits(&self, candidate: ObjectiveValue, best: ObjectiveValue) -> bool {
        candidate < best || Self::gap(candidate, best) < self.t
    }

    /// Lowers the threshold as `steps` calls to [`RecordToRecord::accept`]
    /// would.
    pub fn advance(&mut self, steps: u64) {
        self.t = (self.t - self.t_dec * steps as f64).max(0.0);
    }

    /// Accepts new bests always and other candidates when their gap to the
    /// best is below the threshold; then lowers the threshold.
    pub fn accept(&mut self, candidate: ObjectiveValue, best: ObjectiveValue) -> bool {
        let ok = self.admits(candidate, best);
        self.t = (self.t - self.t_dec).max(0.0);
        ok
    }
}
