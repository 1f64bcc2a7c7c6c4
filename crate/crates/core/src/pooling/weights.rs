//! Hyperedge weight functions. All weights are non-positive; matching
//! maximizes their sum.

use crate::model::Instance;
use crate::pooling::hyperedge::Hyperedge;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightFn {
    /// `-rank / |e|`.
    Cardinality,
    /// Sequence cost scaled by the cardinality weight.
    Cost,
    /// Temporal spread scaled by the cardinality weight.
    Overlap,
    /// `cost * (1 - rho) + overlap * rho`.
    Combined { rho: f64 },
}

impl Default for WeightFn {
    fn default() -> Self {
        WeightFn::Combined { rho: 0.7 }
    }
}

impl WeightFn {
    pub fn parse(s: &str, rho: f64) -> Option<Self> {
        match s {
            "1" | "w1" | "cardinality" => Some(WeightFn::Cardinality),
            "2" | "w2" | "cost" => Some(WeightFn::Cost),
            "3" | "w3" | "overlap" => Some(WeightFn::Overlap),
            "4" | "w4" | "combined" => Some(WeightFn::Combined { rho }),
            _ => None,
        }
    }
}

pub fn cardinality_weight(size: usize, rank: usize) -> f64 {
    -(rank as f64) / size as f64
}

pub fn combine(cost_w: f64, overlap_w: f64, rho: f64) -> f64 {
    cost_w * (1.0 - rho) + overlap_w * rho
}

pub fn weight(e: &Hyperedge, f: WeightFn, rank: usize, inst: &Instance) -> f64 {
    let w1 = cardinality_weight(e.len(), rank);
    let w2 = || e.seq_cost as f64 * w1;
    let w3 = || {
        let reqs = e.requests.iter().map(|&r| inst.request(r));
        let (mut min_e, mut max_e, mut min_l, mut max_l) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for r in reqs {
            min_e = min_e.min(r.earliest);
            max_e = max_e.max(r.earliest);
            min_l = min_l.min(r.latest);
            max_l = max_l.max(r.latest);
        }
        ((max_l - min_e) - (min_l - max_e)) as f64 * w1
    };
    match f {
        WeightFn::Cardinality => w1,
        WeightFn::Cost => w2(),
        WeightFn::Overlap => w3(),
        WeightFn::Combined { rho } => combine(w2(), w3(), rho),
    }
}
