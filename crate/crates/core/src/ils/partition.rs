//! Decomposition of a solution into route groups.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::ils::History;
use crate::model::{RequestId, Solution, VehicleId, Instance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub vehicles: Vec<VehicleId>,
    pub unassigned: Vec<RequestId>,
}

/// Groups shuffled routes into parts of about `chi` route nodes each, spreads
/// empty vehicles round-robin and hands every unassigned request to one part
/// by roulette over history affinity plus one.
pub fn partition<R: Rng>(sol: &Solution, inst: &Instance, chi: usize, history: &History, rng: &mut R) -> Vec<Part> {
    let mut used: Vec<VehicleId> = sol.routes.iter().filter(|r| !r.is_empty()).map(|r| r.vehicle).collect();
    let mut empty: Vec<VehicleId> = sol.routes.iter().filter(|r| r.is_empty()).map(|r| r.vehicle).collect();
    used.shuffle(rng);
    empty.shuffle(rng);
    let nodes: usize = used.iter().map(|&v| sol.routes[v].stops().len()).sum();
    let count = ((nodes as f64 / chi.max(1) as f64).round() as usize).clamp(1, inst.num_vehicles().max(1));
    let target = nodes as f64 / count as f64;
    let mut parts: Vec<Part> = Vec::with_capacity(count);
    let mut current = Part { vehicles: Vec::new(), unassigned: Vec::new() };
    let mut size = 0usize;
    for v in used {
        current.vehicles.push(v);
        size += sol.routes[v].stops().len();
        if size as f64 >= target && parts.len() + 1 < count {
            parts.push(std::mem::replace(&mut current, Part { vehicles: Vec::new(), unassigned: Vec::new() }));
            size = 0;
        }
    }
    if !current.vehicles.is_empty() || parts.is_empty() {
        parts.push(current);
    }
    for (i, v) in empty.into_iter().enumerate() {
        let n = parts.len();
        parts[i % n].vehicles.push(v);
    }
    let served: Vec<Vec<RequestId>> = parts
        .iter()
        .map(|p| {
            p.vehicles
                .iter()
                .flat_map(|&v| sol.routes[v].stops().iter().filter(|&&i| inst.is_pickup(i)).filter_map(|&i| inst.request_of(i)))
                .collect()
        })
        .collect();
    for &u in &sol.unassigned {
        let weights: Vec<u64> = served.iter().map(|reqs| 1 + reqs.iter().map(|&r| history.affinity(u, r)).sum::<u64>()).collect();
        let k = WeightedIndex::new(&weights).expect("weights are positive").sample(rng);
        parts[k].unassigned.push(u);
    }
    for p in &mut parts {
        p.vehicles.sort_unstable();
    }
    parts
}
