//! Adjacent string removal.

use std::collections::BTreeSet;

use rand::Rng;

use crate::eval::State;
use crate::model::{NodeId, RequestId, VehicleId};
use crate::rnr::RnrParams;

#[derive(Clone, Debug, PartialEq)]
pub struct StringRemoval {
    pub vehicle: VehicleId,
    /// Stops of the route before removal.
    pub route_len: usize,
    pub l_sigma: usize,
    /// Preserved substring length; zero for a plain split.
    pub kept: usize,
    pub removed_nodes: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RuinStats {
    pub k_s: usize,
    /// Upper end of the uniform draw for `k_s`.
    pub k_s_bound: f64,
    pub l_s_max: f64,
    pub strings: Vec<StringRemoval>,
    pub removed: BTreeSet<RequestId>,
}

/// `floor(U(lo, hi))`, collapsing to `lo` when the interval is empty.
fn floor_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> usize {
    if hi <= lo {
        lo as usize
    } else {
        rng.gen_range(lo..hi).floor() as usize
    }
}

/// Removes strings of visits around requests related to a random seed
/// request, touching each route at most once.
pub fn ruin<R: Rng>(st: &mut State<'_>, params: &RnrParams, rng: &mut R) -> RuinStats {
    let inst = st.inst();
    let used: Vec<VehicleId> = st.used_vehicles().collect();
    let mut stats = RuinStats::default();
    if used.is_empty() {
        return stats;
    }
    let assigned: Vec<RequestId> = used.iter().flat_map(|&v| st.requests_of(v)).collect::<BTreeSet<_>>().into_iter().collect();
    let avg = used.iter().map(|&v| st.route_len(v)).sum::<usize>() as f64 / used.len() as f64;
    let l_s_max = params.max_string_len.min(avg);
    let k_s_bound = 4.0 * params.avg_removed / (1.0 + l_s_max) - 1.0;
    let k_s = floor_uniform(rng, 1.0, k_s_bound).max(1);
    stats.k_s = k_s;
    stats.k_s_bound = k_s_bound;
    stats.l_s_max = l_s_max;

    let seed = assigned[rng.gen_range(0..assigned.len())];
    let seed_pickup = inst.request(seed).pickup;
    let mut related = assigned.clone();
    related.sort_by_key(|&r| (inst.time(seed_pickup, inst.request(r).pickup), r));

    let mut touched: BTreeSet<VehicleId> = BTreeSet::new();
    for r in related {
        if touched.len() >= k_s {
            break;
        }
        let Some(v) = st.vehicle_of_request(r) else { continue };
        if touched.contains(&v) {
            continue;
        }
        touched.insert(v);
        let stops: Vec<NodeId> = st.route(v)[1..].to_vec();
        let len = stops.len();
        let l = floor_uniform(rng, 1.0, (len as f64).min(l_s_max)).clamp(1, len);
        let pos = stops.iter().position(|&i| i == inst.request(r).pickup).expect("pickup is on its route");
        let split_string = rng.gen::<f64>() >= params.split_prob && l < len;
        let kept = if split_string {
            let mut m = 1;
            while m < len - l && rng.gen::<f64>() < params.substring_prob {
                m += 1;
            }
            m
        } else {
            0
        };
        let total = l + kept;
        let lo = pos.saturating_sub(total - 1);
        let hi = pos.min(len - total);
        let start = rng.gen_range(lo..=hi);
        let mut removed_nodes: Vec<NodeId> = stops[start..start + total].to_vec();
        if kept > 0 {
            let offset = rng.gen_range(0..=l);
            removed_nodes.drain(offset..offset + kept);
        }
        stats.strings.push(StringRemoval { vehicle: v, route_len: len, l_sigma: l, kept, removed_nodes: removed_nodes.len() });
        let reqs: BTreeSet<RequestId> = removed_nodes.iter().filter_map(|&i| inst.request_of(i)).collect();
        for q in reqs {
            st.remove_request(q);
            stats.removed.insert(q);
        }
    }
    stats
}
