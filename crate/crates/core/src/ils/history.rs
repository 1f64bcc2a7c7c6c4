//! Pair counters over accepted solutions.

use std::collections::HashMap;

use crate::model::{Instance, RequestId, Solution};

#[derive(Clone, Debug, Default)]
pub struct History {
    /// `pairs[r][r2] = (after, same_route)`: how often `r2` directly followed
    /// `r` and how often both shared a route.
    pairs: Vec<HashMap<RequestId, (u32, u32)>>,
}

impl History {
    pub fn new(num_requests: usize) -> Self {
        History { pairs: vec![HashMap::new(); num_requests] }
    }

    pub fn after_count(&self, r: RequestId, r2: RequestId) -> u32 {
        self.pairs[r].get(&r2).map_or(0, |c| c.0)
    }

    pub fn same_route_count(&self, r: RequestId, r2: RequestId) -> u32 {
        self.pairs[r].get(&r2).map_or(0, |c| c.1)
    }

    /// Affinity of an unassigned request to a served one.
    pub fn affinity(&self, u: RequestId, r: RequestId) -> u64 {
        self.pairs[r].get(&u).map_or(0, |c| c.0 as u64 + c.1 as u64)
    }

    /// Counts adjacent request pairs along every route and every pair of
    /// requests sharing a route.
    pub fn record(&mut self, sol: &Solution, inst: &Instance) {
        for route in &sol.routes {
            let reqs: Vec<RequestId> = route.stops().iter().filter_map(|&i| inst.request_of(i)).collect();
            for w in reqs.windows(2) {
                if w[0] != w[1] {
                    self.pairs[w[0]].entry(w[1]).or_default().0 += 1;
                }
            }
            let mut served: Vec<RequestId> =
                route.stops().iter().filter(|&&i| inst.is_pickup(i)).filter_map(|&i| inst.request_of(i)).collect();
            served.sort_unstable();
            for (a, &r) in served.iter().enumerate() {
                for &r2 in &served[a + 1..] {
                    self.pairs[r].entry(r2).or_default().1 += 1;
                    self.pairs[r2].entry(r).or_default().1 += 1;
                }
            }
        }
    }
}
