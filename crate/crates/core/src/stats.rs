//! Structural route metrics.

use crate::model::{Instance, Route, Solution};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RouteStats {
    pub requests: usize,
    /// Most requests on board at once.
    pub width: usize,
    /// Maximal stretches between two moments with an empty vehicle.
    pub blocks: usize,
}

pub fn route_stats(route: &Route, inst: &Instance) -> RouteStats {
    let mut s = RouteStats::default();
    let mut on_board = 0usize;
    for &i in route.stops() {
        if inst.request_of(i).is_none() {
            continue;
        }
        if inst.is_pickup(i) {
            if on_board == 0 {
                s.blocks += 1;
            }
            on_board += 1;
            s.requests += 1;
            s.width = s.width.max(on_board);
        } else {
            on_board = on_board.saturating_sub(1);
        }
    }
    s
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionStats {
    pub routes: Vec<RouteStats>,
    pub used: usize,
    pub mean_requests: f64,
    pub max_requests: usize,
    pub mean_width: f64,
    pub max_width: usize,
    pub mean_blocks: f64,
    pub max_blocks: usize,
}

pub const STATS_HEADER: &str = "routes_used,mean_requests,max_requests,mean_width,max_width,mean_blocks,max_blocks";

/// Per-route stats for every vehicle and aggregates over used routes.
pub fn solution_stats(sol: &Solution, inst: &Instance) -> SolutionStats {
    let routes: Vec<RouteStats> = sol.routes.iter().map(|r| route_stats(r, inst)).collect();
    let used: Vec<&RouteStats> = routes.iter().filter(|s| s.requests > 0).collect();
    let n = used.len();
    let mean = |f: fn(&RouteStats) -> usize| if n == 0 { 0.0 } else { used.iter().map(|s| f(s)).sum::<usize>() as f64 / n as f64 };
    let max = |f: fn(&RouteStats) -> usize| used.iter().map(|s| f(s)).max().unwrap_or(0);
    SolutionStats {
        used: n,
        mean_requests: mean(|s| s.requests),
        max_requests: max(|s| s.requests),
        mean_width: mean(|s| s.width),
        max_width: max(|s| s.width),
        mean_blocks: mean(|s| s.blocks),
        max_blocks: max(|s| s.blocks),
        routes,
    }
}

impl SolutionStats {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.3},{},{:.3},{},{:.3},{}",
            self.used, self.mean_requests, self.max_requests, self.mean_width, self.max_width, self.mean_blocks, self.max_blocks
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::line_instance;

    fn inst() -> Instance {
        let w = (0, 1000);
        line_instance(&[0, 1, 2, 3, 4], &[(1, 2, w, w), (3, 4, w, w)], &[0], 2)
    }

    #[test]
    fn sequential_requests() {
        let inst = inst();
        let r = Route { vehicle: 0, visits: vec![4, 0, 2, 1, 3] };
        assert_eq!(route_stats(&r, &inst), RouteStats { requests: 2, width: 1, blocks: 2 });
    }

    #[test]
    fn interleaved_requests() {
        let inst = inst();
        let r = Route { vehicle: 0, visits: vec![4, 0, 1, 2, 3] };
        assert_eq!(route_stats(&r, &inst), RouteStats { requests: 2, width: 2, blocks: 1 });
    }

    #[test]
    fn empty_solution() {
        let inst = inst();
        let s = solution_stats(&Solution::empty(&inst), &inst);
        assert_eq!(s.used, 0);
        assert_eq!(s.to_csv(), "0,0.000,0,0.000,0,0.000,0");
    }
}
